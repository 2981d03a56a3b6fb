#pragma once

// Shared helpers for the unit tests and the acceptance runner: seeded data,
// scratch directories and brute-force oracles that do not reuse library code.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "olfact/corpus.hpp"
#include "olfact/numerics.hpp"
#include "olfact/perceptmap.hpp"

namespace olfact::test {

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline Vector gaussian_vec(Index n, std::mt19937_64& rng, double sigma = 1.0) {
  return gaussian(n, 1, rng, sigma).col(0);
}

inline Matrix uniform(Index rows, Index cols, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

/// A map with the given matrix and its spectrum; names d1.., f1...
inline PerceptualMap make_map(const Matrix& a) {
  PerceptualMap m;
  m.a = a;
  m.singular_values = Eigen::JacobiSVD<Matrix>(a).singularValues();
  for (Index i = 0; i < a.cols(); ++i) m.feature_names.push_back("f" + std::to_string(i + 1));
  for (Index i = 0; i < a.rows(); ++i) m.descriptor_names.push_back("d" + std::to_string(i + 1));
  return m;
}

inline Dictionary make_dict(const Matrix& features, const std::string& prefix = "c") {
  std::vector<std::string> ids, names;
  for (Index j = 0; j < features.cols(); ++j) {
    ids.push_back(prefix + std::to_string(j + 1));
    names.push_back("compound " + std::to_string(j + 1));
  }
  return Dictionary(ids, names, features);
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("olfact_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- oracles ---------------------------------------------------------------

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(Matrix m) {
  const Index n = m.rows();
  double det = 1.0;
  for (Index c = 0; c < n; ++c) {
    Index p = c;
    for (Index r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
    if (m(p, c) == 0.0) return 0.0;
    if (p != c) {
      m.row(p).swap(m.row(c));
      det = -det;
    }
    det *= m(c, c);
    for (Index r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      m.row(r).tail(n - c) -= f * m.row(c).tail(n - c);
    }
  }
  return det;
}

/// Eigenvalues of a symmetric PSD matrix from sign changes of
/// det(G - t I) on a fine scan of [0, trace], refined by bisection.
/// Returned in decreasing order.
inline std::vector<double> gram_eigenvalues_bisection(const Matrix& g, int scan = 200000) {
  const Index n = g.rows();
  auto p = [&](double t) { return determinant(g - t * Matrix::Identity(n, n)); };
  const double hi = g.trace() * (1.0 + 1e-9) + 1e-300;
  std::vector<double> roots;
  double t0 = -1e-12 * hi;
  double p0 = p(t0);
  for (int i = 1; i <= scan; ++i) {
    const double t1 = hi * i / scan;
    const double p1 = p(t1);
    if ((p0 < 0) != (p1 < 0) || p1 == 0.0) {
      double a = t0, b = t1, pa = p0;
      for (int it = 0; it < 200; ++it) {
        const double c = 0.5 * (a + b);
        const double pc = p(c);
        if ((pc < 0) == (pa < 0)) {
          a = c;
          pa = pc;
        } else {
          b = c;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    t0 = t1;
    p0 = p1;
  }
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

/// Projected gradient with backtracking on a convex objective over x >= 0,
/// restarting off the origin whenever it lands there (the objective may be
/// nondifferentiable at 0 only).
template <class F, class G>
Vector projected_gradient(const Vector& start, F f, G grad, long max_iter = 200000) {
  Vector x = start;
  double fx = f(x);
  double t = 1.0;
  for (long it = 0; it < max_iter; ++it) {
    if (x.isZero(0.0)) {
      // Probe a tiny step in each positive coordinate direction.
      Vector best = x;
      double fbest = fx;
      for (Index i = 0; i < x.size(); ++i) {
        Vector y = Vector::Zero(x.size());
        y(i) = 1e-9;
        if (f(y) < fbest) {
          fbest = f(y);
          best = y;
        }
      }
      if (fbest >= fx) return x;
      x = best;
      fx = fbest;
    }
    const Vector g = grad(x);
    t = std::min(1.0, 2.0 * t);
    Vector y;
    double fy = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      y = (x - t * g).cwiseMax(0.0);
      fy = f(y);
      if (fy <= fx - 0.5 / t * (y - x).squaredNorm() + 1e-300) break;
      t *= 0.5;
    }
    const double move = (y - x).norm();
    if (fy > fx) return x;
    x = y;
    fx = fy;
    if (move <= 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

inline double prox_group_objective(const Vector& x, const Vector& v, double theta) {
  return 0.5 * (x - v).squaredNorm() + theta * x.norm();
}

inline Vector prox_group_oracle(const Vector& v, double theta) {
  auto f = [&](const Vector& x) { return prox_group_objective(x, v, theta); };
  auto g = [&](const Vector& x) -> Vector {
    const double n = x.norm();
    return n > 0 ? Vector(x - v + theta * x / n) : Vector(x - v);
  };
  return projected_gradient(v.cwiseMax(0.0) + Vector::Constant(v.size(), 1e-3), f, g);
}

inline Vector prox_l1_oracle(const Vector& v, double theta) {
  auto f = [&](const Vector& x) { return 0.5 * (x - v).squaredNorm() + theta * x.sum(); };
  auto g = [&](const Vector& x) -> Vector {
    return x - v + Vector::Constant(x.size(), theta);
  };
  return projected_gradient(Vector::Constant(v.size(), 1.0), f, g);
}

inline double nuclear_norm_ref(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
}

/// Subgradient of the nuclear norm at m: U_r V_r^T over the nonzero spectrum.
inline Matrix nuclear_subgradient(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Index r = 0;
  while (r < s.singularValues().size() && s.singularValues()(r) > 0.0) ++r;
  return s.matrixU().leftCols(r) * s.matrixV().leftCols(r).transpose();
}

/// Best objective of the diminishing-step subgradient method on
/// 0.5*||Y - A X||^2 + lambda*||A||_*, step 1/(L (1 + t/10)).
inline double fit_subgradient_oracle(const Matrix& x, const Matrix& y, double lambda, long steps) {
  const double lip = Eigen::JacobiSVD<Matrix>(x).singularValues()(0);
  const double l = lip * lip;
  Matrix a = Matrix::Zero(y.rows(), x.rows());
  auto obj = [&](const Matrix& z) {
    return 0.5 * (y - z * x).squaredNorm() + lambda * nuclear_norm_ref(z);
  };
  double best = obj(a);
  for (long t = 0; t < steps; ++t) {
    const Matrix g = (a * x - y) * x.transpose() + lambda * nuclear_subgradient(a);
    a -= g / (l * (1.0 + t / 10.0));
    if (t % 16 == 0 || t + 4096 > steps) best = std::min(best, obj(a));
  }
  return best;
}

/// Best point of the subgradient method on 0.5*||Z - M||^2 + tau*||Z||_*.
inline Matrix svt_subgradient_oracle(const Matrix& m, double tau, long steps) {
  auto obj = [&](const Matrix& z) { return 0.5 * (z - m).squaredNorm() + tau * nuclear_norm_ref(z); };
  Matrix z = m;
  Matrix best = z;
  double fbest = obj(z);
  for (long t = 0; t < steps; ++t) {
    z -= (z - m + tau * nuclear_subgradient(z)) / (1.0 + t / 10.0);
    if (t % 16 == 0 || t + 4096 > steps) {
      const double f = obj(z);
      if (f < fbest) {
        fbest = f;
        best = z;
      }
    }
  }
  return best;
}

/// Exhaustive grid over [0, hi]^3 for 0.5*||y + D w||^2 + mu*sum(w).
inline double cancellation_grid_oracle(const Matrix& d, const Vector& y, double mu, double hi,
                                       double step) {
  const Matrix g = d.transpose() * d;
  const Vector b = d.transpose() * y;
  const double c = 0.5 * y.squaredNorm();
  const int n = static_cast<int>(std::lround(hi / step));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k) {
        const Eigen::Vector3d w(i * step, j * step, k * step);
        const double f = c + b.dot(w) + 0.5 * w.dot(g * w) + mu * w.sum();
        best = std::min(best, f);
      }
  return best;
}

/// Exhaustive grid over [0, hi]^2 for ||b + E w||^2 + nu*sum(w).
inline double stego_grid_oracle(const Matrix& e, const Vector& b, double nu, double hi,
                                double step) {
  const int n = static_cast<int>(std::lround(hi / step));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Eigen::Vector2d w(i * step, j * step);
      best = std::min(best, (b + e * w).squaredNorm() + nu * w.sum());
    }
  return best;
}

}  // namespace olfact::test
