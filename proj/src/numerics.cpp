#include "olfact/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "olfact/error.hpp"

namespace olfact::numerics {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw NonFinite(std::string(what) + " contains NaN or Inf");
}

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) throw NonFinite(std::string(what) + " contains NaN or Inf");
}

namespace {

// Fills zero columns of `u` (flagged in `missing`) with unit vectors
// orthogonal to all other columns, scanning the standard basis in order.
void complete_orthonormal(Matrix& u, const std::vector<bool>& missing) {
  const Index rows = u.rows();
  Index next_basis = 0;
  for (Index j = 0; j < u.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) continue;
    for (; next_basis < rows; ++next_basis) {
      Vector cand = Vector::Unit(rows, next_basis);
      for (int pass = 0; pass < 2; ++pass) {
        for (Index q = 0; q < u.cols(); ++q) {
          if (q == j || (missing[static_cast<std::size_t>(q)] && q > j)) continue;
          cand -= u.col(q).dot(cand) * u.col(q);
        }
      }
      const double norm = cand.norm();
      if (norm > 0.5) {
        u.col(j) = cand / norm;
        ++next_basis;
        break;
      }
    }
  }
}

// Hestenes one-sided Jacobi on a tall matrix (rows >= cols).
SvdResult jacobi_tall(const Matrix& a) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  Matrix w = a;
  Matrix v = Matrix::Identity(cols, cols);
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<Index>(rows, 1));
  // Columns this small are roundoff; rotating them against real columns never settles.
  const double eps = std::numeric_limits<double>::epsilon();
  const double negligible = eps * eps * a.squaredNorm();

  bool rotated = true;
  int sweep = 0;
  while (rotated) {
    if (sweep == kMaxSvdSweeps) {
      throw NoConvergence("jacobi svd", sweep, std::numeric_limits<double>::quiet_NaN());
    }
    ++sweep;
    rotated = false;
    for (Index p = 0; p + 1 < cols; ++p) {
      for (Index q = p + 1; q < cols; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::min(alpha, beta) <= negligible) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < rows; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Index i = 0; i < cols; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }

  Vector norms(cols);
  for (Index j = 0; j < cols; ++j) norms(j) = w.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(cols));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return norms(x) > norms(y); });

  SvdResult out;
  out.u = Matrix::Zero(rows, cols);
  out.s = Vector::Zero(cols);
  out.vt = Matrix::Zero(cols, cols);
  std::vector<bool> missing(static_cast<std::size_t>(cols), false);
  for (Index j = 0; j < cols; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    const double sj = norms(src);
    out.s(j) = sj;
    out.vt.row(j) = v.col(src).transpose();
    if (sj > std::numeric_limits<double>::min()) {
      out.u.col(j) = w.col(src) / sj;
    } else {
      out.s(j) = 0.0;
      missing[static_cast<std::size_t>(j)] = true;
    }
  }
  complete_orthonormal(out.u, missing);
  return out;
}

void fix_signs(SvdResult& r) {
  for (Index j = 0; j < r.u.cols(); ++j) {
    for (Index i = 0; i < r.u.rows(); ++i) {
      const double x = r.u(i, j);
      if (std::abs(x) > 1e-12) {
        if (x < 0.0) {
          r.u.col(j) *= -1.0;
          r.vt.row(j) *= -1.0;
        }
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd input");
  SvdResult r;
  if (m.rows() >= m.cols()) {
    r = jacobi_tall(m);
  } else {
    SvdResult t = jacobi_tall(m.transpose());
    r.u = t.vt.transpose();
    r.s = std::move(t.s);
    r.vt = t.u.transpose();
  }
  fix_signs(r);
  return r;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return svd(m).s(0);
}

double nuclear_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return svd(m).s.sum();
}

Matrix svt(const Matrix& m, double tau, double& shrunk_nuclear_norm) {
  if (!(tau >= 0.0)) throw InvalidConfig("svt threshold must be nonnegative");
  if (m.size() == 0) {
    shrunk_nuclear_norm = 0.0;
    return m;
  }
  const SvdResult r = svd(m);
  Vector s = (r.s.array() - tau).max(0.0).matrix();
  shrunk_nuclear_norm = s.sum();
  Index keep = 0;
  while (keep < s.size() && s(keep) > 0.0) ++keep;
  if (keep == 0) return Matrix::Zero(m.rows(), m.cols());
  return r.u.leftCols(keep) * s.head(keep).asDiagonal() * r.vt.topRows(keep);
}

Matrix svt(const Matrix& m, double tau) {
  double unused = 0.0;
  return svt(m, tau, unused);
}

Index numerical_rank(const Vector& singular_values, double relative_threshold) {
  if (singular_values.size() == 0 || singular_values(0) <= 0.0) return 0;
  const double cut = relative_threshold * singular_values(0);
  return static_cast<Index>((singular_values.array() > cut).count());
}

Vector prox_nonneg_group(const Vector& v, double theta) {
  if (!(theta >= 0.0)) throw InvalidConfig("prox threshold must be nonnegative");
  Vector plus = v.cwiseMax(0.0);
  const double norm = plus.norm();
  if (norm <= theta) return Vector::Zero(v.size());
  return (1.0 - theta / norm) * plus;
}

Vector prox_nonneg_l1(const Vector& v, double theta) {
  if (!(theta >= 0.0)) throw InvalidConfig("prox threshold must be nonnegative");
  return (v.array() - theta).max(0.0).matrix();
}

Vector prox_nonneg_l2sq(const Vector& v, double theta) {
  if (!(theta >= 0.0)) throw InvalidConfig("prox threshold must be nonnegative");
  return v.cwiseMax(0.0) / (1.0 + 2.0 * theta);
}

PcaResult pca(const Matrix& points, Index n_components) {
  require_finite(points, "pca input");
  const Index n = points.rows();
  const Index dims = points.cols();
  if (n < 2) throw InvalidConfig("pca needs at least two points");
  if (n_components < 1 || n_components > std::min(dims, n - 1)) {
    throw InvalidConfig("pca: n_components must lie in [1, min(dims, points-1)]");
  }
  PcaResult out;
  out.mean = points.colwise().mean().transpose();
  const Matrix centered = points.rowwise() - out.mean.transpose();
  if (centered.cwiseAbs().maxCoeff() == 0.0) {
    throw DegenerateData("pca: all points are identical");
  }
  const SvdResult r = svd(centered);
  out.components = r.vt.topRows(n_components).transpose();
  out.coords = r.u.leftCols(n_components) * r.s.head(n_components).asDiagonal();
  const Vector var = r.s.array().square() / static_cast<double>(n - 1);
  out.explained_variance = var.head(n_components);
  out.explained_variance_ratio = out.explained_variance / var.sum();
  return out;
}

}  // namespace olfact::numerics
