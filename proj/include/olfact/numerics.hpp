#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace olfact {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thin singular value decomposition m = u * diag(s) * vt.
///
/// For an r x c input with p = min(r, c): u is r x p with orthonormal
/// columns, s has p entries sorted nonincreasing, vt is p x c with
/// orthonormal rows. The first entry of each left singular vector whose
/// magnitude exceeds 1e-12 is nonnegative, so repeated runs on the same
/// input are bitwise identical.
struct SvdResult {
  Matrix u;
  Vector s;
  Matrix vt;
};

namespace numerics {

/// Sweep cap of the Jacobi SVD.
inline constexpr int kMaxSvdSweeps = 10000;

/// Throws NonFinite if any entry of `m` is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);
void require_finite(const Vector& v, std::string_view what);

/// One-sided (Hestenes) Jacobi SVD. Throws NonFinite, NoConvergence.
SvdResult svd(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

double nuclear_norm(const Matrix& m);

/// Singular value thresholding: u * diag(max(s - tau, 0)) * vt, the proximal
/// operator of tau * ||.||_*.
Matrix svt(const Matrix& m, double tau);

/// svt that also reports the nuclear norm of its output.
Matrix svt(const Matrix& m, double tau, double& shrunk_nuclear_norm);

/// Number of singular values strictly above `relative_threshold * s[0]`.
Index numerical_rank(const Vector& singular_values, double relative_threshold = 1e-6);

/// argmin_x>=0 0.5*||x - v||^2 + theta*||x||_2.
Vector prox_nonneg_group(const Vector& v, double theta);

/// argmin_x>=0 0.5*||x - v||^2 + theta*sum(x), i.e. max(v - theta, 0).
Vector prox_nonneg_l1(const Vector& v, double theta);

/// argmin_x>=0 0.5*||x - v||^2 + theta*||x||_2^2, i.e. max(v, 0) / (1 + 2 theta).
Vector prox_nonneg_l2sq(const Vector& v, double theta);

/// Principal component analysis of the rows of `points`.
struct PcaResult {
  Matrix components;          ///< dims x n_components, orthonormal columns
  Matrix coords;              ///< points x n_components
  Vector explained_variance;  ///< per component, sample variance (divisor N-1)
  Vector explained_variance_ratio;
  Vector mean;
};

/// Requires at least two points and n_components <= min(dims, points - 1).
/// Throws DegenerateData when every centered point is zero.
PcaResult pca(const Matrix& points, Index n_components);

}  // namespace numerics
}  // namespace olfact
