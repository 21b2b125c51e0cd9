#ifndef SEMIRANDOM_SUBSPACE_HPP
#define SEMIRANDOM_SUBSPACE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semirandom/errors.hpp"
#include "semirandom/rng.hpp"

namespace semirandom {

/// An m-dimensional linear subspace of R^d stored as a d x m matrix with
/// orthonormal columns. Immutable once built.
class Subspace {
 public:
  /// The whole of R^d.
  static Subspace full(Eigen::Index d) {
    if (d < 1) fail(ErrorKind::InvalidDimension, "ambient dimension must be >= 1");
    return Subspace(Eigen::MatrixXd::Identity(d, d));
  }

  /// Wraps a basis that is already orthonormal; the caller is trusted.
  static Subspace from_orthonormal(Eigen::MatrixXd basis) {
    if (basis.cols() < 1 || basis.cols() > basis.rows())
      fail(ErrorKind::InvalidDimension, "need 1 <= m <= d, got m=" + std::to_string(basis.cols()) +
                                            " d=" + std::to_string(basis.rows()));
    return Subspace(std::move(basis));
  }

  Eigen::Index d() const { return basis_.rows(); }
  Eigen::Index m() const { return basis_.cols(); }
  bool is_full() const { return basis_.cols() == basis_.rows(); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// P_S v = B (B^T v). Exact identity for the full space.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    check_dim(v);
    if (is_full()) return v;
    return basis_ * (basis_.transpose() * v);
  }

  /// Coordinates B^T v of the projection in the basis.
  Eigen::VectorXd coordinates(const Eigen::VectorXd& v) const {
    check_dim(v);
    return basis_.transpose() * v;
  }

  /// max |B^T B - I|.
  double orthonormality_error() const {
    const Eigen::MatrixXd gram = basis_.transpose() * basis_;
    return (gram - Eigen::MatrixXd::Identity(m(), m())).cwiseAbs().maxCoeff();
  }

 private:
  explicit Subspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}

  void check_dim(const Eigen::VectorXd& v) const {
    if (v.size() != d())
      fail(ErrorKind::InvalidDimension, "vector has dimension " + std::to_string(v.size()) +
                                            ", subspace lives in R^" + std::to_string(d()));
  }

  Eigen::MatrixXd basis_;
};

namespace detail {

// Classical Gram-Schmidt with one reorthogonalization pass per column.
inline Eigen::MatrixXd gram_schmidt(Eigen::MatrixXd columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    const double original = columns.col(j).norm();
    if (!(original > 0.0) || !std::isfinite(original))
      fail(ErrorKind::DegenerateBasis, "column " + std::to_string(j) + " is zero or non-finite");
    for (int pass = 0; pass < 2; ++pass) {
      if (j == 0) break;
      const Eigen::VectorXd coeffs = columns.leftCols(j).transpose() * columns.col(j);
      columns.col(j) -= columns.leftCols(j) * coeffs;
    }
    const double residual = columns.col(j).norm();
    if (residual < 1e-12 * original)
      fail(ErrorKind::DegenerateBasis,
           "column " + std::to_string(j) + " is linearly dependent on the previous ones");
    columns.col(j) /= residual;
  }
  return columns;
}

}  // namespace detail

/// Uniformly random m-dimensional subspace: orthonormalized span of m i.i.d.
/// Gaussian vectors, which has the same law as the span of m uniform sphere
/// vectors.
inline Subspace sample_subspace(Eigen::Index d, Eigen::Index m, std::uint64_t seed) {
  if (m < 1 || d < 1 || m > d)
    fail(ErrorKind::InvalidDimension,
         "need 1 <= m <= d, got m=" + std::to_string(m) + " d=" + std::to_string(d));
  Rng rng(seed);
  Eigen::MatrixXd columns(d, m);
  for (Eigen::Index j = 0; j < m; ++j) columns.col(j) = rng.gaussian_vector(d);
  return Subspace::from_orthonormal(detail::gram_schmidt(std::move(columns)));
}

/// Subspace spanned by user-supplied vectors. Without orthonormalization the
/// vectors are taken as the basis verbatim and must already be orthonormal.
inline Subspace subspace_from_vectors(std::span<const Eigen::VectorXd> vectors, bool orthonormalize = true) {
  if (vectors.empty()) fail(ErrorKind::InvalidDimension, "no spanning vectors given");
  const Eigen::Index d = vectors.front().size();
  if (d < 1) fail(ErrorKind::InvalidDimension, "spanning vectors are empty");
  if (static_cast<Eigen::Index>(vectors.size()) > d)
    fail(ErrorKind::DegenerateBasis, "more spanning vectors than the ambient dimension");
  Eigen::MatrixXd columns(d, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != d)
      fail(ErrorKind::InvalidDimension, "spanning vector " + std::to_string(j) + " has dimension " +
                                            std::to_string(vectors[j].size()) + ", expected " +
                                            std::to_string(d));
    columns.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  if (!orthonormalize) {
    Subspace s = Subspace::from_orthonormal(std::move(columns));
    if (!(s.orthonormality_error() <= 1e-10))
      fail(ErrorKind::DegenerateBasis, "basis marked orthonormal is not (max |B^T B - I| = " +
                                           std::to_string(s.orthonormality_error()) + ")");
    return s;
  }
  return Subspace::from_orthonormal(detail::gram_schmidt(std::move(columns)));
}

}  // namespace semirandom

#endif  // SEMIRANDOM_SUBSPACE_HPP
