#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>

namespace wpcn {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Dense complex Hermitian matrix. Construction checks the symmetry and
/// then stores the exactly-Hermitian part, so entries(i,j) == conj(entries(j,i))
/// bit for bit afterwards.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Throws std::invalid_argument if `m` is not square or deviates from
  /// Hermitian symmetry by more than 1e-9 of its largest entry.
  explicit HermitianMatrix(const CMatrix& m);

  static HermitianMatrix zero(Eigen::Index dim);
  static HermitianMatrix identity(Eigen::Index dim);
  /// h * h^H
  static HermitianMatrix outer(const CVector& h);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  /// Re tr(this * other), computed without forming the product.
  double trace_product(const HermitianMatrix& other) const;
  /// Re(v^H * this * v)
  double quadratic_form(const CVector& v) const;

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  HermitianMatrix& operator*=(double s);
  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

  /// Largest |a_ij - conj(a_ji)|.
  static double asymmetry(const CMatrix& m);

 private:
  struct Unchecked {};
  HermitianMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}

  CMatrix m_;
};

struct EigenPair {
  double value = 0.0;
  CVector vector;  ///< unit norm, first non-negligible component real positive
};

/// Largest eigenvalue and a matching unit eigenvector.
///
/// Runs power iteration on A + cI where c is the smallest shift that makes
/// the Gershgorin disc bound non-negative, so the target eigenvalue is also
/// the dominant one. The result is certified by a Cholesky factorisation of
/// (psi + eps) I - A; if the iteration stalls on a near-degenerate spectrum or
/// the certificate fails, a dense self-adjoint eigensolver is used instead.
/// `start` seeds the iteration (warm start); it need not be normalised.
EigenPair max_eig(const HermitianMatrix& a, const std::optional<CVector>& start = std::nullopt);

/// Same as above for a raw matrix; throws std::invalid_argument when the
/// input violates Hermitian symmetry beyond 1e-9 (relative to its largest entry).
EigenPair max_eig(const CMatrix& a);

/// Rotates `v` so its first component with magnitude above 1e-10 * ||v|| is real positive.
void normalize_phase(CVector& v);

}  // namespace wpcn
