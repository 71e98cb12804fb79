#include "wpcn/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpcn {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kPowerTol = 1e-12;
constexpr int kPowerMaxIter = 20000;

double max_abs_entry(const CMatrix& m) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) s = std::max(s, std::abs(m(i, j)));
  return s;
}

CVector default_start(Eigen::Index n) {
  CVector x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x(i) = Complex(1.0 + 0.1 * static_cast<double>(i), 0.05 * static_cast<double>(i));
  return x;
}

// Is (psi + eps) I - A positive definite?
bool certifies_maximum(const CMatrix& a, double psi, double eps) {
  CMatrix shifted = -a;
  shifted.diagonal().array() += psi + eps;
  Eigen::LLT<CMatrix> llt(shifted);
  return llt.info() == Eigen::Success;
}

EigenPair dense_fallback(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  const Eigen::Index n = a.rows();
  EigenPair out;
  out.value = es.eigenvalues()(n - 1);
  out.vector = es.eigenvectors().col(n - 1).normalized();
  normalize_phase(out.vector);
  return out;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("HermitianMatrix: matrix is not square");
  const double scale = max_abs_entry(m);
  if (asymmetry(m) > kSymmetryTol * scale)
    throw std::invalid_argument("HermitianMatrix: input violates Hermitian symmetry");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  return HermitianMatrix(CMatrix::Zero(dim, dim), Unchecked{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(CMatrix::Identity(dim, dim), Unchecked{});
}

HermitianMatrix HermitianMatrix::outer(const CVector& h) {
  CMatrix m = h * h.adjoint();
  // exact symmetry; the diagonal of h h^H is real
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, i) = Complex(std::norm(h(i)), 0.0);
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) m(j, i) = std::conj(m(i, j));
  }
  return HermitianMatrix(std::move(m), Unchecked{});
}

double HermitianMatrix::trace_product(const HermitianMatrix& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("trace_product: dimension mismatch");
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B
  return (m_.array() * other.m_.array().conjugate()).sum().real();
}

double HermitianMatrix::quadratic_form(const CVector& v) const {
  if (v.size() != dim()) throw std::invalid_argument("quadratic_form: dimension mismatch");
  return v.dot(m_ * v).real();
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  if (other.dim() != dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch");
  m_ += other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

double HermitianMatrix::asymmetry(const CMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

void normalize_phase(CVector& v) {
  const double norm = v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 1e-10 * norm) {
      v *= std::conj(v(i)) / mag;
      v(i) = Complex(std::abs(v(i)), 0.0);
      return;
    }
  }
}

EigenPair max_eig(const HermitianMatrix& herm, const std::optional<CVector>& start) {
  const CMatrix& a = herm.matrix();
  const Eigen::Index n = a.rows();
  if (n == 0) throw std::invalid_argument("max_eig: empty matrix");

  EigenPair out;
  if (n == 1) {
    out.value = a(0, 0).real();
    out.vector = CVector::Ones(1);
    return out;
  }
  const double scale = max_abs_entry(a);
  if (scale == 0.0) {
    out.value = 0.0;
    out.vector = CVector::Unit(n, 0);
    return out;
  }

  // Work on A / scale so tiny channel gains do not underflow the tolerances.
  const CMatrix s = a / scale;
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double radius = s.row(i).cwiseAbs().sum() - std::abs(s(i, i));
    shift = std::max(shift, radius - s(i, i).real());
  }
  CMatrix shifted = s;
  shifted.diagonal().array() += shift;

  CVector x = (start && start->size() == n && start->norm() > 0.0) ? *start : default_start(n);
  x.normalize();
  double rq = 0.0;
  bool converged = false;
  for (int it = 0; it < kPowerMaxIter; ++it) {
    CVector y = shifted * x;
    rq = x.dot(y).real();
    const double residual = (y - rq * x).norm();
    if (residual <= kPowerTol * std::max(1.0, std::abs(rq))) {
      converged = true;
      break;
    }
    const double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
  }

  if (converged) {
    out.value = (rq - shift) * scale;
    out.vector = x;
    const double eps = 1e-9 * std::max(1.0, std::abs(rq - shift));
    if (certifies_maximum(s, rq - shift, eps)) {
      normalize_phase(out.vector);
      return out;
    }
  }
  return dense_fallback(a);
}

EigenPair max_eig(const CMatrix& a) { return max_eig(HermitianMatrix(a)); }

}  // namespace wpcn
