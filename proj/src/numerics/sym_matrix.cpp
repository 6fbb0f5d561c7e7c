#include "hsrnet/numerics/sym_matrix.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "hsrnet/errors.hpp"

namespace hsrnet::numerics {

SymMatrix::SymMatrix(std::size_t order, double fill)
    : order_(order), data_(order * (order + 1) / 2, fill) {}

SymMatrix SymMatrix::identity(std::size_t order) {
  SymMatrix m(order);
  for (std::size_t i = 0; i < order; ++i) m.set(i, i, 1.0);
  return m;
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < order_; ++i) s += (*this)(i, i);
  return s;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = 0; j < order_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

bool SymMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> SymMatrix::dense() const {
  std::vector<double> out(order_ * order_);
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = 0; j < order_; ++j) out[i * order_ + j] = (*this)(i, j);
  return out;
}

namespace {

Eigen::MatrixXd to_eigen(const SymMatrix& m) {
  if (m.order() == 0) throw InvalidArgument("eigensolver: matrix order must be >= 1");
  if (!m.all_finite()) throw NumericInput("eigensolver: non-finite matrix entry");
  const auto n = static_cast<Eigen::Index>(m.order());
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

EigenPair sym_eig_min(const SymMatrix& m, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("sym_eig_min: tol must be positive");
  const Eigen::MatrixXd e = to_eigen(m);
  // Householder tridiagonalisation followed by implicit symmetric QR.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
  if (solver.info() != Eigen::Success) throw NumericInput("sym_eig_min: eigensolver failed");

  Eigen::VectorXd v = solver.eigenvectors().col(0);
  // Sign convention: first nonzero component positive.
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (v(k) != 0.0) {
      if (v(k) < 0.0) v = -v;
      break;
    }
  }
  const double lambda = solver.eigenvalues()(0);
  const double residual = (e * v - lambda * v).norm();
  if (residual > tol * std::max(e.norm(), 1e-300) && residual > 1e-300)
    throw NumericInput("sym_eig_min: residual exceeds tolerance");

  EigenPair out;
  out.value = lambda;
  out.vector.assign(v.data(), v.data() + v.size());
  return out;
}

std::vector<double> sym_eigenvalues(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericInput("sym_eigenvalues: eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double frobenius_distance(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) throw DimensionMismatch("frobenius_distance: order mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = 0; j < a.order(); ++j) {
      const double t = a(i, j) - b(i, j);
      s += t * t;
    }
  return std::sqrt(s);
}

}  // namespace hsrnet::numerics
