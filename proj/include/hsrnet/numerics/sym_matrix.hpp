#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace hsrnet::numerics {

// Symmetric matrix in packed lower-triangular storage: (i, j) and (j, i) are
// the same element, so symmetry holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t order, double fill = 0.0);

  static SymMatrix identity(std::size_t order);

  std::size_t order() const { return order_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  double& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { data_[index(i, j)] = v; }

  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  // Row-major dense copy.
  std::vector<double> dense() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  std::size_t order_ = 0;
  std::vector<double> data_;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};

// Smallest eigenvalue and a unit eigenvector. Throws NumericInput on
// non-finite entries and InvalidArgument for an empty matrix or tol <= 0.
EigenPair sym_eig_min(const SymMatrix& m, double tol = 1e-10);

// All eigenvalues in ascending order.
std::vector<double> sym_eigenvalues(const SymMatrix& m);

double frobenius_distance(const SymMatrix& a, const SymMatrix& b);

}  // namespace hsrnet::numerics
