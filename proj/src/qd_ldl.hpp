#pragma once

// Sparse LDL' factorization of a quasi-definite matrix with dynamic
// regularization: a pivot whose sign disagrees with the expected sign, or
// whose magnitude falls below `pivot_floor`, is replaced by
// sign * `pivot_boost`. Fill-reducing order comes from Eigen's AMD.

#include <Eigen/SparseCore>
#include <vector>

namespace scvx::detail {

class QuasiDefiniteLdl {
 public:
  double pivot_floor = 1e-13;
  double pivot_boost = 7e-8;

  /// Upper triangle of the symmetric matrix; signs[i] is +1 or -1.
  void analyze(const Eigen::SparseMatrix<double>& upper, const std::vector<int>& signs);
  /// Pattern must match the analyzed one. Returns false on a non-finite pivot.
  bool factorize(const Eigen::SparseMatrix<double>& upper);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  int boosted_pivots() const { return boosted_; }

 private:
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_, perm_inv_;
  std::vector<double> signs_;  // in permuted order
  std::vector<int> etree_, lnz_;
  std::vector<int> lp_, li_;
  std::vector<double> lx_, dinv_;
  int n_ = 0;
  int boosted_ = 0;
};

}  // namespace scvx::detail
