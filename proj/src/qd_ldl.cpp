#include "qd_ldl.hpp"

#include <Eigen/OrderingMethods>
#include <cmath>

namespace scvx::detail {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat permuted_upper(const SpMat& upper, const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>& perm) {
  SpMat out(upper.rows(), upper.cols());
  out.selfadjointView<Eigen::Upper>() = upper.selfadjointView<Eigen::Upper>().twistedBy(perm);
  out.makeCompressed();
  return out;
}

}  // namespace

void QuasiDefiniteLdl::analyze(const SpMat& upper, const std::vector<int>& signs) {
  n_ = static_cast<int>(upper.rows());
  Eigen::AMDOrdering<int> amd;
  const SpMat full = SpMat(upper.selfadjointView<Eigen::Upper>());
  amd(full, perm_inv_);
  perm_ = perm_inv_.inverse();
  signs_.assign(static_cast<std::size_t>(n_), 1.0);
  for (int i = 0; i < n_; ++i) signs_[static_cast<std::size_t>(perm_.indices()[i])] = signs[static_cast<std::size_t>(i)];

  // Elimination tree and column counts of L.
  const SpMat a = permuted_upper(upper, perm_);
  const int* ap = a.outerIndexPtr();
  const int* ai = a.innerIndexPtr();
  std::vector<int> work(static_cast<std::size_t>(n_), -1);
  etree_.assign(static_cast<std::size_t>(n_), -1);
  lnz_.assign(static_cast<std::size_t>(n_), 0);
  for (int j = 0; j < n_; ++j) {
    work[static_cast<std::size_t>(j)] = j;
    for (int p = ap[j]; p < ap[j + 1]; ++p) {
      int i = ai[p];
      while (i != -1 && i < j && work[static_cast<std::size_t>(i)] != j) {
        if (etree_[static_cast<std::size_t>(i)] == -1) etree_[static_cast<std::size_t>(i)] = j;
        ++lnz_[static_cast<std::size_t>(i)];
        work[static_cast<std::size_t>(i)] = j;
        i = etree_[static_cast<std::size_t>(i)];
      }
    }
  }
  lp_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int i = 0; i < n_; ++i) lp_[static_cast<std::size_t>(i) + 1] = lp_[static_cast<std::size_t>(i)] + lnz_[static_cast<std::size_t>(i)];
  li_.assign(static_cast<std::size_t>(lp_.back()), 0);
  lx_.assign(static_cast<std::size_t>(lp_.back()), 0.0);
  dinv_.assign(static_cast<std::size_t>(n_), 0.0);
}

bool QuasiDefiniteLdl::factorize(const SpMat& upper) {
  const SpMat a = permuted_upper(upper, perm_);
  const int* ap = a.outerIndexPtr();
  const int* ai = a.innerIndexPtr();
  const double* ax = a.valuePtr();
  const auto N = static_cast<std::size_t>(n_);

  std::vector<double> y(N, 0.0);
  std::vector<char> marked(N, 0);
  std::vector<int> next_slot(lp_.begin(), lp_.end() - 1);
  std::vector<int> pattern, stack;
  pattern.reserve(N);
  stack.reserve(N);
  boosted_ = 0;

  for (int k = 0; k < n_; ++k) {
    // Nonzero pattern of row k of L from the elimination tree; values of
    // column k of the upper triangle scattered into y.
    double d = 0.0;
    pattern.clear();
    for (int p = ap[k]; p < ap[k + 1]; ++p) {
      const int i = ai[p];
      if (i == k) {
        d = ax[p];
        continue;
      }
      y[static_cast<std::size_t>(i)] = ax[p];
      stack.clear();
      for (int t = i; t != -1 && t < k && !marked[static_cast<std::size_t>(t)]; t = etree_[static_cast<std::size_t>(t)]) {
        marked[static_cast<std::size_t>(t)] = 1;
        stack.push_back(t);
      }
      while (!stack.empty()) {
        pattern.push_back(stack.back());
        stack.pop_back();
      }
    }
    // Sparse triangular solve in topological order.
    for (auto it = pattern.rbegin(); it != pattern.rend(); ++it) {
      const auto c = static_cast<std::size_t>(*it);
      const double yc = y[c];
      const int end = next_slot[c];
      for (int q = lp_[c]; q < end; ++q) y[static_cast<std::size_t>(li_[static_cast<std::size_t>(q)])] -= lx_[static_cast<std::size_t>(q)] * yc;
      const double l = yc * dinv_[c];
      li_[static_cast<std::size_t>(end)] = k;
      lx_[static_cast<std::size_t>(end)] = l;
      d -= yc * l;
      ++next_slot[c];
      y[c] = 0.0;
      marked[c] = 0;
    }
    const double sign = signs_[static_cast<std::size_t>(k)];
    if (!std::isfinite(d)) return false;
    if (sign * d < pivot_floor) {
      d = sign * pivot_boost;
      ++boosted_;
    }
    dinv_[static_cast<std::size_t>(k)] = 1.0 / d;
  }
  return true;
}

Eigen::VectorXd QuasiDefiniteLdl::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = perm_ * rhs;
  for (int i = 0; i < n_; ++i)
    for (int q = lp_[static_cast<std::size_t>(i)]; q < lp_[static_cast<std::size_t>(i) + 1]; ++q)
      x[li_[static_cast<std::size_t>(q)]] -= lx_[static_cast<std::size_t>(q)] * x[i];
  for (int i = 0; i < n_; ++i) x[i] *= dinv_[static_cast<std::size_t>(i)];
  for (int i = n_ - 1; i >= 0; --i)
    for (int q = lp_[static_cast<std::size_t>(i)]; q < lp_[static_cast<std::size_t>(i) + 1]; ++q)
      x[i] -= lx_[static_cast<std::size_t>(q)] * x[li_[static_cast<std::size_t>(q)]];
  return perm_inv_ * x;
}

}  // namespace scvx::detail
