#include "scvx/epigraph.hpp"

#include <cmath>

#include "scvx/error.hpp"

namespace scvx {

namespace {

// sum_k coeffs[k] * y[columns[k]] added into expr with a scale.
void add_linear(AffineExpr& expr, const Eigen::VectorXd& coeffs, const std::vector<int>& columns, double scale) {
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] != 0.0) expr.add(columns[static_cast<std::size_t>(k)], scale * coeffs[k]);
}

// Rows L with Q = L'L, dropping null directions.
Eigen::MatrixXd square_root_rows(const Eigen::MatrixXd& Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  const Eigen::VectorXd& d = eig.eigenvalues();
  const double floor = 1e-14 * std::max(1.0, d.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] > floor) keep.push_back(i);
  Eigen::MatrixXd L(static_cast<Eigen::Index>(keep.size()), Q.cols());
  for (std::size_t r = 0; r < keep.size(); ++r)
    L.row(static_cast<Eigen::Index>(r)) = std::sqrt(d[keep[r]]) * eig.eigenvectors().col(keep[r]).transpose();
  return L;
}

}  // namespace

std::vector<int> identity_columns(const ConvexFunction& fn) { return fn.support; }

void add_sublevel_constraint(ConicBuilder& builder, const ConvexFunction& fn, const std::vector<int>& columns,
                             const AffineExpr& bound) {
  if (columns.size() != fn.support.size())
    throw ScvxError(ErrorCode::dimension_mismatch, "column map must match the function support");

  // slack = bound - a'y - c
  AffineExpr slack = bound;
  slack.constant -= fn.constant;
  if (fn.linear.size() > 0) add_linear(slack, fn.linear, columns, -1.0);

  if (fn.is_affine()) {
    builder.add_nonneg(slack);
    return;
  }

  auto norm_rows = [&](double scale) {
    std::vector<AffineExpr> rows;
    for (Eigen::Index r = 0; r < fn.norm_map.rows(); ++r) {
      AffineExpr e;
      e.constant = -scale * fn.norm_center[r];
      add_linear(e, fn.norm_map.row(r).transpose(), columns, scale);
      rows.push_back(std::move(e));
    }
    return rows;
  };

  if (!fn.has_quadratic()) {
    // w ||H y - p|| <= slack
    std::vector<AffineExpr> cone{slack};
    for (auto& e : norm_rows(fn.norm_weight)) cone.push_back(std::move(e));
    builder.add_soc(cone);
    return;
  }

  if (fn.has_norm()) {
    const int v = builder.add_variable();
    std::vector<AffineExpr> cone{AffineExpr::variable(v)};
    for (auto& e : norm_rows(1.0)) cone.push_back(std::move(e));
    builder.add_soc(cone);
    slack.add(v, -fn.norm_weight);
  }

  // 1/2 y'Qy <= r
  const int r = builder.add_variable();
  const Eigen::MatrixXd L = square_root_rows(fn.quadratic);
  std::vector<AffineExpr> rotated;
  AffineExpr head = AffineExpr::variable(r);
  head.constant = 1.0;
  rotated.push_back(head);
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    AffineExpr e;
    add_linear(e, L.row(i).transpose(), columns, std::sqrt(2.0));
    rotated.push_back(std::move(e));
  }
  AffineExpr tail = AffineExpr::variable(r);
  tail.constant = -1.0;
  rotated.push_back(tail);
  builder.add_soc(rotated);
  slack.add(r, -1.0);
  builder.add_nonneg(slack);
}

}  // namespace scvx
