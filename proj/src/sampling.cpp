// Hit-and-run sampling of F_z for the containment check of
// verify_invariance. Chords are computed exactly from the cone description
// of F_z, so every sample lies in F_z up to rounding.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scvx/cones.hpp"
#include "scvx/error.hpp"
#include "scvx/kernels.hpp"
#include "scvx/linearizer.hpp"
#include "scvx/subproblem.hpp"

namespace scvx {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct ConeSlices {
  std::vector<Cone> cones;  // inequality cones only, in row order
  int first_row = 0;        // first inequality row
};

// Largest step along d keeping s inside the inequality cones.
double chord_limit(const ConeSlices& slices, const Eigen::VectorXd& s, const Eigen::VectorXd& d) {
  double alpha = cones::kInfiniteStep;
  int off = 0;
  for (const auto& c : slices.cones) {
    const double a = c.kind == ConeKind::nonneg ? cones::orthant_max_step(s.segment(off, c.dim), d.segment(off, c.dim))
                                                : cones::soc_max_step(s.segment(off, c.dim), d.segment(off, c.dim));
    alpha = std::min(alpha, a);
    off += c.dim;
  }
  return alpha;
}

// Maximizes the common margin m <= 1 by which every inequality cone holds,
// i.e. s - m e in K. Returns the point and the margin.
std::pair<Eigen::VectorXd, double> interior_point(const ConicProgram& region, int ny) {
  const int rows = region.num_rows();
  const int m_col = region.num_vars();
  std::vector<Eigen::Triplet<double>> trips;
  for (int col = 0; col < region.A.outerSize(); ++col)
    for (SpMat::InnerIterator it(region.A, col); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  int row = 0;
  for (const auto& c : region.cones) {
    if (c.kind == ConeKind::nonneg)
      for (int k = 0; k < c.dim; ++k) trips.emplace_back(row + k, m_col, 1.0);
    else if (c.kind == ConeKind::soc)
      trips.emplace_back(row, m_col, 1.0);
    row += c.dim;
  }
  ConicProgram p;
  p.c = Eigen::VectorXd::Zero(m_col + 1);
  p.c[m_col] = -1.0;
  p.b.resize(rows + 1);
  p.b.head(rows) = region.b;
  p.b[rows] = 1.0;
  trips.emplace_back(rows, m_col, 1.0);
  p.A.resize(rows + 1, m_col + 1);
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.cones = region.cones;
  p.cones.push_back({ConeKind::nonneg, 1});
  const ConicSolution sol = solve(p);
  if (sol.status != SolveStatus::optimal) return {Eigen::VectorXd::Zero(ny), -std::numeric_limits<double>::infinity()};
  return {sol.x.head(ny), sol.x[m_col]};
}

}  // namespace

InvarianceReport verify_invariance(const OptimalControlProblem& problem, const FeasibleRegion& region,
                                   const PenaltyConfig& penalty, int n_samples, std::uint64_t seed) {
  InvarianceReport report;
  report.anchor_slack = min_halfspace_slack(region, region.anchor);
  report.anchor_inside = !(report.anchor_slack < -1e-9);
  report.worst_margin = std::numeric_limits<double>::infinity();

  AssembleOptions opts;
  opts.include_objective = false;
  const SubproblemArtifacts art = assemble(problem, penalty, region, opts);
  const ConicProgram& prog = art.program;
  const int ny = art.num_y;

  auto [y, margin] = interior_point(prog, ny);
  report.interior_margin = margin;
  if (!(margin > 1e-9) || n_samples <= 0) return report;

  // Split rows into the equality block and the inequality cones.
  int p = 0;
  ConeSlices slices;
  for (const auto& c : prog.cones) {
    if (c.kind == ConeKind::zero) p += c.dim;
    else slices.cones.push_back(c);
  }
  slices.first_row = p;
  const Eigen::MatrixXd A = Eigen::MatrixXd(prog.A);
  const Eigen::MatrixXd G = A.bottomRows(prog.num_rows() - p);
  const Eigen::VectorXd h = prog.b.tail(prog.num_rows() - p);

  // Orthonormal basis of the equality nullspace.
  Eigen::MatrixXd basis;
  if (p > 0) {
    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(A.topRows(p)).kernel();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    basis = qr.householderQ() * Eigen::MatrixXd::Identity(ny, kernel.cols());
  } else {
    basis = Eigen::MatrixXd::Identity(ny, ny);
  }
  const int dim = static_cast<int>(basis.cols());
  if (dim == 0) return report;
  const Eigen::MatrixXd Gb = G * basis;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int thin = 3;
  const double shrink = 1.0 - 1e-9;
  Eigen::VectorXd s = h - G * y;
  Eigen::VectorXd w(dim);
  const auto& cons = problem.constraints();

  for (int sample = 0; sample < n_samples; ++sample) {
    for (int step = 0; step < thin; ++step) {
      for (int k = 0; k < dim; ++k) w[k] = gauss(rng);
      w /= kernels::norm2({w.data(), static_cast<std::size_t>(dim)});
      const Eigen::VectorXd gd = Gb * w;  // slack moves by -alpha * gd
      const double fwd = std::max(0.0, chord_limit(slices, s, -gd));
      const double back = std::max(0.0, chord_limit(slices, s, gd));
      if (!std::isfinite(fwd) || !std::isfinite(back))
        throw ScvxError(ErrorCode::invalid_argument, "feasible region is unbounded along a sampled direction");
      const double alpha = shrink * (-back + (fwd + back) * unit(rng));
      y.noalias() += alpha * (basis * w);
      s.noalias() -= alpha * gd;
    }
    s = h - G * y;  // limit drift
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : cons) worst = std::min(worst, c.eval({y.data(), static_cast<std::size_t>(ny)}));
    if (cons.empty()) worst = 0.0;
    report.worst_margin = std::min(report.worst_margin, worst);
    if (worst < -1e-8) ++report.violations;
    ++report.samples;
  }
  return report;
}

}  // namespace scvx
