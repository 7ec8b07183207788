// Interior-point method for ConicProgram on the homogeneous self-dual
// embedding
//
//   A_e'y + G'z + c tau = 0,   A_e x - b_e tau = 0,   G x + s - h tau = 0,
//   kappa + c'x + b_e'y + h'z = 0,   (s, z) in K x K*,  tau, kappa >= 0,
//
// where the zero-cone rows of the program form (A_e, b_e) and the remaining
// rows form (G, h). Each iteration takes one Nesterov-Todd scaled Mehrotra
// predictor-corrector step; both directions come from the same LDL'
// factorization of the regularized quasi-definite KKT matrix
//
//   [ dI   A_e'   G'       ]
//   [ A_e  -dI    0        ]
//   [ G    0      -W'W - dI ].

#include <algorithm>
#include <cmath>
#include <limits>

#include "scvx/cones.hpp"
#include "scvx/conic.hpp"
#include "scvx/kernels.hpp"
#include "qd_ldl.hpp"

namespace scvx {

namespace {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

std::span<const double> cs(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> ms(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double vdot(const Vec& a, const Vec& b) { return kernels::dot(cs(a), cs(b)); }
double vnorm(const Vec& a) { return kernels::norm2(cs(a)); }
// y += alpha x
void vaxpy(double alpha, const Vec& x, Vec& y) { kernels::axpy(alpha, cs(x), ms(y)); }

struct ConeBlock {
  ConeKind kind;  // nonneg or soc
  int offset;     // within the cone rows
  int dim;
};

class HsdeSolver {
 public:
  HsdeSolver(const ConicProgram& program, const SolverSettings& settings) : settings_(settings) {
    program.validate();
    n_ = program.num_vars();
    c_ = program.c;
    split_rows(program);
    bnorm_ = std::sqrt(kernels::sum_squares(cs(beq_)) + kernels::sum_squares(cs(h_)));
    cnorm_ = vnorm(c_);
  }

  ConicSolution run() {
    soc_scale_.resize(blocks_.size());
    nn_scale_ = Vec::Ones(m_);
    for (std::size_t k = 0; k < blocks_.size(); ++k)
      if (blocks_[k].kind == ConeKind::soc) soc_scale_[k] = cones::SocScaling::identity(blocks_[k].dim);
    build_kkt_pattern();
    update_kkt_values();
    if (!factor()) return finish(SolveStatus::numerical_error, 0);
    initialize();

    const int degree = degree_;
    for (int iter = 0;; ++iter) {
      // Residuals of the embedding.
      Vec rx = c_ * tau_;
      rx += Aeq_.transpose() * y_ + G_.transpose() * z_;
      Vec ry = Aeq_ * x_ - beq_ * tau_;
      Vec rz = s_ + G_ * x_ - h_ * tau_;
      const double cx = vdot(c_, x_);
      const double by = vdot(beq_, y_) + vdot(h_, z_);
      const double rtau = kappa_ + cx + by;

      const double pres = std::sqrt(kernels::sum_squares(cs(ry)) + kernels::sum_squares(cs(rz))) / tau_ / (1.0 + bnorm_);
      const double dres = vnorm(rx) / tau_ / (1.0 + cnorm_);
      const double pcost = cx / tau_;
      const double relgap = std::fabs((cx + by) / tau_) / (1.0 + std::fabs(pcost));
      if (pres <= settings_.tol && dres <= settings_.tol && relgap <= settings_.tol)
        return finish(SolveStatus::optimal, iter);
      if (kappa_ > tau_) {
        if (by < 0.0) {
          const Vec aty = Aeq_.transpose() * y_ + G_.transpose() * z_;
          if (vnorm(aty) <= settings_.tol * -by) return finish(SolveStatus::primal_infeasible, iter);
        }
        if (cx < 0.0) {
          const Vec ax = Aeq_ * x_;
          const Vec gxs = G_ * x_ + s_;
          if (std::max(vnorm(ax), vnorm(gxs)) <= settings_.tol * -cx)
            return finish(SolveStatus::dual_infeasible, iter);
        }
      }
      if (iter >= settings_.max_iter) return finish(SolveStatus::max_iter, iter);

      if (!update_scaling()) return finish(SolveStatus::numerical_error, iter);
      update_kkt_values();
      if (!factor()) return finish(SolveStatus::numerical_error, iter);

      // Direction associated with tau.
      Vec rhs1(n_ + p_ + m_);
      rhs1 << -c_, beq_, h_;
      const Vec d1 = solve_kkt(rhs1);
      const Vec x1 = d1.head(n_), y1 = d1.segment(n_, p_), z1 = d1.tail(m_);
      const double denom = vdot(c_, x1) + vdot(beq_, y1) + vdot(h_, z1) - kappa_ / tau_;

      // Predictor (affine scaling) direction.
      Vec rhs2(n_ + p_ + m_);
      rhs2 << -rx, -ry, -rz + s_;
      Vec d2 = solve_kkt(rhs2);
      const double dtau_a =
          (-rtau + kappa_ - vdot(c_, Vec(d2.head(n_))) - vdot(beq_, Vec(d2.segment(n_, p_))) - vdot(h_, Vec(d2.tail(m_)))) /
          denom;
      Vec dz_a = d2.tail(m_);
      vaxpy(dtau_a, z1, dz_a);
      const Vec zt_a = apply_w(dz_a);
      const Vec st_a = -lambda_ - zt_a;
      const double dkap_a = -kappa_ - kappa_ * dtau_a / tau_;
      double alpha_a = std::min({1.0, max_step(lambda_, st_a), max_step(lambda_, zt_a)});
      if (dtau_a < 0.0) alpha_a = std::min(alpha_a, -tau_ / dtau_a);
      if (dkap_a < 0.0) alpha_a = std::min(alpha_a, -kappa_ / dkap_a);

      const double mu = (vdot(s_, z_) + tau_ * kappa_) / (degree + 1);
      const double sigma = std::clamp(std::pow(1.0 - alpha_a, 3), 0.0, 1.0);

      // Corrector (combined) direction.
      Vec xi = -jordan_product(lambda_, lambda_) - jordan_product(st_a, zt_a);
      add_identity(xi, sigma * mu);
      const double xitau = -kappa_ * tau_ - dkap_a * dtau_a + sigma * mu;
      const Vec lam_div = jordan_divide(lambda_, xi);
      const double keep = 1.0 - sigma;
      rhs2 << -keep * rx, -keep * ry, -keep * rz - apply_w(lam_div);
      d2 = solve_kkt(rhs2);
      const double dtau =
          (-keep * rtau - xitau / tau_ - vdot(c_, Vec(d2.head(n_))) - vdot(beq_, Vec(d2.segment(n_, p_))) -
           vdot(h_, Vec(d2.tail(m_)))) /
          denom;
      Vec dx = d2.head(n_), dy = d2.segment(n_, p_), dz = d2.tail(m_);
      vaxpy(dtau, x1, dx);
      vaxpy(dtau, y1, dy);
      vaxpy(dtau, z1, dz);
      const Vec zt = apply_w(dz);
      const Vec st = lam_div - zt;
      const Vec ds = apply_w(st);
      const double dkap = (xitau - kappa_ * dtau) / tau_;

      // The scaled and unscaled step bounds agree in exact arithmetic; taking
      // both keeps s and z interior under rounding when W is ill-conditioned.
      double alpha = std::min({max_step(lambda_, st), max_step(lambda_, zt), max_step(s_, ds), max_step(z_, dz)});
      if (dtau < 0.0) alpha = std::min(alpha, -tau_ / dtau);
      if (dkap < 0.0) alpha = std::min(alpha, -kappa_ / dkap);
      alpha = std::min(1.0, settings_.step_fraction * alpha);
      if (!(alpha > 1e-13)) return finish(SolveStatus::numerical_error, iter);

      vaxpy(alpha, dx, x_);
      vaxpy(alpha, dy, y_);
      vaxpy(alpha, dz, z_);
      vaxpy(alpha, ds, s_);
      tau_ += alpha * dtau;
      kappa_ += alpha * dkap;
      if (!(tau_ > 0.0) || !(kappa_ > 0.0) || !x_.allFinite() || !z_.allFinite())
        return finish(SolveStatus::numerical_error, iter + 1);
    }
  }

 private:
  void split_rows(const ConicProgram& program) {
    std::vector<int> eq_rows, g_rows;
    int row = 0;
    for (const auto& cone : program.cones) {
      if (cone.kind == ConeKind::zero) {
        for (int k = 0; k < cone.dim; ++k) eq_rows.push_back(row + k);
      } else {
        const int off = static_cast<int>(g_rows.size());
        if (cone.kind == ConeKind::nonneg) {
          blocks_.push_back({ConeKind::nonneg, off, cone.dim});
          degree_ += cone.dim;
        } else {
          blocks_.push_back({ConeKind::soc, off, cone.dim});
          degree_ += 1;
        }
        for (int k = 0; k < cone.dim; ++k) g_rows.push_back(row + k);
      }
      row += cone.dim;
    }
    p_ = static_cast<int>(eq_rows.size());
    m_ = static_cast<int>(g_rows.size());
    eq_rows_ = eq_rows;
    g_rows_ = g_rows;

    std::vector<int> row_pos(static_cast<std::size_t>(program.num_rows()));
    std::vector<char> is_eq(static_cast<std::size_t>(program.num_rows()), 0);
    for (int k = 0; k < p_; ++k) {
      row_pos[static_cast<std::size_t>(eq_rows[static_cast<std::size_t>(k)])] = k;
      is_eq[static_cast<std::size_t>(eq_rows[static_cast<std::size_t>(k)])] = 1;
    }
    for (int k = 0; k < m_; ++k) row_pos[static_cast<std::size_t>(g_rows[static_cast<std::size_t>(k)])] = k;
    std::vector<Eigen::Triplet<double>> teq, tg;
    for (int col = 0; col < program.A.outerSize(); ++col)
      for (SpMat::InnerIterator it(program.A, col); it; ++it) {
        const auto r = static_cast<std::size_t>(it.row());
        (is_eq[r] ? teq : tg).emplace_back(row_pos[r], it.col(), it.value());
      }
    Aeq_.resize(p_, n_);
    Aeq_.setFromTriplets(teq.begin(), teq.end());
    G_.resize(m_, n_);
    G_.setFromTriplets(tg.begin(), tg.end());
    beq_.resize(p_);
    h_.resize(m_);
    for (int k = 0; k < p_; ++k) beq_[k] = program.b[eq_rows[static_cast<std::size_t>(k)]];
    for (int k = 0; k < m_; ++k) h_[k] = program.b[g_rows[static_cast<std::size_t>(k)]];
  }

  // --- cone-wise helpers over the G rows --------------------------------

  template <class Fn>
  void for_blocks(Fn&& fn) const {
    for (std::size_t k = 0; k < blocks_.size(); ++k) fn(k, blocks_[k]);
  }

  Vec apply_w(const Vec& v) const {
    Vec out(m_);
    for_blocks([&](std::size_t k, const ConeBlock& b) {
      if (b.kind == ConeKind::nonneg)
        out.segment(b.offset, b.dim) = nn_scale_.segment(b.offset, b.dim).cwiseProduct(v.segment(b.offset, b.dim));
      else
        out.segment(b.offset, b.dim) = soc_scale_[k].apply(v.segment(b.offset, b.dim));
    });
    return out;
  }

  Vec apply_w2(const Vec& v) const { return apply_w(apply_w(v)); }

  Vec jordan_product(const Vec& u, const Vec& v) const {
    Vec out(m_);
    for_blocks([&](std::size_t, const ConeBlock& b) {
      if (b.kind == ConeKind::nonneg)
        out.segment(b.offset, b.dim) = u.segment(b.offset, b.dim).cwiseProduct(v.segment(b.offset, b.dim));
      else
        out.segment(b.offset, b.dim) = cones::jordan_product(u.segment(b.offset, b.dim), v.segment(b.offset, b.dim));
    });
    return out;
  }

  Vec jordan_divide(const Vec& lam, const Vec& xi) const {
    Vec out(m_);
    for_blocks([&](std::size_t, const ConeBlock& b) {
      if (b.kind == ConeKind::nonneg)
        out.segment(b.offset, b.dim) = xi.segment(b.offset, b.dim).cwiseQuotient(lam.segment(b.offset, b.dim));
      else
        out.segment(b.offset, b.dim) = cones::jordan_divide(lam.segment(b.offset, b.dim), xi.segment(b.offset, b.dim));
    });
    return out;
  }

  void add_identity(Vec& v, double scale) const {
    for_blocks([&](std::size_t, const ConeBlock& b) {
      if (b.kind == ConeKind::nonneg) v.segment(b.offset, b.dim).array() += scale;
      else v[b.offset] += scale;
    });
  }

  double max_step(const Vec& u, const Vec& d) const {
    double alpha = cones::kInfiniteStep;
    for_blocks([&](std::size_t, const ConeBlock& b) {
      const double a = b.kind == ConeKind::nonneg
                           ? cones::orthant_max_step(u.segment(b.offset, b.dim), d.segment(b.offset, b.dim))
                           : cones::soc_max_step(u.segment(b.offset, b.dim), d.segment(b.offset, b.dim));
      alpha = std::min(alpha, a);
    });
    return alpha;
  }

  double min_eig(const Vec& u) const {
    double e = std::numeric_limits<double>::infinity();
    for_blocks([&](std::size_t, const ConeBlock& b) {
      e = std::min(e, b.kind == ConeKind::nonneg ? u.segment(b.offset, b.dim).minCoeff()
                                                 : cones::soc_min_eig(u.segment(b.offset, b.dim)));
    });
    return e;
  }

  void shift_into_cone(Vec& u) const {
    if (m_ == 0) return;
    // Points within rounding of the boundary count as outside; otherwise the
    // scaling starts out singular.
    const double alpha = -min_eig(u);
    if (alpha >= -1e-8 * std::max(1.0, kernels::max_abs(cs(u)))) add_identity(u, 1.0 + alpha);
  }

  bool update_scaling() {
    bool ok = true;
    lambda_.resize(m_);
    for_blocks([&](std::size_t k, const ConeBlock& b) {
      if (!ok) return;
      if (b.kind == ConeKind::nonneg) {
        for (int i = b.offset; i < b.offset + b.dim; ++i) {
          if (!(s_[i] > 0.0) || !(z_[i] > 0.0)) {
            ok = false;
            return;
          }
          nn_scale_[i] = std::sqrt(s_[i] / z_[i]);
          lambda_[i] = std::sqrt(s_[i] * z_[i]);
        }
      } else {
        if (!soc_scale_[k].update(s_.segment(b.offset, b.dim), z_.segment(b.offset, b.dim))) {
          ok = false;
          return;
        }
        lambda_.segment(b.offset, b.dim) = soc_scale_[k].apply(z_.segment(b.offset, b.dim));
      }
    });
    return ok;
  }

  // --- KKT system --------------------------------------------------------

  void build_kkt_pattern() {
    const int N = n_ + p_ + m_;
    const double d = settings_.static_regularization;
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < n_; ++j) t.emplace_back(j, j, d);
    for (int col = 0; col < Aeq_.outerSize(); ++col)
      for (SpMat::InnerIterator it(Aeq_, col); it; ++it) t.emplace_back(it.col(), n_ + it.row(), it.value());
    for (int i = 0; i < p_; ++i) t.emplace_back(n_ + i, n_ + i, -d);
    for (int col = 0; col < G_.outerSize(); ++col)
      for (SpMat::InnerIterator it(G_, col); it; ++it) t.emplace_back(it.col(), n_ + p_ + it.row(), it.value());
    const int zoff = n_ + p_;
    for (const auto& b : blocks_) {
      if (b.kind == ConeKind::nonneg) {
        for (int i = b.offset; i < b.offset + b.dim; ++i) t.emplace_back(zoff + i, zoff + i, 0.0);
      } else {
        for (int cb = 0; cb < b.dim; ++cb)
          for (int ra = 0; ra <= cb; ++ra) t.emplace_back(zoff + b.offset + ra, zoff + b.offset + cb, 0.0);
      }
    }
    K_.resize(N, N);
    K_.setFromTriplets(t.begin(), t.end());
    K_.makeCompressed();

    auto locate = [&](int row, int col) {
      const int* inner = K_.innerIndexPtr();
      const int* outer = K_.outerIndexPtr();
      for (int k = outer[col]; k < outer[col + 1]; ++k)
        if (inner[k] == row) return k;
      return -1;
    };
    zvalue_index_.clear();
    for (const auto& b : blocks_) {
      if (b.kind == ConeKind::nonneg) {
        for (int i = b.offset; i < b.offset + b.dim; ++i) zvalue_index_.push_back(locate(zoff + i, zoff + i));
      } else {
        for (int cb = 0; cb < b.dim; ++cb)
          for (int ra = 0; ra <= cb; ++ra)
            zvalue_index_.push_back(locate(zoff + b.offset + ra, zoff + b.offset + cb));
      }
    }
    std::vector<int> signs(static_cast<std::size_t>(N), -1);
    std::fill(signs.begin(), signs.begin() + n_, 1);
    ldl_.analyze(K_, signs);
  }

  void update_kkt_values() {
    const double d = settings_.static_regularization;
    double* values = K_.valuePtr();
    std::size_t pos = 0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      if (b.kind == ConeKind::nonneg) {
        for (int i = b.offset; i < b.offset + b.dim; ++i)
          values[zvalue_index_[pos++]] = -nn_scale_[i] * nn_scale_[i] - d;
      } else {
        const Eigen::MatrixXd W2 = soc_scale_[k].squared();
        for (int cb = 0; cb < b.dim; ++cb)
          for (int ra = 0; ra <= cb; ++ra) values[zvalue_index_[pos++]] = -W2(ra, cb) - (ra == cb ? d : 0.0);
      }
    }
  }

  bool factor() { return ldl_.factorize(K_); }

  // Unregularized KKT product used for iterative refinement.
  Vec kkt_multiply(const Vec& v) const {
    const Vec vx = v.head(n_), vy = v.segment(n_, p_), vz = v.tail(m_);
    Vec out(n_ + p_ + m_);
    out.head(n_) = Aeq_.transpose() * vy + G_.transpose() * vz;
    out.segment(n_, p_) = Aeq_ * vx;
    out.tail(m_) = G_ * vx - apply_w2(vz);
    return out;
  }

  Vec solve_kkt(const Vec& rhs) {
    Vec sol = ldl_.solve(rhs);
    const double scale = 1.0 + kernels::max_abs(cs(rhs));
    for (int k = 0; k < settings_.refinement_steps; ++k) {
      const Vec err = rhs - kkt_multiply(sol);
      if (kernels::max_abs(cs(err)) <= 1e-14 * scale) break;
      sol += ldl_.solve(err);
    }
    return sol;
  }

  void initialize() {
    Vec rhs(n_ + p_ + m_);
    rhs << Vec::Zero(n_), beq_, h_;
    Vec sol = solve_kkt(rhs);
    x_ = sol.head(n_);
    s_ = -sol.tail(m_);
    rhs << -c_, Vec::Zero(p_), Vec::Zero(m_);
    sol = solve_kkt(rhs);
    y_ = sol.segment(n_, p_);
    z_ = sol.tail(m_);
    shift_into_cone(s_);
    shift_into_cone(z_);
    tau_ = 1.0;
    kappa_ = 1.0;
  }

  ConicSolution finish(SolveStatus status, int iterations) const {
    ConicSolution out;
    out.status = status;
    out.iterations = iterations;
    const int rows = p_ + m_;
    out.x = Vec::Zero(n_);
    out.s = Vec::Zero(rows);
    out.z = Vec::Zero(rows);
    if (x_.size() != n_) return out;
    const bool certificate = status == SolveStatus::primal_infeasible || status == SolveStatus::dual_infeasible;
    const double scale = certificate ? 1.0 : 1.0 / tau_;
    out.x = x_ * scale;
    for (int k = 0; k < p_; ++k) out.z[eq_rows_[static_cast<std::size_t>(k)]] = y_[k] * scale;
    for (int k = 0; k < m_; ++k) {
      out.s[g_rows_[static_cast<std::size_t>(k)]] = s_[k] * scale;
      out.z[g_rows_[static_cast<std::size_t>(k)]] = z_[k] * scale;
    }
    out.gap = vdot(s_, z_) * scale * scale;
    out.primal_objective = vdot(c_, x_) * scale;
    out.dual_objective = -(vdot(beq_, y_) + vdot(h_, z_)) * scale;
    return out;
  }

  SolverSettings settings_;
  int n_ = 0, p_ = 0, m_ = 0, degree_ = 0;
  SpMat Aeq_, G_;
  Vec c_, beq_, h_;
  double bnorm_ = 0.0, cnorm_ = 0.0;
  std::vector<ConeBlock> blocks_;
  std::vector<int> eq_rows_, g_rows_;

  Vec x_, y_, z_, s_;
  double tau_ = 1.0, kappa_ = 1.0;
  Vec nn_scale_;
  std::vector<cones::SocScaling> soc_scale_;
  Vec lambda_;

  SpMat K_;
  std::vector<int> zvalue_index_;
  detail::QuasiDefiniteLdl ldl_;
};

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverSettings& settings) {
  HsdeSolver solver(program, settings);
  return solver.run();
}

}  // namespace scvx
