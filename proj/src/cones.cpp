#include "scvx/cones.hpp"

#include <algorithm>
#include <cmath>

namespace scvx::cones {

double soc_residual(const Eigen::Ref<const Eigen::VectorXd>& u) {
  const auto tail = u.tail(u.size() - 1);
  return (u[0] - tail.norm()) * (u[0] + tail.norm());
}

double soc_min_eig(const Eigen::Ref<const Eigen::VectorXd>& u) { return u[0] - u.tail(u.size() - 1).norm(); }

Eigen::VectorXd jordan_product(const Eigen::Ref<const Eigen::VectorXd>& u,
                               const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::VectorXd out(u.size());
  out[0] = u.dot(v);
  out.tail(u.size() - 1) = u[0] * v.tail(v.size() - 1) + v[0] * u.tail(u.size() - 1);
  return out;
}

Eigen::VectorXd jordan_divide(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                              const Eigen::Ref<const Eigen::VectorXd>& xi) {
  const Eigen::Index k = lambda.size() - 1;
  const double rho = soc_residual(lambda);
  Eigen::VectorXd w(lambda.size());
  w[0] = (lambda[0] * xi[0] - lambda.tail(k).dot(xi.tail(k))) / rho;
  w.tail(k) = (xi.tail(k) - w[0] * lambda.tail(k)) / lambda[0];
  return w;
}

double soc_max_step(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& d) {
  const Eigen::Index k = u.size() - 1;
  if (k == 0) return d[0] < 0.0 ? u[0] / -d[0] : kInfiniteStep;
  const double res = soc_residual(u);
  if (!(res > 0.0) || u[0] <= 0.0) return 0.0;
  const double rho = std::sqrt(res);
  const double ub0 = u[0] / rho;
  const Eigen::VectorXd ub1 = u.tail(k) / rho;
  // Map u to the identity with the J-norm-preserving Lorentz transform;
  // the step then reduces to the spectral values of the transformed d.
  const double a = (ub0 * d[0] - ub1.dot(d.tail(k))) / rho;
  const Eigen::VectorXd r1 = d.tail(k) / rho - ((a + d[0] / rho) / (ub0 + 1.0)) * ub1;
  const double decay = r1.norm() - a;
  return decay > 0.0 ? 1.0 / decay : kInfiniteStep;
}

double orthant_max_step(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& d) {
  double alpha = kInfiniteStep;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (d[i] < 0.0) alpha = std::min(alpha, u[i] / -d[i]);
  return alpha;
}

SocScaling SocScaling::identity(int dim) {
  SocScaling s;
  s.eta = 1.0;
  s.w = Eigen::VectorXd::Zero(dim);
  s.w[0] = 1.0;
  return s;
}

bool SocScaling::update(const Eigen::Ref<const Eigen::VectorXd>& s, const Eigen::Ref<const Eigen::VectorXd>& z) {
  const double sres = soc_residual(s);
  const double zres = soc_residual(z);
  if (!(sres > 0.0) || !(zres > 0.0) || s[0] <= 0.0 || z[0] <= 0.0) return false;
  const double snorm = std::sqrt(sres);
  const double znorm = std::sqrt(zres);
  const Eigen::VectorXd sb = s / snorm;
  const Eigen::VectorXd zb = z / znorm;
  const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
  const Eigen::Index k = s.size() - 1;
  w.resize(s.size());
  w[0] = (sb[0] + zb[0]) / (2.0 * gamma);
  w.tail(k) = (sb.tail(k) - zb.tail(k)) / (2.0 * gamma);
  eta = std::sqrt(snorm / znorm);
  return true;
}

Eigen::VectorXd SocScaling::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const Eigen::Index k = v.size() - 1;
  const double w1v1 = w.tail(k).dot(v.tail(k));
  Eigen::VectorXd out(v.size());
  out[0] = eta * (w[0] * v[0] + w1v1);
  out.tail(k) = eta * (v.tail(k) + (v[0] + w1v1 / (1.0 + w[0])) * w.tail(k));
  return out;
}

Eigen::VectorXd SocScaling::apply_inverse(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const Eigen::Index k = v.size() - 1;
  const double w1v1 = w.tail(k).dot(v.tail(k));
  Eigen::VectorXd out(v.size());
  out[0] = (w[0] * v[0] - w1v1) / eta;
  out.tail(k) = (v.tail(k) + (-v[0] + w1v1 / (1.0 + w[0])) * w.tail(k)) / eta;
  return out;
}

Eigen::MatrixXd SocScaling::squared() const {
  const Eigen::Index d = w.size();
  Eigen::MatrixXd W2 = 2.0 * w * w.transpose();
  W2(0, 0) -= 1.0;
  for (Eigen::Index i = 1; i < d; ++i) W2(i, i) += 1.0;
  return eta * eta * W2;
}

}  // namespace scvx::cones
