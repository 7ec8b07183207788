#pragma once

// Random cone programs that are feasible and bounded by construction: pick a
// primal point x*, a complementary pair (s*, z*) in K x K*, then set
// b = A x* + s* and c = -A'z*. The pair certifies optimality of x*.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <random>
#include <vector>

#include "scvx/conic.hpp"

namespace scvx::testing {

struct RandomSocp {
  ConicProgram program;
  Eigen::VectorXd x_star;
  Eigen::VectorXd s_star;
  Eigen::VectorXd z_star;
  double optimal_value;
};

inline RandomSocp random_socp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nvar(2, 12);
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_int_distribution<int> socdim(2, 5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int n = nvar(rng);
  std::vector<Cone> cones;
  const int zeros = std::min(count(rng), n - 1);
  if (zeros > 0) cones.push_back({ConeKind::zero, zeros});
  const int nonneg = count(rng) + 1;
  cones.push_back({ConeKind::nonneg, nonneg});
  const int socs = count(rng);
  for (int k = 0; k < socs; ++k) cones.push_back({ConeKind::soc, socdim(rng)});
  int rows = 0;
  for (const auto& c : cones) rows += c.dim;

  Eigen::MatrixXd A(rows, n);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = unit(rng) < 0.6 ? gauss(rng) : 0.0;
  Eigen::VectorXd x(n), s = Eigen::VectorXd::Zero(rows), z = Eigen::VectorXd::Zero(rows);
  for (int j = 0; j < n; ++j) x[j] = gauss(rng);

  int r = 0;
  for (const auto& cone : cones) {
    if (cone.kind == ConeKind::zero) {
      for (int k = 0; k < cone.dim; ++k) z[r + k] = gauss(rng);
    } else if (cone.kind == ConeKind::nonneg) {
      for (int k = 0; k < cone.dim; ++k) {
        if (unit(rng) < 0.5) s[r + k] = unit(rng) + 0.1;
        else z[r + k] = unit(rng) + 0.1;
      }
    } else {
      Eigen::VectorXd u(cone.dim - 1);
      for (int k = 0; k < u.size(); ++k) u[k] = gauss(rng);
      u.normalize();
      const double pick = unit(rng);
      const double a = unit(rng) + 0.1, b = unit(rng) + 0.1;
      if (pick < 0.5) {
        // Both on the boundary, on opposite rays.
        s[r] = a;
        s.segment(r + 1, cone.dim - 1) = a * u;
        z[r] = b;
        z.segment(r + 1, cone.dim - 1) = -b * u;
      } else if (pick < 0.75) {
        s[r] = a + 1.0;
        s.segment(r + 1, cone.dim - 1) = a * u;
      } else {
        z[r] = b + 1.0;
        z.segment(r + 1, cone.dim - 1) = b * u;
      }
    }
    r += cone.dim;
  }

  RandomSocp out;
  out.program.A = A.sparseView();
  out.program.b = A * x + s;
  out.program.c = -A.transpose() * z;
  out.program.cones = cones;
  out.x_star = x;
  out.s_star = s;
  out.z_star = z;
  out.optimal_value = out.program.c.dot(x);
  return out;
}

}  // namespace scvx::testing
