#pragma once

// Second-order-cone encodings of catalog functions inside a ConicBuilder.

#include <vector>

#include "scvx/conic.hpp"
#include "scvx/convex_function.hpp"

namespace scvx {

/// Adds rows (and auxiliary columns where needed) enforcing fn(y) <= bound,
/// where support coordinate k of fn lives in program column columns[k].
/// A pure norm term becomes a single SOC row block; a quadratic term uses a
/// rotated cone (r + 1, sqrt(2) L y, r - 1) with Q = L'L.
void add_sublevel_constraint(ConicBuilder& builder, const ConvexFunction& fn, const std::vector<int>& columns,
                             const AffineExpr& bound);

/// Columns of fn's support when y occupies program columns 0..N_y-1.
std::vector<int> identity_columns(const ConvexFunction& fn);

}  // namespace scvx
