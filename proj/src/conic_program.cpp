#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "scvx/conic.hpp"
#include "scvx/error.hpp"

namespace scvx {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::primal_infeasible: return "primal-infeasible";
    case SolveStatus::dual_infeasible: return "dual-infeasible";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::numerical_error: return "numerical-error";
  }
  return "unknown";
}

void ConicProgram::validate() const {
  if (A.rows() != b.size() || A.cols() != c.size())
    throw ScvxError(ErrorCode::dimension_mismatch, "A must be rows(b) x len(c)");
  long total = 0;
  for (std::size_t k = 0; k < cones.size(); ++k) {
    if (cones[k].dim < 1) throw ScvxError(ErrorCode::dimension_mismatch, "cone dimension below 1", static_cast<int>(k));
    total += cones[k].dim;
  }
  if (total != b.size()) throw ScvxError(ErrorCode::dimension_mismatch, "cone dimensions do not sum to the row count");
}

Residuals residuals(const ConicProgram& program, const ConicSolution& solution) {
  const Eigen::VectorXd pr = program.A * solution.x + solution.s - program.b;
  const Eigen::VectorXd dr = program.A.transpose() * solution.z + program.c;
  const double pcost = program.c.dot(solution.x);
  const double dgap = pcost + program.b.dot(solution.z);
  return {pr.norm() / (1.0 + program.b.norm()), dr.norm() / (1.0 + program.c.norm()),
          std::fabs(dgap) / (1.0 + std::fabs(pcost))};
}

void write_triplets(const ConicProgram& program, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "conic " << program.num_rows() << ' ' << program.num_vars() << ' ' << program.A.nonZeros() << '\n';
  out << 'c';
  for (Eigen::Index i = 0; i < program.c.size(); ++i) out << ' ' << program.c[i];
  out << "\nb";
  for (Eigen::Index i = 0; i < program.b.size(); ++i) out << ' ' << program.b[i];
  out << "\ncones " << program.cones.size() << '\n';
  for (const auto& cone : program.cones) {
    const char* name = cone.kind == ConeKind::zero ? "zero" : cone.kind == ConeKind::nonneg ? "nonneg" : "soc";
    out << name << ' ' << cone.dim << '\n';
  }
  for (int col = 0; col < program.A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(program.A, col); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  out.flags(flags);
  out.precision(precision);
}

ConicProgram read_triplets(std::istream& in) {
  auto fail = [](const std::string& what) { return ScvxError(ErrorCode::invalid_argument, "triplet file: " + what); };
  std::string tag;
  long rows = 0, cols = 0, nnz = 0;
  if (!(in >> tag >> rows >> cols >> nnz) || tag != "conic" || rows < 0 || cols < 0 || nnz < 0)
    throw fail("bad header");
  ConicProgram p;
  p.c.resize(cols);
  p.b.resize(rows);
  if (!(in >> tag) || tag != "c") throw fail("missing c");
  for (long i = 0; i < cols; ++i)
    if (!(in >> p.c[i])) throw fail("short c");
  if (!(in >> tag) || tag != "b") throw fail("missing b");
  for (long i = 0; i < rows; ++i)
    if (!(in >> p.b[i])) throw fail("short b");
  std::size_t ncones = 0;
  if (!(in >> tag >> ncones) || tag != "cones") throw fail("missing cones");
  for (std::size_t k = 0; k < ncones; ++k) {
    std::string kind;
    int dim = 0;
    if (!(in >> kind >> dim)) throw fail("short cone list");
    if (kind == "zero") p.cones.push_back({ConeKind::zero, dim});
    else if (kind == "nonneg") p.cones.push_back({ConeKind::nonneg, dim});
    else if (kind == "soc") p.cones.push_back({ConeKind::soc, dim});
    else throw fail("unknown cone kind " + kind);
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v)) throw fail("short triplet list");
    if (r < 0 || r >= rows || c < 0 || c >= cols) throw fail("triplet index out of range");
    trips.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  }
  p.A.resize(rows, cols);
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.validate();
  return p;
}

ConicBuilder::ConicBuilder(int num_vars) : cost_(static_cast<std::size_t>(num_vars), 0.0) {}

int ConicBuilder::add_variable(double cost) {
  cost_.push_back(cost);
  return num_vars() - 1;
}

void ConicBuilder::set_cost(int col, double value) { cost_.at(static_cast<std::size_t>(col)) = value; }

void ConicBuilder::add_cost(int col, double value) { cost_.at(static_cast<std::size_t>(col)) += value; }

ConicBuilder::Row ConicBuilder::equality_row_of(const AffineExpr& e) {
  // a'x + c = 0  <=>  a'x + s = -c with s = 0
  return Row{e.terms, -e.constant};
}

ConicBuilder::Row ConicBuilder::cone_row_of(const AffineExpr& e) {
  // s = a'x + c  <=>  (-a)'x + s = c
  Row r{e.terms, e.constant};
  for (auto& [col, v] : r.coeffs) v = -v;
  return r;
}

int ConicBuilder::add_equality(const AffineExpr& expr) {
  zero_rows_.push_back(equality_row_of(expr));
  return num_equalities() - 1;
}

int ConicBuilder::add_nonneg(const AffineExpr& expr) {
  nonneg_rows_.push_back(cone_row_of(expr));
  return num_nonneg() - 1;
}

int ConicBuilder::add_soc(const std::vector<AffineExpr>& exprs) {
  if (exprs.empty()) throw ScvxError(ErrorCode::dimension_mismatch, "empty second-order cone");
  std::vector<Row> rows;
  rows.reserve(exprs.size());
  for (const auto& e : exprs) rows.push_back(cone_row_of(e));
  socs_.push_back(std::move(rows));
  soc_offsets_.push_back(soc_row_count_);
  soc_row_count_ += static_cast<int>(exprs.size());
  return num_soc() - 1;
}

int ConicBuilder::soc_first_row(int ordinal) const {
  return num_equalities() + num_nonneg() + soc_offsets_.at(static_cast<std::size_t>(ordinal));
}

ConicProgram ConicBuilder::build() const {
  ConicProgram p;
  const int rows = num_equalities() + num_nonneg() + soc_row_count_;
  p.c = Eigen::Map<const Eigen::VectorXd>(cost_.data(), static_cast<Eigen::Index>(cost_.size()));
  p.b.resize(rows);
  std::vector<Eigen::Triplet<double>> trips;
  int r = 0;
  auto emit = [&](const Row& row) {
    for (const auto& [col, v] : row.coeffs) {
      if (col < 0 || col >= num_vars())
        throw ScvxError(ErrorCode::dimension_mismatch, "row references an unknown column", col);
      if (v != 0.0) trips.emplace_back(r, col, v);
    }
    p.b[r] = row.rhs;
    ++r;
  };
  for (const auto& row : zero_rows_) emit(row);
  for (const auto& row : nonneg_rows_) emit(row);
  for (const auto& cone : socs_)
    for (const auto& row : cone) emit(row);
  p.A.resize(rows, num_vars());
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.A.makeCompressed();
  if (num_equalities() > 0) p.cones.push_back({ConeKind::zero, num_equalities()});
  if (num_nonneg() > 0) p.cones.push_back({ConeKind::nonneg, num_nonneg()});
  for (const auto& cone : socs_) p.cones.push_back({ConeKind::soc, static_cast<int>(cone.size())});
  return p;
}

}  // namespace scvx
