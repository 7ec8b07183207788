#pragma once

// Standard-form cone program
//
//   minimize c'x  subject to  A x + s = b,  s in K = K_1 x ... x K_p
//
// with each K_i the zero cone, a nonnegative orthant or a second-order cone.
// Rows of A follow the order of `cones`. The dual is
//
//   maximize -b'z  subject to  A'z + c = 0,  z in K*,
//
// so an equality row x1 + x2 = 1 in a minimization of x1 + x2 carries z = -1.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace scvx {

enum class ConeKind { zero, nonneg, soc };

struct Cone {
  ConeKind kind;
  int dim;
};

struct ConicProgram {
  Eigen::VectorXd c;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<Cone> cones;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }
  /// Throws ScvxError(dimension_mismatch) when cone dims do not sum to the row
  /// count, a SOC has dim < 1, or A does not match c and b.
  void validate() const;
};

enum class SolveStatus { optimal, primal_infeasible, dual_infeasible, max_iter, numerical_error };

const char* to_string(SolveStatus status);

/// Primal-dual point in the row order of the program. For infeasible
/// statuses x/s/z hold the unnormalized certificate.
struct ConicSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd z;
  SolveStatus status = SolveStatus::numerical_error;
  double gap = 0.0;  // s'z
  int iterations = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
};

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 100;
  double static_regularization = 1e-8;
  int refinement_steps = 3;
  double step_fraction = 0.99;
};

struct Residuals {
  double primal;  // ||Ax + s - b|| / (1 + ||b||)
  double dual;    // ||A'z + c|| / (1 + ||c||)
  double gap;     // |c'x + b'z| / (1 + |c'x|)
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
/// Mehrotra predictor-corrector steps. Never throws for numerical trouble;
/// the status carries it. Deterministic for identical inputs.
ConicSolution solve(const ConicProgram& program, const SolverSettings& settings = {});

Residuals residuals(const ConicProgram& program, const ConicSolution& solution);

/// Text dump for offline debugging:
///   conic <rows> <cols> <nnz>
///   c <value> ...            (cols values)
///   b <value> ...            (rows values)
///   cones <count> then one "<zero|nonneg|soc> <dim>" per line
///   one "<row> <col> <value>" line per nonzero (0-based, column-major order)
/// Values are printed with 17 significant digits.
void write_triplets(const ConicProgram& program, std::ostream& out);
ConicProgram read_triplets(std::istream& in);

/// Affine expression a'x + constant over program columns.
struct AffineExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  static AffineExpr variable(int col, double coeff = 1.0) { return AffineExpr{{{col, coeff}}, 0.0}; }
  static AffineExpr constant_value(double v) { return AffineExpr{{}, v}; }
  AffineExpr& add(int col, double coeff) {
    terms.emplace_back(col, coeff);
    return *this;
  }
};

/// Incremental construction of a ConicProgram. Rows are emitted in the order
/// zero rows, nonnegative rows, then second-order cones, each group in
/// insertion order.
class ConicBuilder {
 public:
  explicit ConicBuilder(int num_vars = 0);

  int add_variable(double cost = 0.0);
  int num_vars() const { return static_cast<int>(cost_.size()); }
  void set_cost(int col, double value);
  void add_cost(int col, double value);

  /// expr == 0; returns the zero-row ordinal.
  int add_equality(const AffineExpr& expr);
  /// expr >= 0; returns the nonnegative-row ordinal.
  int add_nonneg(const AffineExpr& expr);
  /// (e_0, e_1, ...) in SOC, i.e. e_0 >= ||(e_1, ...)||; returns the cone ordinal.
  int add_soc(const std::vector<AffineExpr>& exprs);

  int num_equalities() const { return static_cast<int>(zero_rows_.size()); }
  int num_nonneg() const { return static_cast<int>(nonneg_rows_.size()); }
  int num_soc() const { return static_cast<int>(socs_.size()); }

  /// Final row indices of the grouped rows.
  int equality_row(int ordinal) const { return ordinal; }
  int nonneg_row(int ordinal) const { return num_equalities() + ordinal; }
  int soc_first_row(int ordinal) const;

  ConicProgram build() const;

 private:
  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // A row
    double rhs;                                  // b entry
  };
  static Row equality_row_of(const AffineExpr& e);
  static Row cone_row_of(const AffineExpr& e);

  std::vector<double> cost_;
  std::vector<Row> zero_rows_;
  std::vector<Row> nonneg_rows_;
  std::vector<std::vector<Row>> socs_;
  std::vector<int> soc_offsets_;
  int soc_row_count_ = 0;
};

}  // namespace scvx
