#pragma once

// Linear and semidefinite conic problems behind one interface.
//
// A problem is built from scalar variables (free or nonnegative) and
// symmetric matrix blocks constrained to the PSD cone. Rows are affine
// (in)equalities over both kinds of variables. An LP is simply a problem
// with no matrix blocks.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infomenu::conic {

enum class Sense { minimize, maximize };
enum class Domain { free, nonnegative };
enum class Relation { less_equal, greater_equal, equal };
enum class Status { optimal, infeasible, unbounded, numerical_failure };

std::string_view to_string(Status status);
std::string_view to_string(Relation relation);

struct ScalarVar {
  std::size_t index = 0;
};

struct MatrixVar {
  std::size_t index = 0;
};

struct ScalarTerm {
  std::size_t var;
  double coef;
};

// coef * X(row, col). Off-diagonal entries refer to the symmetric pair.
struct MatrixTerm {
  std::size_t block;
  std::size_t row;
  std::size_t col;
  double coef;
};

class LinearExpr {
 public:
  LinearExpr& add(ScalarVar var, double coef);
  LinearExpr& add(MatrixVar var, std::size_t row, std::size_t col, double coef);
  // Adds <C, X> for a symmetric coefficient matrix C (upper triangle is read).
  LinearExpr& add_inner(MatrixVar var, const Eigen::MatrixXd& coef);

  const std::vector<ScalarTerm>& scalar_terms() const { return scalar_terms_; }
  const std::vector<MatrixTerm>& matrix_terms() const { return matrix_terms_; }
  bool empty() const { return scalar_terms_.empty() && matrix_terms_.empty(); }

 private:
  std::vector<ScalarTerm> scalar_terms_;
  std::vector<MatrixTerm> matrix_terms_;
};

struct Row {
  LinearExpr expr;
  Relation relation;
  double rhs;
  std::string label;
};

struct SolveParams {
  double tolerance = 1e-8;
  // A run that stalls before reaching tolerance still reports optimal when
  // its best iterate has every residual and the gap below this.
  double acceptable_tolerance = 1e-6;
  int max_iterations = 150;
  // The interior-point path is sequential and has no randomized components,
  // so runs are always reproducible; the flag is kept for dump fidelity.
  bool deterministic = true;
};

class ConicProblem {
 public:
  ScalarVar add_scalar(Domain domain, std::string name = {});
  MatrixVar add_psd_block(std::size_t dim, std::string name = {});

  void set_objective(Sense sense, LinearExpr expr, double constant = 0.0);
  std::size_t add_row(LinearExpr expr, Relation relation, double rhs, std::string label = {});

  std::size_t num_scalars() const { return scalar_domains_.size(); }
  std::size_t num_blocks() const { return block_dims_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  Domain scalar_domain(std::size_t i) const { return scalar_domains_.at(i); }
  const std::string& scalar_name(std::size_t i) const { return scalar_names_.at(i); }
  std::size_t block_dim(std::size_t b) const { return block_dims_.at(b); }
  const std::string& block_name(std::size_t b) const { return block_names_.at(b); }
  const std::vector<Row>& rows() const { return rows_; }
  Sense sense() const { return sense_; }
  const LinearExpr& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }

  SolveParams params;

 private:
  void check_expr(const LinearExpr& expr) const;

  std::vector<Domain> scalar_domains_;
  std::vector<std::string> scalar_names_;
  std::vector<std::size_t> block_dims_;
  std::vector<std::string> block_names_;
  std::vector<Row> rows_;
  Sense sense_ = Sense::minimize;
  LinearExpr objective_;
  double objective_constant_ = 0.0;
};

struct ConicResult {
  Status status = Status::numerical_failure;
  std::vector<double> scalars;
  std::vector<Eigen::MatrixXd> blocks;
  double objective = 0.0;
  // Largest violation of any row, variable domain, or PSD membership,
  // measured on the original (unscaled, unsplit) problem.
  double primal_residual = 0.0;
  std::optional<double> dual_objective;
  int iterations = 0;

  double value(ScalarVar var) const { return scalars.at(var.index); }
  const Eigen::MatrixXd& value(MatrixVar var) const { return blocks.at(var.index); }
};

ConicResult solve(const ConicProblem& problem);

double evaluate(const LinearExpr& expr, const std::vector<double>& scalars,
                const std::vector<Eigen::MatrixXd>& blocks);

// Positive when the row is violated, <= 0 when satisfied.
double row_violation(const Row& row, const std::vector<double>& scalars,
                     const std::vector<Eigen::MatrixXd>& blocks);

double max_violation(const ConicProblem& problem, const std::vector<double>& scalars,
                     const std::vector<Eigen::MatrixXd>& blocks);

// Human-readable text dump for bug reports. parse_dump() reads it back so a
// reported problem can be re-solved, but the format is not a stable
// interchange format.
std::string dump(const ConicProblem& problem);
ConicProblem parse_dump(std::string_view text);

}  // namespace infomenu::conic
