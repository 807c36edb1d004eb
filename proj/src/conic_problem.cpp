#include "infomenu/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace infomenu::conic {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::less_equal: return "<=";
    case Relation::greater_equal: return ">=";
    case Relation::equal: return "=";
  }
  return "?";
}

LinearExpr& LinearExpr::add(ScalarVar var, double coef) {
  if (coef != 0.0) scalar_terms_.push_back({var.index, coef});
  return *this;
}

LinearExpr& LinearExpr::add(MatrixVar var, std::size_t row, std::size_t col, double coef) {
  if (coef != 0.0) {
    if (row > col) std::swap(row, col);
    matrix_terms_.push_back({var.index, row, col, coef});
  }
  return *this;
}

LinearExpr& LinearExpr::add_inner(MatrixVar var, const Eigen::MatrixXd& coef) {
  if (coef.rows() != coef.cols()) throw std::invalid_argument("add_inner: coefficient matrix must be square");
  for (Eigen::Index r = 0; r < coef.rows(); ++r) {
    add(var, r, r, coef(r, r));
    for (Eigen::Index c = r + 1; c < coef.cols(); ++c) {
      // <C, X> picks up C(r,c) X(r,c) + C(c,r) X(c,r).
      add(var, r, c, coef(r, c) + coef(c, r));
    }
  }
  return *this;
}

ScalarVar ConicProblem::add_scalar(Domain domain, std::string name) {
  scalar_domains_.push_back(domain);
  scalar_names_.push_back(std::move(name));
  return ScalarVar{scalar_domains_.size() - 1};
}

MatrixVar ConicProblem::add_psd_block(std::size_t dim, std::string name) {
  if (dim == 0) throw std::invalid_argument("add_psd_block: dimension must be positive");
  block_dims_.push_back(dim);
  block_names_.push_back(std::move(name));
  return MatrixVar{block_dims_.size() - 1};
}

void ConicProblem::check_expr(const LinearExpr& expr) const {
  for (const auto& t : expr.scalar_terms()) {
    if (t.var >= scalar_domains_.size()) throw std::out_of_range("expression references an undeclared scalar variable");
    if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite coefficient");
  }
  for (const auto& t : expr.matrix_terms()) {
    if (t.block >= block_dims_.size()) throw std::out_of_range("expression references an undeclared matrix block");
    if (t.col >= block_dims_[t.block]) throw std::out_of_range("matrix term outside block dimensions");
    if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite coefficient");
  }
}

void ConicProblem::set_objective(Sense sense, LinearExpr expr, double constant) {
  check_expr(expr);
  sense_ = sense;
  objective_ = std::move(expr);
  objective_constant_ = constant;
}

std::size_t ConicProblem::add_row(LinearExpr expr, Relation relation, double rhs, std::string label) {
  check_expr(expr);
  if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite right-hand side");
  rows_.push_back({std::move(expr), relation, rhs, std::move(label)});
  return rows_.size() - 1;
}

double evaluate(const LinearExpr& expr, const std::vector<double>& scalars,
                const std::vector<Eigen::MatrixXd>& blocks) {
  double v = 0.0;
  for (const auto& t : expr.scalar_terms()) v += t.coef * scalars.at(t.var);
  for (const auto& t : expr.matrix_terms()) v += t.coef * blocks.at(t.block)(t.row, t.col);
  return v;
}

double row_violation(const Row& row, const std::vector<double>& scalars,
                     const std::vector<Eigen::MatrixXd>& blocks) {
  const double lhs = evaluate(row.expr, scalars, blocks);
  switch (row.relation) {
    case Relation::less_equal: return lhs - row.rhs;
    case Relation::greater_equal: return row.rhs - lhs;
    case Relation::equal: return std::abs(lhs - row.rhs);
  }
  return 0.0;
}

double max_violation(const ConicProblem& problem, const std::vector<double>& scalars,
                     const std::vector<Eigen::MatrixXd>& blocks) {
  double worst = 0.0;
  for (const auto& row : problem.rows()) worst = std::max(worst, row_violation(row, scalars, blocks));
  for (std::size_t i = 0; i < problem.num_scalars(); ++i) {
    if (problem.scalar_domain(i) == Domain::nonnegative) worst = std::max(worst, -scalars.at(i));
  }
  for (std::size_t b = 0; b < problem.num_blocks(); ++b) {
    const Eigen::MatrixXd& x = blocks.at(b);
    const Eigen::MatrixXd sym = 0.5 * (x + x.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    worst = std::max(worst, -eig.eigenvalues().minCoeff());
    worst = std::max(worst, (x - x.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Text dump

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(const std::string& name) {
  if (name.empty()) return "-";
  std::string out = name;
  std::replace_if(out.begin(), out.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }, '_');
  return out;
}

std::string unsanitize(const std::string& name) { return name == "-" ? std::string{} : name; }

void dump_expr(std::ostringstream& out, const LinearExpr& expr) {
  for (const auto& t : expr.scalar_terms()) out << "  s " << t.var << ' ' << fmt_double(t.coef) << '\n';
  for (const auto& t : expr.matrix_terms()) {
    out << "  m " << t.block << ' ' << t.row << ' ' << t.col << ' ' << fmt_double(t.coef) << '\n';
  }
  out << "end\n";
}

Relation parse_relation(const std::string& s) {
  if (s == "<=") return Relation::less_equal;
  if (s == ">=") return Relation::greater_equal;
  if (s == "=") return Relation::equal;
  throw std::invalid_argument("parse_dump: unknown relation '" + s + "'");
}

}  // namespace

std::string dump(const ConicProblem& problem) {
  std::ostringstream out;
  out << "# infomenu conic problem\n";
  out << "params tolerance " << fmt_double(problem.params.tolerance) << " acceptable_tolerance "
      << fmt_double(problem.params.acceptable_tolerance) << " max_iterations "
      << problem.params.max_iterations << " deterministic " << (problem.params.deterministic ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < problem.num_scalars(); ++i) {
    out << "scalar " << i << ' ' << (problem.scalar_domain(i) == Domain::free ? "free" : "nonneg") << ' '
        << sanitize(problem.scalar_name(i)) << '\n';
  }
  for (std::size_t b = 0; b < problem.num_blocks(); ++b) {
    out << "block " << b << ' ' << problem.block_dim(b) << ' ' << sanitize(problem.block_name(b)) << '\n';
  }
  out << "objective " << (problem.sense() == Sense::maximize ? "maximize" : "minimize") << ' '
      << fmt_double(problem.objective_constant()) << '\n';
  dump_expr(out, problem.objective());
  for (const auto& row : problem.rows()) {
    out << "row " << to_string(row.relation) << ' ' << fmt_double(row.rhs) << ' ' << sanitize(row.label) << '\n';
    dump_expr(out, row.expr);
  }
  return out.str();
}

ConicProblem parse_dump(std::string_view text) {
  ConicProblem problem;
  std::istringstream in{std::string(text)};
  std::string line;

  auto read_expr = [&in, &line]() {
    LinearExpr expr;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "end") return expr;
      if (tag == "s") {
        std::size_t var = 0;
        double coef = 0.0;
        if (!(ls >> var >> coef)) throw std::invalid_argument("parse_dump: bad scalar term: " + line);
        expr.add(ScalarVar{var}, coef);
      } else if (tag == "m") {
        std::size_t block = 0, r = 0, c = 0;
        double coef = 0.0;
        if (!(ls >> block >> r >> c >> coef)) throw std::invalid_argument("parse_dump: bad matrix term: " + line);
        expr.add(MatrixVar{block}, r, c, coef);
      } else {
        throw std::invalid_argument("parse_dump: unexpected line in expression: " + line);
      }
    }
    throw std::invalid_argument("parse_dump: unterminated expression");
  };

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "params") {
      std::string key;
      while (ls >> key) {
        if (key == "tolerance") ls >> problem.params.tolerance;
        else if (key == "acceptable_tolerance") ls >> problem.params.acceptable_tolerance;
        else if (key == "max_iterations") ls >> problem.params.max_iterations;
        else if (key == "deterministic") {
          int flag = 1;
          ls >> flag;
          problem.params.deterministic = flag != 0;
        } else {
          throw std::invalid_argument("parse_dump: unknown parameter " + key);
        }
      }
    } else if (tag == "scalar") {
      std::size_t idx = 0;
      std::string domain, name;
      ls >> idx >> domain >> name;
      if (idx != problem.num_scalars()) throw std::invalid_argument("parse_dump: scalars out of order");
      problem.add_scalar(domain == "free" ? Domain::free : Domain::nonnegative, unsanitize(name));
    } else if (tag == "block") {
      std::size_t idx = 0, dim = 0;
      std::string name;
      ls >> idx >> dim >> name;
      if (idx != problem.num_blocks()) throw std::invalid_argument("parse_dump: blocks out of order");
      problem.add_psd_block(dim, unsanitize(name));
    } else if (tag == "objective") {
      std::string sense;
      double constant = 0.0;
      ls >> sense >> constant;
      problem.set_objective(sense == "maximize" ? Sense::maximize : Sense::minimize, read_expr(), constant);
    } else if (tag == "row") {
      std::string rel, label;
      double rhs = 0.0;
      ls >> rel >> rhs >> label;
      const Relation relation = parse_relation(rel);
      problem.add_row(read_expr(), relation, rhs, unsanitize(label));
    } else {
      throw std::invalid_argument("parse_dump: unknown record '" + tag + "'");
    }
  }
  return problem;
}

}  // namespace infomenu::conic
