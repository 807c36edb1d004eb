#include "infomenu/menu_lp.hpp"

#include "infomenu/menu_transforms.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace infomenu {

using conic::Domain;
using conic::LinearExpr;
using conic::Relation;

MenuLpProblem build_menu_lp(const DiscreteModel& model, const conic::SolveParams& params) {
  MenuLpProblem lp;
  const std::size_t K = model.num_points();
  const std::size_t n = model.num_types();
  const std::size_t m = model.num_actions();
  lp.num_points = K;
  lp.num_types = n;
  lp.num_actions = m;
  lp.problem.params = params;

  auto& p = lp.problem;
  lp.kernels.reserve(n * K * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t a = 0; a < m; ++a) lp.kernels.push_back(p.add_scalar(Domain::nonnegative));
    }
  }
  // Prices are stored shifted, s^i = t^i + kPriceShift >= 0. Some IR row binds
  // at every optimum (otherwise all prices could rise together), so that
  // type's price is at least -1, and the IC rows then keep every other price
  // at least -2. The bound therefore never cuts off an optimal menu.
  for (std::size_t i = 0; i < n; ++i) {
    lp.prices.push_back(p.add_scalar(Domain::nonnegative, "t" + std::to_string(i)));
  }
  // Auxiliaries dominate nonnegative quantities, so the sign bound is implied.
  for (std::size_t q = 0; q < m * n * n; ++q) lp.aux.push_back(p.add_scalar(Domain::nonnegative));

  LinearExpr objective;
  for (std::size_t i = 0; i < n; ++i) objective.add(lp.prices[i], model.type_dist()[i]);
  p.set_objective(conic::Sense::maximize, objective, -kPriceShift);

  // Obedient value of type i for its own entry, as a linear form.
  auto own_value = [&](std::size_t i) {
    LinearExpr e;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t a = 0; a < m; ++a) e.add(lp.kernel(i, k, a), model.weight(k) * model.utility(i, k, a));
    }
    return e;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < K; ++k) {
      LinearExpr row;
      for (std::size_t a = 0; a < m; ++a) row.add(lp.kernel(i, k, a), 1.0);
      p.add_row(std::move(row), Relation::equal, 1.0);
    }
  }

  lp.baselines.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    lp.baselines[i] = baseline_utility(model, i).value;
    const std::string tag = std::to_string(i);
    LinearExpr ir = own_value(i);
    ir.add(lp.prices[i], -1.0);
    p.add_row(std::move(ir), Relation::greater_equal, lp.baselines[i] - kPriceShift, "IR(" + tag + ")");

    // IC(i,j) for every j including j = i; the diagonal rows enforce obedience.
    for (std::size_t j = 0; j < n; ++j) {
      LinearExpr ic = own_value(i);
      if (j != i) ic.add(lp.prices[i], -1.0).add(lp.prices[j], 1.0);
      for (std::size_t a = 0; a < m; ++a) ic.add(lp.auxiliary(a, i, j), -1.0);
      p.add_row(std::move(ic), Relation::greater_equal, 0.0, "IC(" + tag + "," + std::to_string(j) + ")");
    }
  }

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t b = 0; b < m; ++b) {
          LinearExpr row;
          row.add(lp.auxiliary(a, i, j), 1.0);
          for (std::size_t k = 0; k < K; ++k) row.add(lp.kernel(j, k, a), -model.weight(k) * model.utility(i, k, b));
          p.add_row(std::move(row), Relation::greater_equal, 0.0);
        }
      }
    }
  }
  return lp;
}

MenuLpProblem build_menu_lp(const FiniteInstance& inst, std::span<const double> weights,
                            const conic::SolveParams& params) {
  if (weights.size() != inst.num_states()) throw std::invalid_argument("weights must have one entry per state");
  std::vector<std::size_t> support(inst.num_states());
  for (std::size_t s = 0; s < support.size(); ++s) support[s] = s;
  return build_menu_lp(inst.model(support, weights), params);
}

namespace {

Experiment clean_kernel(const MenuLpProblem& lp, const conic::ConicResult& r, std::size_t type,
                        const std::vector<std::string>& actions) {
  const auto K = static_cast<Eigen::Index>(lp.num_points);
  const auto m = static_cast<Eigen::Index>(lp.num_actions);
  Eigen::MatrixXd kernel(K, m);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index a = 0; a < m; ++a) {
      kernel(k, a) = std::max(0.0, r.value(lp.kernel(type, static_cast<std::size_t>(k), static_cast<std::size_t>(a))));
    }
    const double s = kernel.row(k).sum();
    if (s > 0.0) {
      kernel.row(k) /= s;
    } else {
      kernel.row(k).setConstant(1.0 / static_cast<double>(m));
    }
  }
  return Experiment(actions, std::move(kernel));
}

}  // namespace

LpSolveReport solve_menu_lp(const DiscreteModel& model, const conic::SolveParams& params) {
  const MenuLpProblem lp = build_menu_lp(model, params);
  const conic::ConicResult r = conic::solve(lp.problem);
  LpSolveReport report;
  report.status = r.status;
  report.objective = r.objective;
  report.iterations = r.iterations;
  report.max_constraint_residual = r.primal_residual;
  if (r.status == conic::Status::optimal && r.primal_residual > kLpResidualLimit) {
    report.status = conic::Status::numerical_failure;
  }
  if (report.status != conic::Status::optimal) return report;

  std::vector<MenuEntry> entries;
  for (std::size_t i = 0; i < lp.num_types; ++i) {
    const double price = r.value(lp.prices[i]) - kPriceShift;
    report.has_negative_price = report.has_negative_price || price < 0.0;
    entries.push_back({clean_kernel(lp, r, i, model.actions()), price});
  }
  Menu menu = coarsen_to_responsive(model, Menu(std::move(entries), model.type_dist()));
  menu.set_max_violation(r.primal_residual);
  for (std::size_t i = 0; i < lp.num_types; ++i) {
    report.ir_slack.push_back(responsive_value(model, menu.entry(i).experiment, i) - menu.entry(i).price -
                              lp.baselines[i]);
  }
  report.menu = std::move(menu);
  return report;
}

LpSolveReport solve_exact(const FiniteInstance& inst, const conic::SolveParams& params) {
  return solve_menu_lp(inst.model(), params);
}

double full_info_revenue(const DiscreteModel& model) {
  double r = 0.0;
  for (std::size_t i = 0; i < model.num_types(); ++i) {
    r += model.type_dist()[i] * (full_information_value(model, i) - baseline_utility(model, i).value);
  }
  return r;
}

double full_info_revenue(const FiniteInstance& inst) { return full_info_revenue(inst.model()); }

}  // namespace infomenu
