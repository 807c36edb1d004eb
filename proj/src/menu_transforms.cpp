#include "infomenu/menu_transforms.hpp"

#include "infomenu/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace infomenu {
namespace {

constexpr double kTieTolerance = 1e-12;
// Rounding allowance when checking the input against epsilon.
constexpr double kInputSlack = 1e-12;

Experiment coarsen_for(const DiscreteModel& model, const Experiment& e, std::size_t type) {
  const std::size_t m = model.num_actions();
  const auto rows = static_cast<Eigen::Index>(e.num_states());
  const bool labelled_by_action = e.signals() == model.actions();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(m));
  for (std::size_t s = 0; s < e.num_signals(); ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    std::vector<double> payoff(m, 0.0);
    for (std::size_t k = 0; k < model.num_points(); ++k) {
      const double mass = model.weight(k) * e.kernel()(static_cast<Eigen::Index>(k), col);
      for (std::size_t a = 0; a < m; ++a) payoff[a] += mass * model.utility(type, k, a);
    }
    const auto best = static_cast<std::size_t>(std::max_element(payoff.begin(), payoff.end()) - payoff.begin());
    std::size_t target = best;
    if (labelled_by_action && payoff[s] >= payoff[best] - kTieTolerance) target = s;
    out.col(static_cast<Eigen::Index>(target)) += e.kernel().col(col);
  }
  return Experiment(model.actions(), std::move(out));
}

// Net utility table: net[i][j] = V(E^j, i) - t^j.
std::vector<std::vector<double>> net_table(const DiscreteModel& model, const Menu& menu,
                                           const std::vector<double>& prices) {
  const std::size_t n = menu.size();
  std::vector<std::vector<double>> net(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) net[i][j] = experiment_value(model, menu.entry(j).experiment, i) - prices[j];
  }
  return net;
}

// Point every type at its favourite entry under the new prices and coarsen.
Menu reassign(const DiscreteModel& model, const Menu& menu, const std::vector<double>& prices) {
  const std::size_t n = menu.size();
  const auto net = net_table(model, menu, prices);
  std::vector<MenuEntry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pick = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (net[i][j] > net[i][pick] + kTieTolerance) pick = j;
    }
    entries.push_back({menu.entry(pick).experiment, prices[pick]});
  }
  return coarsen_to_responsive(model, Menu(std::move(entries), model.type_dist()));
}

}  // namespace

Menu coarsen_to_responsive(const DiscreteModel& model, const Menu& menu) {
  if (menu.size() != model.num_types()) throw std::invalid_argument("menu size does not match the number of types");
  std::vector<MenuEntry> entries;
  entries.reserve(menu.size());
  for (std::size_t i = 0; i < menu.size(); ++i) {
    entries.push_back({coarsen_for(model, menu.entry(i).experiment, i), menu.entry(i).price});
  }
  Menu out(std::move(entries), model.type_dist());
  out.set_max_violation(menu.max_violation());
  return out;
}

Menu coarsen_to_responsive(const FiniteInstance& inst, const Menu& menu) {
  return coarsen_to_responsive(inst.model(), menu);
}

RepairResult repair_menu_prices(const DiscreteModel& model, const Menu& menu, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be a finite value >= 0");
  const std::size_t n = menu.size();
  if (n != model.num_types()) throw std::invalid_argument("menu size does not match the number of types");

  bool responsive = true;
  for (const auto& e : menu.entries()) responsive = responsive && e.experiment.signals() == model.actions();
  const OwnValue own = responsive ? OwnValue::responsive : OwnValue::full;

  const auto before = check_ic_ir(model, menu, epsilon + kInputSlack, own);
  if (!before.pass) {
    const auto worst = std::max_element(before.residuals.begin(), before.residuals.end(),
                                        [](const Residual& a, const Residual& b) { return a.value < b.value; });
    throw std::invalid_argument("menu violates " + worst->label + " by " + std::to_string(worst->value) +
                                ", more than epsilon " + std::to_string(epsilon));
  }
  if (before.max_residual <= 0.0 && responsive) {
    const auto ob = check_obedience(model, menu, 0.0);
    if (ob.pass) return {menu, RepairMode::unchanged};
  }

  std::vector<double> original(n);
  for (std::size_t i = 0; i < n; ++i) original[i] = menu.entry(i).price;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return original[a] < original[b]; });
  std::vector<double> shifted(n);
  for (std::size_t r = 0; r < n; ++r) shifted[order[r]] = original[order[r]] - static_cast<double>(r + 1) * epsilon;

  std::vector<double> shrunk(n);
  const double root = std::sqrt(epsilon);
  for (std::size_t i = 0; i < n; ++i) shrunk[i] = (1.0 - root) * original[i] - epsilon;

  std::optional<RepairResult> best;
  for (const auto& [prices, mode] : {std::pair{shifted, RepairMode::rank_shift}, std::pair{shrunk, RepairMode::affine_shrink}}) {
    Menu candidate = reassign(model, menu, prices);
    const auto check = check_ic_ir(model, candidate, 1e-9, OwnValue::responsive);
    candidate.set_max_violation(std::max(0.0, check.max_residual));
    if (!check.pass) continue;
    if (!best || candidate.revenue() > best->menu.revenue()) best = RepairResult{std::move(candidate), mode};
  }
  if (!best) throw std::runtime_error("price repair produced no feasible menu");
  return *best;
}

RepairResult repair_menu_prices(const FiniteInstance& inst, const Menu& menu, double epsilon) {
  return repair_menu_prices(inst.model(), menu, epsilon);
}

}  // namespace infomenu
