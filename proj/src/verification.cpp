#include "infomenu/verification.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace infomenu {

void ViolationReport::add(std::string label, double value) {
  max_residual = residuals.empty() ? value : std::max(max_residual, value);
  residuals.push_back({std::move(label), value});
  pass = max_residual <= tolerance;
}

double ViolationReport::worst(const std::string& prefix) const {
  double w = -std::numeric_limits<double>::infinity();
  for (const auto& r : residuals) {
    if (r.label.compare(0, prefix.size(), prefix) == 0) w = std::max(w, r.value);
  }
  return w;
}

namespace {

std::string pair_label(const char* tag, std::size_t i, std::size_t j) {
  return std::string(tag) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

ViolationReport check_ic_ir(const DiscreteModel& model, const Menu& menu, double tol, OwnValue own) {
  const std::size_t n = model.num_types();
  if (menu.size() != n) throw std::invalid_argument("menu size does not match the number of types");
  ViolationReport report;
  report.tolerance = tol;

  // value[i][j] = what type i gets from entry j when best-responding.
  std::vector<std::vector<double>> value(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) value[i][j] = experiment_value(model, menu.entry(j).experiment, i);
  }
  std::vector<double> own_value(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Experiment& e = menu.entry(i).experiment;
    if (own == OwnValue::responsive) {
      if (e.signals() != model.actions()) throw std::invalid_argument("responsive check needs signals equal to actions");
      own_value[i] = responsive_value(model, e, i);
    } else {
      own_value[i] = value[i][i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double net = own_value[i] - menu.entry(i).price;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      report.add(pair_label("IC", i, j), value[i][j] - menu.entry(j).price - net);
    }
    report.add("IR(" + std::to_string(i) + ")", baseline_utility(model, i).value - net);
  }
  return report;
}

ViolationReport check_ic_ir(const FiniteInstance& inst, const Menu& menu, double tol, OwnValue own) {
  return check_ic_ir(inst.model(), menu, tol, own);
}

ViolationReport check_obedience(const DiscreteModel& model, const Menu& menu, double tol) {
  const std::size_t n = model.num_types();
  const std::size_t m = model.num_actions();
  if (menu.size() != n) throw std::invalid_argument("menu size does not match the number of types");
  ViolationReport report;
  report.tolerance = tol;
  for (std::size_t i = 0; i < n; ++i) {
    const Experiment& e = menu.entry(i).experiment;
    if (e.signals() != model.actions()) throw std::invalid_argument("obedience needs signals equal to actions");
    if (e.num_states() != model.num_points()) throw std::invalid_argument("experiment does not match the model");
    for (std::size_t a = 0; a < m; ++a) {
      std::vector<double> payoff(m, 0.0);
      for (std::size_t k = 0; k < model.num_points(); ++k) {
        const double mass = model.weight(k) * e.kernel()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a));
        for (std::size_t b = 0; b < m; ++b) payoff[b] += mass * model.utility(i, k, b);
      }
      for (std::size_t b = 0; b < m; ++b) {
        if (b == a) continue;
        report.add("OB(" + std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b) + ")",
                   payoff[b] - payoff[a]);
      }
    }
  }
  return report;
}

ViolationReport check_obedience(const FiniteInstance& inst, const Menu& menu, double tol) {
  return check_obedience(inst.model(), menu, tol);
}

}  // namespace infomenu
