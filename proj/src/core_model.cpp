#include "infomenu/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace infomenu {
namespace {

void check_distribution(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + " is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(std::string(what) + " has a negative or non-finite weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw std::invalid_argument(std::string(what) + " sums to " + std::to_string(sum) + ", not 1");
  }
}

void check_utility(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("utility outside [0,1]: " + std::to_string(u));
}

void check_type(std::size_t type, std::size_t n) {
  if (type >= n) throw std::out_of_range("type index " + std::to_string(type) + " out of range");
}

void check_kernel_rows(const DiscreteModel& model, const Experiment& exp) {
  if (exp.num_states() != model.num_points()) {
    throw std::invalid_argument("experiment has " + std::to_string(exp.num_states()) + " kernel rows but the model has " +
                                std::to_string(model.num_points()) + " states");
  }
}

}  // namespace

FiniteInstance::FiniteInstance(std::vector<std::string> states, std::vector<double> prior,
                               std::vector<std::string> actions, std::vector<double> type_dist,
                               UtilityTensor utilities)
    : states_(std::move(states)),
      prior_(std::move(prior)),
      actions_(std::move(actions)),
      type_dist_(std::move(type_dist)),
      utilities_(std::move(utilities)) {
  if (states_.empty()) throw std::invalid_argument("instance needs at least one state");
  if (actions_.empty()) throw std::invalid_argument("instance needs at least one action");
  if (prior_.size() != states_.size()) throw std::invalid_argument("prior length does not match the number of states");
  check_distribution(prior_, "prior");
  check_distribution(type_dist_, "type_dist");
  if (utilities_.size() != type_dist_.size()) throw std::invalid_argument("utilities must have one table per type");
  for (const auto& table : utilities_) {
    if (table.size() != states_.size()) throw std::invalid_argument("utility table must have one row per state");
    for (const auto& row : table) {
      if (row.size() != actions_.size()) throw std::invalid_argument("utility row must have one entry per action");
      for (double u : row) check_utility(u);
    }
  }
}

std::size_t FiniteInstance::state_index(const std::string& name) const {
  const auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) throw std::out_of_range("unknown state '" + name + "'");
  return static_cast<std::size_t>(it - states_.begin());
}

DiscreteModel FiniteInstance::model() const {
  std::vector<std::size_t> support(num_states());
  std::iota(support.begin(), support.end(), std::size_t{0});
  return model(support, prior_);
}

DiscreteModel FiniteInstance::model(std::span<const std::size_t> support, std::span<const double> weights) const {
  if (support.size() != weights.size()) throw std::invalid_argument("support and weights differ in length");
  std::vector<double> u;
  u.reserve(support.size() * num_types() * num_actions());
  for (std::size_t s : support) {
    if (s >= num_states()) throw std::out_of_range("support references an unknown state");
    for (std::size_t i = 0; i < num_types(); ++i) {
      for (std::size_t a = 0; a < num_actions(); ++a) u.push_back(utilities_[i][s][a]);
    }
  }
  return DiscreteModel(std::vector<double>(weights.begin(), weights.end()), type_dist_, actions_, std::move(u));
}

DiscreteModel::DiscreteModel(std::vector<double> weights, std::vector<double> type_dist,
                             std::vector<std::string> actions, std::vector<double> utilities)
    : weights_(std::move(weights)),
      type_dist_(std::move(type_dist)),
      actions_(std::move(actions)),
      utilities_(std::move(utilities)) {
  check_distribution(weights_, "state weights");
  check_distribution(type_dist_, "type_dist");
  if (actions_.empty()) throw std::invalid_argument("model needs at least one action");
  if (utilities_.size() != weights_.size() * type_dist_.size() * actions_.size()) {
    throw std::invalid_argument("utility table size does not match points x types x actions");
  }
  for (double u : utilities_) check_utility(u);
}

DiscreteModel DiscreteModel::empirical(std::vector<double> type_dist, std::vector<std::string> actions,
                                       std::vector<double> utilities, std::size_t num_points) {
  if (num_points == 0) throw std::invalid_argument("empirical model needs at least one sample");
  std::vector<double> w(num_points, 1.0 / static_cast<double>(num_points));
  // Re-balance the last weight so the sum is 1 to rounding.
  const double partial = std::accumulate(w.begin(), w.end() - 1, 0.0);
  w.back() = 1.0 - partial;
  return DiscreteModel(std::move(w), std::move(type_dist), std::move(actions), std::move(utilities));
}

Experiment::Experiment(std::vector<std::string> signals, Eigen::MatrixXd kernel)
    : signals_(std::move(signals)), kernel_(std::move(kernel)) {
  if (kernel_.rows() == 0) throw std::invalid_argument("experiment kernel has no rows");
  if (static_cast<std::size_t>(kernel_.cols()) != signals_.size()) {
    throw std::invalid_argument("experiment kernel columns do not match the signal list");
  }
  for (Eigen::Index r = 0; r < kernel_.rows(); ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < kernel_.cols(); ++c) {
      const double p = kernel_(r, c);
      if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("experiment kernel has a negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      throw std::invalid_argument("experiment kernel row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
  }
}

Experiment Experiment::uninformative(std::size_t num_states) {
  return Experiment({"null"}, Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(num_states), 1));
}

Experiment Experiment::full_revelation(std::vector<std::string> state_signals) {
  const auto n = static_cast<Eigen::Index>(state_signals.size());
  return Experiment(std::move(state_signals), Eigen::MatrixXd::Identity(n, n));
}

Menu::Menu(std::vector<MenuEntry> entries, const std::vector<double>& type_dist) : entries_(std::move(entries)) {
  if (entries_.size() != type_dist.size()) throw std::invalid_argument("menu needs exactly one entry per type");
  for (std::size_t i = 0; i < entries_.size(); ++i) revenue_ += type_dist[i] * entries_[i].price;
}

BestAction baseline_utility(const DiscreteModel& model, std::size_t type) {
  check_type(type, model.num_types());
  BestAction best{-1.0, 0};
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    double v = 0.0;
    for (std::size_t k = 0; k < model.num_points(); ++k) v += model.weight(k) * model.utility(type, k, a);
    if (v > best.value) best = {v, a};
  }
  return best;
}

BestAction baseline_utility(const FiniteInstance& inst, std::size_t type) {
  return baseline_utility(inst.model(), type);
}

std::vector<std::size_t> induced_actions(const DiscreteModel& model, const Experiment& exp, std::size_t type) {
  check_type(type, model.num_types());
  check_kernel_rows(model, exp);
  std::vector<std::size_t> out(exp.num_signals(), 0);
  for (std::size_t s = 0; s < exp.num_signals(); ++s) {
    double best = -1.0;
    for (std::size_t a = 0; a < model.num_actions(); ++a) {
      double v = 0.0;
      for (std::size_t k = 0; k < model.num_points(); ++k) {
        v += model.weight(k) * exp.kernel()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) *
             model.utility(type, k, a);
      }
      if (v > best) {
        best = v;
        out[s] = a;
      }
    }
  }
  return out;
}

double experiment_value(const DiscreteModel& model, const Experiment& exp, std::size_t type) {
  check_type(type, model.num_types());
  check_kernel_rows(model, exp);
  double total = 0.0;
  for (std::size_t s = 0; s < exp.num_signals(); ++s) {
    double best = 0.0;
    for (std::size_t a = 0; a < model.num_actions(); ++a) {
      double v = 0.0;
      for (std::size_t k = 0; k < model.num_points(); ++k) {
        v += model.weight(k) * exp.kernel()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) *
             model.utility(type, k, a);
      }
      best = std::max(best, v);
    }
    total += best;
  }
  return total;
}

double experiment_value(const FiniteInstance& inst, const Experiment& exp, std::size_t type) {
  return experiment_value(inst.model(), exp, type);
}

double responsive_value(const DiscreteModel& model, const Experiment& exp, std::size_t type) {
  check_type(type, model.num_types());
  check_kernel_rows(model, exp);
  if (exp.num_signals() != model.num_actions()) {
    throw std::invalid_argument("responsive value needs one signal per action");
  }
  double total = 0.0;
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    for (std::size_t k = 0; k < model.num_points(); ++k) {
      total += model.weight(k) * exp.kernel()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) *
               model.utility(type, k, a);
    }
  }
  return total;
}

double responsive_value(const FiniteInstance& inst, const Experiment& exp, std::size_t type) {
  if (exp.signals() != inst.actions()) throw std::invalid_argument("responsive value needs signals equal to actions");
  return responsive_value(inst.model(), exp, type);
}

double full_information_value(const DiscreteModel& model, std::size_t type) {
  check_type(type, model.num_types());
  double total = 0.0;
  for (std::size_t k = 0; k < model.num_points(); ++k) {
    double best = 0.0;
    for (std::size_t a = 0; a < model.num_actions(); ++a) best = std::max(best, model.utility(type, k, a));
    total += model.weight(k) * best;
  }
  return total;
}

}  // namespace infomenu
