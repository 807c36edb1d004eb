#pragma once

// Finite information-selling model: states, a common prior, actions, buyer
// types with utilities in [0,1], statistical experiments and menus.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace infomenu {

inline constexpr double kProbabilityTolerance = 1e-9;

// Utilities are indexed [type][state][action].
using UtilityTensor = std::vector<std::vector<std::vector<double>>>;

class DiscreteModel;

class FiniteInstance {
 public:
  FiniteInstance(std::vector<std::string> states, std::vector<double> prior, std::vector<std::string> actions,
                 std::vector<double> type_dist, UtilityTensor utilities);

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  std::size_t num_types() const { return type_dist_.size(); }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<double>& prior() const { return prior_; }
  const std::vector<double>& type_dist() const { return type_dist_; }
  const UtilityTensor& utilities() const { return utilities_; }

  double utility(std::size_t type, std::size_t state, std::size_t action) const {
    return utilities_[type][state][action];
  }

  std::size_t state_index(const std::string& name) const;

  // The instance viewed under its own prior.
  DiscreteModel model() const;
  // The instance restricted to a multiset of its states with the given
  // weights (duplicates allowed, kept as separate support points).
  DiscreteModel model(std::span<const std::size_t> support, std::span<const double> weights) const;

 private:
  std::vector<std::string> states_;
  std::vector<double> prior_;
  std::vector<std::string> actions_;
  std::vector<double> type_dist_;
  UtilityTensor utilities_;
};

// A discrete prior over support points together with every type's utility at
// each point. The exact model of a FiniteInstance and the empirical model of a
// sample multiset are both DiscreteModels, so value computations and the menu
// LP are written once.
class DiscreteModel {
 public:
  // utilities are flattened as [point][type][action].
  DiscreteModel(std::vector<double> weights, std::vector<double> type_dist, std::vector<std::string> actions,
                std::vector<double> utilities);

  // Uniform 1/K weights over K points, as used by sampled solves.
  static DiscreteModel empirical(std::vector<double> type_dist, std::vector<std::string> actions,
                                 std::vector<double> utilities, std::size_t num_points);

  std::size_t num_points() const { return weights_.size(); }
  std::size_t num_types() const { return type_dist_.size(); }
  std::size_t num_actions() const { return actions_.size(); }

  double weight(std::size_t point) const { return weights_[point]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& type_dist() const { return type_dist_; }
  const std::vector<std::string>& actions() const { return actions_; }

  double utility(std::size_t type, std::size_t point, std::size_t action) const {
    return utilities_[(point * type_dist_.size() + type) * actions_.size() + action];
  }

 private:
  std::vector<double> weights_;
  std::vector<double> type_dist_;
  std::vector<std::string> actions_;
  std::vector<double> utilities_;
};

// E = (S, pi): kernel(state, signal) = pi(signal | state).
class Experiment {
 public:
  Experiment(std::vector<std::string> signals, Eigen::MatrixXd kernel);

  // One signal, emitted with certainty: carries no information.
  static Experiment uninformative(std::size_t num_states);
  // Signal i is emitted exactly in state i.
  static Experiment full_revelation(std::vector<std::string> state_signals);

  std::size_t num_states() const { return static_cast<std::size_t>(kernel_.rows()); }
  std::size_t num_signals() const { return signals_.size(); }
  const std::vector<std::string>& signals() const { return signals_; }
  const Eigen::MatrixXd& kernel() const { return kernel_; }

 private:
  std::vector<std::string> signals_;
  Eigen::MatrixXd kernel_;
};

struct MenuEntry {
  Experiment experiment;
  double price;
};

class Menu {
 public:
  Menu(std::vector<MenuEntry> entries, const std::vector<double>& type_dist);

  std::size_t size() const { return entries_.size(); }
  const std::vector<MenuEntry>& entries() const { return entries_; }
  const MenuEntry& entry(std::size_t type) const { return entries_.at(type); }
  double revenue() const { return revenue_; }

  // Largest IC/IR violation found by whoever produced or checked the menu.
  double max_violation() const { return max_violation_; }
  void set_max_violation(double v) { max_violation_ = v; }

 private:
  std::vector<MenuEntry> entries_;
  double revenue_ = 0.0;
  double max_violation_ = 0.0;
};

struct BestAction {
  double value;
  std::size_t action;
};

// u^i = max_a E[u^i(w, a)], ties resolved to the lowest action index.
BestAction baseline_utility(const DiscreteModel& model, std::size_t type);
BestAction baseline_utility(const FiniteInstance& inst, std::size_t type);

// V(E, i) = sum_s max_a sum_w prior(w) pi(s|w) u^i(w, a)
double experiment_value(const DiscreteModel& model, const Experiment& exp, std::size_t type);
double experiment_value(const FiniteInstance& inst, const Experiment& exp, std::size_t type);

// Obedient value: signal a is read as "take action a".
double responsive_value(const DiscreteModel& model, const Experiment& exp, std::size_t type);
double responsive_value(const FiniteInstance& inst, const Experiment& exp, std::size_t type);

// Value of learning the state exactly: sum_w prior(w) max_a u^i(w, a).
double full_information_value(const DiscreteModel& model, std::size_t type);

// Best response of a type to every signal of an experiment (lowest index on ties).
std::vector<std::size_t> induced_actions(const DiscreteModel& model, const Experiment& exp, std::size_t type);

}  // namespace infomenu
