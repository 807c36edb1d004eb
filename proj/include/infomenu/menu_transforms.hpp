#pragma once

// Menu post-processing used by the sampled mechanism: responsive coarsening
// and repair of approximately feasible prices.

#include "infomenu/core_model.hpp"

namespace infomenu {

// Relabels every experiment so that its signals are the actions its intended
// type would take, merging signals that induce the same action. A signal
// whose own label is among the best responses keeps that label; otherwise it
// goes to the lowest-index best response.
Menu coarsen_to_responsive(const DiscreteModel& model, const Menu& menu);
Menu coarsen_to_responsive(const FiniteInstance& inst, const Menu& menu);

enum class RepairMode { unchanged, rank_shift, affine_shrink };

struct RepairResult {
  Menu menu;
  RepairMode mode;
};

// Turns a menu whose IC/IR rows are violated by at most epsilon into an
// exactly feasible responsive menu, losing at most min(n eps, 3 sqrt(eps))
// revenue when the better of the two price rules applies:
//   rank_shift:    sort by price, the r-th cheapest entry (r = 1..n) drops r*eps
//   affine_shrink: t -> (1 - sqrt(eps)) t - eps
// After the price change each type is pointed at its favourite entry (its own
// on ties) and the menu is coarsened. Throws std::invalid_argument naming the
// worst row when the input violates some row by more than epsilon.
RepairResult repair_menu_prices(const DiscreteModel& model, const Menu& menu, double epsilon);
RepairResult repair_menu_prices(const FiniteInstance& inst, const Menu& menu, double epsilon);

}  // namespace infomenu
