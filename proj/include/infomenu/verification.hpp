#pragma once

// Independent checks of menus: IC/IR and obedience for finite menus.

#include "infomenu/core_model.hpp"

#include <string>
#include <vector>

namespace infomenu {

struct Residual {
  std::string label;  // IC(i,j), IR(i) or OB(i,a,a'), zero-based indices
  double value;       // positive means violated
};

struct ViolationReport {
  std::vector<Residual> residuals;
  double max_residual = 0.0;  // max over residuals, 0 for an empty report
  double tolerance = 0.0;
  bool pass = true;

  void add(std::string label, double value);
  // Worst residual with the given label prefix ("IC", "IR", "OB").
  double worst(const std::string& prefix) const;
};

// How a type values the entry meant for it.
enum class OwnValue {
  responsive,  // obedient value; requires signals == actions
  full,        // experiment value with the best response to every signal
};

// Residuals of IC(i,j) = V(E^j,i) - t^j - (own_i - t^i) for i != j and
// IR(i) = u^i + t^i - own_i.
ViolationReport check_ic_ir(const DiscreteModel& model, const Menu& menu, double tol,
                            OwnValue own = OwnValue::responsive);
ViolationReport check_ic_ir(const FiniteInstance& inst, const Menu& menu, double tol,
                            OwnValue own = OwnValue::responsive);

// OB(i,a,a') = sum_w prior pi^i(a|w) (u^i(w,a') - u^i(w,a)) for a' != a.
ViolationReport check_obedience(const DiscreteModel& model, const Menu& menu, double tol);
ViolationReport check_obedience(const FiniteInstance& inst, const Menu& menu, double tol);

}  // namespace infomenu
