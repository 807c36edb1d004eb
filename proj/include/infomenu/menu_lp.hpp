#pragma once

// Revenue-maximizing menu LP over a discrete prior.
//
// The same builder handles the true prior of a FiniteInstance and the uniform
// empirical prior of a sampled multiset. Variables are the kernels
// pi^i(a | point), the prices t^i and auxiliaries v_{a,i,j} bounding the best
// deviation of type i when it buys entry j.

#include "infomenu/conic.hpp"
#include "infomenu/core_model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace infomenu {

inline constexpr double kPriceShift = 2.0;

struct MenuLpProblem {
  conic::ConicProblem problem;
  std::size_t num_points = 0;
  std::size_t num_types = 0;
  std::size_t num_actions = 0;
  std::vector<conic::ScalarVar> kernels;  // [(type * points + point) * actions + action]
  std::vector<conic::ScalarVar> prices;   // [type], holding t^i + kPriceShift
  std::vector<conic::ScalarVar> aux;      // [(action * types + i) * types + j]
  std::vector<double> baselines;          // u^i under the LP weights

  conic::ScalarVar kernel(std::size_t type, std::size_t point, std::size_t action) const {
    return kernels[(type * num_points + point) * num_actions + action];
  }
  conic::ScalarVar auxiliary(std::size_t action, std::size_t i, std::size_t j) const {
    return aux[(action * num_types + i) * num_types + j];
  }
};

MenuLpProblem build_menu_lp(const DiscreteModel& model, const conic::SolveParams& params = {});
MenuLpProblem build_menu_lp(const FiniteInstance& inst, std::span<const double> weights,
                            const conic::SolveParams& params = {});

struct LpSolveReport {
  conic::Status status = conic::Status::numerical_failure;
  double objective = 0.0;
  // Present when status is optimal. Kernels are cleaned (clamped at zero,
  // rows renormalized) and coarsened to responsive form.
  std::optional<Menu> menu;
  // Largest LP row or bound violation of the raw solver point.
  double max_constraint_residual = 0.0;
  // Per-type IR slack of the final menu: V(E^i, i) - t^i - u^i.
  std::vector<double> ir_slack;
  bool has_negative_price = false;
  int iterations = 0;
};

// Residuals above this downgrade an otherwise optimal solve.
inline constexpr double kLpResidualLimit = 1e-6;

LpSolveReport solve_menu_lp(const DiscreteModel& model, const conic::SolveParams& params = {});
LpSolveReport solve_exact(const FiniteInstance& inst, const conic::SolveParams& params = {});

// Revenue of selling full information to every type at its full surplus.
double full_info_revenue(const DiscreteModel& model);
double full_info_revenue(const FiniteInstance& inst);

}  // namespace infomenu
