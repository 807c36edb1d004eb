#pragma once

// Selling information about a Gaussian state w ~ N(0, I_d) to buyers with
// quadratic loss -(theta_i' w - a)^2. Scalar experiments emit v' w + noise;
// optimal menus come from an SDP over the expected-information matrices.
//
// Prices are surplus-relative: a type's baseline -|theta_i|^2 is dropped from
// both sides of every constraint, so IR reads gain_i(E^i) >= t^i where
// gain_i(E) = (v' theta_i)^2 / (|v|^2 + sigma2).

#include "infomenu/conic.hpp"
#include "infomenu/verification.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace infomenu {

inline constexpr double kPsdTolerance = 1e-7;

class GaussianInstance {
 public:
  GaussianInstance(std::size_t d, std::vector<Eigen::VectorXd> thetas, std::vector<double> type_dist);

  // Maps a prior N(mu, sigma) to the standard one: theta -> sigma^{1/2} theta.
  // The mean only shifts the optimal action and drops out.
  static GaussianInstance whitened(const Eigen::MatrixXd& sigma, const std::vector<Eigen::VectorXd>& thetas,
                                   std::vector<double> type_dist);

  std::size_t dim() const { return d_; }
  std::size_t num_types() const { return thetas_.size(); }
  const std::vector<Eigen::VectorXd>& thetas() const { return thetas_; }
  const Eigen::VectorXd& theta(std::size_t i) const { return thetas_.at(i); }
  const std::vector<double>& type_dist() const { return type_dist_; }

 private:
  std::size_t d_;
  std::vector<Eigen::VectorXd> thetas_;
  std::vector<double> type_dist_;
};

struct ScalarGaussianExperiment {
  Eigen::VectorXd v;
  double sigma2 = 1.0;

  static ScalarGaussianExperiment null(std::size_t d);
  // Rescaled so that |v|^2 + sigma2 = 1; the value is scale-free.
  ScalarGaussianExperiment normalized() const;
  // Throws on sigma2 < 0, non-finite entries, or v = 0 with sigma2 = 0.
  void validate() const;
};

// I - v v' / (|v|^2 + sigma2)
Eigen::MatrixXd posterior_covariance_scalar(const ScalarGaussianExperiment& exp, std::size_t d);

// (v' theta)^2 / (|v|^2 + sigma2) - |theta|^2, in [-|theta|^2, 0].
double scalar_experiment_value(const ScalarGaussianExperiment& exp, const Eigen::VectorXd& theta);

// Surplus over the no-information baseline: (v' theta)^2 / (|v|^2 + sigma2).
double scalar_experiment_gain(const ScalarGaussianExperiment& exp, const Eigen::VectorXd& theta);

// Scalar experiment with v = M theta and sigma2 = theta' (M - M^2) theta,
// which is worth exactly theta' (M - I) theta to theta. Requires 0 <= M <= I.
ScalarGaussianExperiment reduce_to_scalar(const Eigen::MatrixXd& M, const Eigen::VectorXd& theta);

struct GaussianMenuEntry {
  ScalarGaussianExperiment experiment;
  double price = 0.0;
};

struct GaussianMenu {
  std::vector<GaussianMenuEntry> entries;
  double revenue(const std::vector<double>& type_dist) const;
};

struct GaussianSdp {
  conic::ConicProblem problem;
  std::vector<conic::MatrixVar> info;       // V_i
  std::vector<conic::MatrixVar> remainder;  // I - V_i
  std::vector<conic::ScalarVar> prices;
};

// max sum f_i t^i over 0 <= V_i <= I and t >= 0 with
//   IR(i):   <V_i, theta_i theta_i'> - t^i >= 0
//   IC(i,j): <V_i - V_j, theta_i theta_i'> - t^i + t^j >= 0.
// Some IR row binds at every optimum, and the IC rows then force every price
// to be at least <V_i, theta_j theta_j'> >= 0, so the sign bound is harmless.
GaussianSdp build_menu_sdp(const GaussianInstance& inst, const conic::SolveParams& params = {});

struct SdpSolution {
  conic::Status status = conic::Status::numerical_failure;
  std::vector<Eigen::MatrixXd> info;  // symmetrized V_i
  std::vector<double> prices;
  double objective = 0.0;
  double primal_residual = 0.0;
  // Most negative eigenvalue of V_i or I - V_i, as a positive number.
  double cone_violation = 0.0;
  int iterations = 0;
};

SdpSolution solve_menu_sdp(const GaussianInstance& inst, const conic::SolveParams& params = {});

// v_i = V_i theta_i / sqrt(theta_i' V_i theta_i), sigma2_i = 1 - |v_i|^2.
GaussianMenu extract_rank_one(const SdpSolution& sol, const GaussianInstance& inst);

struct SurplusCheck {
  bool holds = true;
  std::size_t worst_i = 0;  // zero-based
  std::size_t worst_j = 0;
  // min over ordered pairs i != j of |theta_i|^2 - |theta_i' theta_j|;
  // |theta_i|^2 for a lone type.
  double margin = 0.0;
};

SurplusCheck check_full_surplus(const GaussianInstance& inst);
double full_surplus_revenue(const GaussianInstance& inst);
// v_i = theta_i / |theta_i|, t^i = |theta_i|^2.
GaussianMenu full_surplus_menu(const GaussianInstance& inst);

// Replaces every noisy experiment by a noiseless one with the same value to
// all other types and weakly higher value to its own type. Requires d >= n.
GaussianMenu lift_to_deterministic(const GaussianMenu& menu, const GaussianInstance& inst);

// Residuals labelled IC(i,j), IR(i) and NORM(i) = |v_i| - 1 on the
// normalized experiments.
ViolationReport evaluate_gaussian_menu(const GaussianMenu& menu, const GaussianInstance& inst, double tol);

struct GaussianSolveReport {
  conic::Status status = conic::Status::numerical_failure;
  std::optional<GaussianMenu> menu;
  double revenue = 0.0;
  double sdp_objective = 0.0;
  SurplusCheck surplus;
  // True when the separation condition held and the closed-form full
  // surplus menu was returned; its revenue equals the full-information bound.
  bool closed_form = false;
  double max_violation = 0.0;
};

// Solves the SDP, extracts a rank-one menu, and swaps in the closed-form menu
// when the separation condition holds.
GaussianSolveReport solve_gaussian_menu(const GaussianInstance& inst, const conic::SolveParams& params = {});

}  // namespace infomenu
