#include "infomenu/gaussian_pricing.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace infomenu {
namespace {

void require_finite(const Eigen::VectorXd& x, const char* what) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(what) + " has a non-finite entry");
}

// Eigenvalue range of the symmetric part.
std::pair<double, double> eigen_range(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

std::string pair_label(const char* tag, std::size_t i, std::size_t j) {
  return std::string(tag) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::string single_label(const char* tag, std::size_t i) { return std::string(tag) + "(" + std::to_string(i) + ")"; }

// Unit vector orthogonal to every column of a, preferring one that is also
// orthogonal to v. Its largest-magnitude entry is made positive. Returns an
// empty vector when the columns of a span the whole space.
Eigen::VectorXd complement_direction(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size();
  auto first_outside = [d](const Eigen::MatrixXd& cols) -> Eigen::VectorXd {
    if (cols.cols() == 0) return Eigen::VectorXd::Unit(d, 0);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols);
    qr.setThreshold(1e-10);
    const Eigen::Index r = qr.rank();
    if (r >= d) return {};
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    return q.col(r);
  };
  Eigen::MatrixXd with_v(d, a.cols() + 1);
  with_v << a, v;
  Eigen::VectorXd dir = v.norm() > 0.0 ? first_outside(with_v) : first_outside(a);
  if (dir.size() == 0) dir = first_outside(a);
  if (dir.size() == 0) return dir;
  dir.normalize();
  Eigen::Index k = 0;
  dir.cwiseAbs().maxCoeff(&k);
  if (dir(k) < 0.0) dir = -dir;
  return dir;
}

}  // namespace

GaussianInstance::GaussianInstance(std::size_t d, std::vector<Eigen::VectorXd> thetas, std::vector<double> type_dist)
    : d_(d), thetas_(std::move(thetas)), type_dist_(std::move(type_dist)) {
  if (d_ == 0) throw std::invalid_argument("dimension must be positive");
  if (thetas_.empty()) throw std::invalid_argument("at least one type is required");
  if (type_dist_.size() != thetas_.size()) throw std::invalid_argument("type_dist must have one entry per theta");
  double sum = 0.0;
  for (std::size_t i = 0; i < thetas_.size(); ++i) {
    if (static_cast<std::size_t>(thetas_[i].size()) != d_) {
      throw std::invalid_argument("theta " + std::to_string(i) + " has the wrong dimension");
    }
    require_finite(thetas_[i], "theta");
    if (!(type_dist_[i] > 0.0) || !std::isfinite(type_dist_[i])) {
      throw std::invalid_argument("type probabilities must be positive");
    }
    sum += type_dist_[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("type_dist must sum to 1");
}

GaussianInstance GaussianInstance::whitened(const Eigen::MatrixXd& sigma, const std::vector<Eigen::VectorXd>& thetas,
                                            std::vector<double> type_dist) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw std::invalid_argument("covariance must be square");
  if (!sigma.isApprox(sigma.transpose(), 1e-12)) throw std::invalid_argument("covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument("covariance must be positive semidefinite");
  const Eigen::MatrixXd root = es.operatorSqrt();
  std::vector<Eigen::VectorXd> out;
  out.reserve(thetas.size());
  for (const auto& t : thetas) {
    if (t.size() != sigma.rows()) throw std::invalid_argument("theta dimension does not match the covariance");
    out.push_back(root * t);
  }
  return GaussianInstance(static_cast<std::size_t>(sigma.rows()), std::move(out), std::move(type_dist));
}

ScalarGaussianExperiment ScalarGaussianExperiment::null(std::size_t d) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)), 1.0};
}

void ScalarGaussianExperiment::validate() const {
  require_finite(v, "experiment direction");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("noise variance must be >= 0");
  if (v.squaredNorm() + sigma2 <= 0.0) {
    throw std::invalid_argument("degenerate experiment: v = 0 and sigma2 = 0 (use v = 0, sigma2 = 1)");
  }
}

ScalarGaussianExperiment ScalarGaussianExperiment::normalized() const {
  validate();
  const double scale = std::sqrt(v.squaredNorm() + sigma2);
  return {v / scale, sigma2 / (scale * scale)};
}

Eigen::MatrixXd posterior_covariance_scalar(const ScalarGaussianExperiment& exp, std::size_t d) {
  exp.validate();
  if (static_cast<std::size_t>(exp.v.size()) != d) throw std::invalid_argument("direction has the wrong dimension");
  const auto n = static_cast<Eigen::Index>(d);
  return Eigen::MatrixXd::Identity(n, n) - exp.v * exp.v.transpose() / (exp.v.squaredNorm() + exp.sigma2);
}

double scalar_experiment_gain(const ScalarGaussianExperiment& exp, const Eigen::VectorXd& theta) {
  exp.validate();
  if (exp.v.size() != theta.size()) throw std::invalid_argument("direction and theta differ in dimension");
  const double p = exp.v.dot(theta);
  return p * p / (exp.v.squaredNorm() + exp.sigma2);
}

double scalar_experiment_value(const ScalarGaussianExperiment& exp, const Eigen::VectorXd& theta) {
  return scalar_experiment_gain(exp, theta) - theta.squaredNorm();
}

ScalarGaussianExperiment reduce_to_scalar(const Eigen::MatrixXd& M, const Eigen::VectorXd& theta) {
  if (M.rows() != M.cols() || M.rows() != theta.size()) throw std::invalid_argument("M must be d x d");
  if (!M.allFinite()) throw std::invalid_argument("M has a non-finite entry");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw std::invalid_argument("M must be symmetric");
  const auto [lo, hi] = eigen_range(M);
  if (lo < -1e-9 || hi > 1.0 + 1e-9) {
    throw std::invalid_argument("M must satisfy 0 <= M <= I (eigenvalues in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "])");
  }
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::VectorXd v = sym * theta;
  const double sigma2 = std::max(0.0, theta.dot(sym * theta) - v.squaredNorm());
  if (v.squaredNorm() + sigma2 <= 0.0) return ScalarGaussianExperiment::null(static_cast<std::size_t>(theta.size()));
  return {std::move(v), sigma2};
}

double GaussianMenu::revenue(const std::vector<double>& type_dist) const {
  if (type_dist.size() != entries.size()) throw std::invalid_argument("menu size does not match the number of types");
  double r = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) r += type_dist[i] * entries[i].price;
  return r;
}

GaussianSdp build_menu_sdp(const GaussianInstance& inst, const conic::SolveParams& params) {
  GaussianSdp sdp;
  auto& p = sdp.problem;
  p.params = params;
  const std::size_t n = inst.num_types();
  const std::size_t d = inst.dim();
  for (std::size_t i = 0; i < n; ++i) {
    sdp.info.push_back(p.add_psd_block(d, "V" + std::to_string(i)));
    sdp.remainder.push_back(p.add_psd_block(d, "W" + std::to_string(i)));
    sdp.prices.push_back(p.add_scalar(conic::Domain::nonnegative, "t" + std::to_string(i)));
  }
  conic::LinearExpr objective;
  for (std::size_t i = 0; i < n; ++i) objective.add(sdp.prices[i], inst.type_dist()[i]);
  p.set_objective(conic::Sense::maximize, objective);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = r; c < d; ++c) {
        conic::LinearExpr e;
        e.add(sdp.info[i], r, c, 1.0).add(sdp.remainder[i], r, c, 1.0);
        p.add_row(std::move(e), conic::Relation::equal, r == c ? 1.0 : 0.0);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::MatrixXd outer = inst.theta(i) * inst.theta(i).transpose();
    conic::LinearExpr ir;
    ir.add_inner(sdp.info[i], outer).add(sdp.prices[i], -1.0);
    p.add_row(std::move(ir), conic::Relation::greater_equal, 0.0, single_label("IR", i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      conic::LinearExpr ic;
      ic.add_inner(sdp.info[i], outer).add_inner(sdp.info[j], -outer);
      ic.add(sdp.prices[i], -1.0).add(sdp.prices[j], 1.0);
      p.add_row(std::move(ic), conic::Relation::greater_equal, 0.0, pair_label("IC", i, j));
    }
  }
  return sdp;
}

SdpSolution solve_menu_sdp(const GaussianInstance& inst, const conic::SolveParams& params) {
  const GaussianSdp sdp = build_menu_sdp(inst, params);
  const conic::ConicResult r = conic::solve(sdp.problem);
  SdpSolution sol;
  sol.status = r.status;
  sol.objective = r.objective;
  sol.primal_residual = r.primal_residual;
  sol.iterations = r.iterations;
  if (r.status != conic::Status::optimal) return sol;
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    const Eigen::MatrixXd& raw = r.value(sdp.info[i]);
    Eigen::MatrixXd v = 0.5 * (raw + raw.transpose());
    const auto [lo, hi] = eigen_range(v);
    sol.cone_violation = std::max({sol.cone_violation, -lo, hi - 1.0});
    sol.info.push_back(std::move(v));
    sol.prices.push_back(r.value(sdp.prices[i]));
  }
  if (sol.cone_violation > kPsdTolerance) sol.status = conic::Status::numerical_failure;
  return sol;
}

GaussianMenu extract_rank_one(const SdpSolution& sol, const GaussianInstance& inst) {
  if (sol.status != conic::Status::optimal) throw std::invalid_argument("SDP solution is not optimal");
  if (sol.info.size() != inst.num_types()) throw std::invalid_argument("SDP solution does not match the instance");
  GaussianMenu menu;
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    const Eigen::VectorXd& th = inst.theta(i);
    const Eigen::VectorXd vt = sol.info[i] * th;
    const double q = th.dot(vt);
    GaussianMenuEntry entry{ScalarGaussianExperiment::null(inst.dim()), sol.prices[i]};
    if (q > 1e-12) {
      Eigen::VectorXd v = vt / std::sqrt(q);
      const double nrm = v.norm();
      if (nrm > 1.0) v /= nrm;  // solver slack only; |v| <= 1 + 1e-7 by the cone tolerance
      entry.experiment = {v, std::max(0.0, 1.0 - v.squaredNorm())};
      if (entry.experiment.v.squaredNorm() + entry.experiment.sigma2 <= 0.0) entry.experiment.sigma2 = 1.0;
    }
    menu.entries.push_back(std::move(entry));
  }
  return menu;
}

SurplusCheck check_full_surplus(const GaussianInstance& inst) {
  SurplusCheck out;
  const std::size_t n = inst.num_types();
  out.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double own = inst.theta(i).squaredNorm();
    if (n == 1 && own < out.margin) {
      out.margin = own;
      out.worst_i = out.worst_j = i;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double m = own - std::abs(inst.theta(i).dot(inst.theta(j)));
      if (m < out.margin) {
        out.margin = m;
        out.worst_i = i;
        out.worst_j = j;
      }
    }
  }
  out.holds = out.margin >= 0.0;
  return out;
}

double full_surplus_revenue(const GaussianInstance& inst) {
  double r = 0.0;
  for (std::size_t i = 0; i < inst.num_types(); ++i) r += inst.type_dist()[i] * inst.theta(i).squaredNorm();
  return r;
}

GaussianMenu full_surplus_menu(const GaussianInstance& inst) {
  GaussianMenu menu;
  for (const auto& th : inst.thetas()) {
    const double nrm = th.norm();
    if (nrm == 0.0) {
      menu.entries.push_back({ScalarGaussianExperiment::null(inst.dim()), 0.0});
    } else {
      menu.entries.push_back({{th / nrm, 0.0}, th.squaredNorm()});
    }
  }
  return menu;
}

GaussianMenu lift_to_deterministic(const GaussianMenu& menu, const GaussianInstance& inst) {
  const std::size_t n = inst.num_types();
  const std::size_t d = inst.dim();
  if (menu.entries.size() != n) throw std::invalid_argument("menu size does not match the number of types");
  if (d < n) {
    throw std::invalid_argument("lifting needs d >= n (d = " + std::to_string(d) + ", n = " + std::to_string(n) +
                                "): the other types' directions may leave no free direction");
  }
  GaussianMenu out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto exp = menu.entries[i].experiment.normalized();
    if (exp.sigma2 <= 1e-15) {
      out.entries.push_back({exp, menu.entries[i].price});
      continue;
    }
    Eigen::MatrixXd others(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n - 1));
    for (std::size_t j = 0, c = 0; j < n; ++j) {
      if (j != i) others.col(static_cast<Eigen::Index>(c++)) = inst.theta(j);
    }
    Eigen::VectorXd delta = complement_direction(others, exp.v);
    if (delta.size() == 0) {
      throw std::invalid_argument("the other types' directions span R^d for type " + std::to_string(i) +
                                  "; no orthogonal direction is left to lift with");
    }
    const Eigen::VectorXd& th = inst.theta(i);
    if (th.dot(exp.v) * th.dot(delta) < 0.0) delta = -delta;
    const double b = exp.v.dot(delta);
    const double alpha = -b + std::sqrt(b * b + 1.0 - exp.v.squaredNorm());
    Eigen::VectorXd v = exp.v + alpha * delta;
    v.normalize();  // removes rounding; |v| is 1 analytically
    out.entries.push_back({{std::move(v), 0.0}, menu.entries[i].price});
  }
  return out;
}

ViolationReport evaluate_gaussian_menu(const GaussianMenu& menu, const GaussianInstance& inst, double tol) {
  const std::size_t n = inst.num_types();
  if (menu.entries.size() != n) throw std::invalid_argument("menu size does not match the number of types");
  ViolationReport report;
  report.tolerance = tol;
  std::vector<ScalarGaussianExperiment> exps;
  for (const auto& e : menu.entries) exps.push_back(e.experiment.normalized());
  for (std::size_t i = 0; i < n; ++i) {
    const double own = scalar_experiment_gain(exps[i], inst.theta(i)) - menu.entries[i].price;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double other = scalar_experiment_gain(exps[j], inst.theta(i)) - menu.entries[j].price;
      report.add(pair_label("IC", i, j), other - own);
    }
    report.add(single_label("IR", i), -own);
    report.add(single_label("NORM", i), exps[i].v.norm() - 1.0);
  }
  report.pass = report.max_residual <= tol;
  return report;
}

GaussianSolveReport solve_gaussian_menu(const GaussianInstance& inst, const conic::SolveParams& params) {
  GaussianSolveReport report;
  report.surplus = check_full_surplus(inst);
  const SdpSolution sol = solve_menu_sdp(inst, params);
  report.status = sol.status;
  report.sdp_objective = sol.objective;
  if (report.surplus.holds) {
    GaussianMenu closed = full_surplus_menu(inst);
    const auto check = evaluate_gaussian_menu(closed, inst, 1e-9);
    if (check.pass) {
      report.closed_form = true;
      report.status = conic::Status::optimal;
      report.revenue = closed.revenue(inst.type_dist());
      report.max_violation = std::max(0.0, check.max_residual);
      report.menu = std::move(closed);
      return report;
    }
  }
  if (sol.status != conic::Status::optimal) return report;
  GaussianMenu menu = extract_rank_one(sol, inst);
  report.max_violation = std::max(0.0, evaluate_gaussian_menu(menu, inst, 0.0).max_residual);
  report.revenue = menu.revenue(inst.type_dist());
  report.menu = std::move(menu);
  return report;
}

}  // namespace infomenu
