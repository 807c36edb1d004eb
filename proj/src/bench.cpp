#include "infomenu/bench.hpp"

#include "infomenu/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace infomenu {
namespace {

std::vector<double> normalized_exponentials(Rng& rng, std::size_t count) {
  std::vector<double> p(count);
  for (auto& x : p) x = rng.exponential() + 1e-3;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  return p;
}

struct Candidate {
  Eigen::VectorXd v;          // |v| <= 1, sigma2 = 1 - |v|^2
  std::vector<double> gains;  // (theta_k' v)^2 for every type k
};

// Largest revenue over prices for fixed gains[i][j] (gain of entry j to type
// i), or -inf when the IC rows admit no prices. Prices are the longest
// feasible values, i.e. shortest paths in the difference-constraint graph.
double best_prices(const std::vector<std::vector<double>>& gains, const std::vector<double>& f,
                   std::vector<double>* prices) {
  const std::size_t n = f.size();
  std::vector<double> t(n, std::numeric_limits<double>::infinity());
  for (std::size_t pass = 0; pass <= n + 1; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double bound = gains[i][i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) bound = std::min(bound, t[j] + gains[i][i] - gains[i][j]);
      }
      if (bound < t[i] - 1e-15) {
        t[i] = bound;
        changed = true;
      }
    }
    if (!changed) {
      if (prices) *prices = t;
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) r += f[i] * t[i];
      return r;
    }
  }
  return -std::numeric_limits<double>::infinity();
}

}  // namespace

double single_price_revenue(const std::vector<double>& surplus, const std::vector<double>& type_dist) {
  if (surplus.size() != type_dist.size()) throw std::invalid_argument("surplus and type_dist differ in length");
  double best = 0.0;
  for (double t : surplus) {
    // One minus the excluded mass, so a price every type accepts sells to
    // exactly mass 1.
    double excluded = 0.0;
    for (std::size_t i = 0; i < surplus.size(); ++i) {
      if (surplus[i] < t) excluded += type_dist[i];
    }
    const double mass = 1.0 - excluded;
    best = std::max(best, t * mass);
  }
  return best;
}

double single_item_full_revelation_revenue(const GaussianInstance& inst) {
  std::vector<double> s;
  for (const auto& th : inst.thetas()) s.push_back(th.squaredNorm());
  return single_price_revenue(s, inst.type_dist());
}

double single_item_full_revelation_revenue(const FiniteInstance& inst) {
  const DiscreteModel model = inst.model();
  std::vector<double> s;
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    s.push_back(full_information_value(model, i) - baseline_utility(model, i).value);
  }
  return single_price_revenue(s, inst.type_dist());
}

GaussianInstance build_diff_value_instance(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  std::vector<double> f(n);
  std::vector<Eigen::VectorXd> thetas;
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    f[i - 1] = std::pow(alpha, static_cast<double>(i));
    total += f[i - 1];
    thetas.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i - 1)) *
                     std::sqrt(std::pow(alpha, -static_cast<double>(i))));
  }
  for (auto& x : f) x /= total;
  return GaussianInstance(n, std::move(thetas), std::move(f));
}

GaussianGridResult gaussian_grid_oracle(const GaussianInstance& inst, double step) {
  const std::size_t n = inst.num_types();
  const std::size_t d = inst.dim();
  if (d > 3 || n > 3) throw std::invalid_argument("grid oracle is limited to d <= 3 and n <= 3");
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
  const int half = static_cast<int>(std::lround(1.0 / step));
  if (std::abs(half * step - 1.0) > 1e-12) throw std::invalid_argument("grid step must divide 1");

  GaussianGridResult result;
  double lipschitz = 0.0;
  for (const auto& th : inst.thetas()) lipschitz = std::max(lipschitz, 2.0 * th.norm() * (1.0 + th.norm()));
  result.gap = lipschitz * step * std::sqrt(static_cast<double>(d));

  std::vector<Candidate> cands;
  auto push = [&](const Eigen::VectorXd& v) {
    Candidate c{v, std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
      const double p = inst.theta(k).dot(v);
      c.gains[k] = p * p;
    }
    cands.push_back(std::move(c));
  };
  std::vector<int> idx(d, -half);
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  while (true) {
    for (std::size_t k = 0; k < d; ++k) v(static_cast<Eigen::Index>(k)) = idx[k] * step;
    const double nrm = v.norm();
    if (nrm <= 1.0 + 1e-12) push(v / std::max(1.0, nrm));
    if (nrm > 0.0) push(v / nrm);
    std::size_t k = 0;
    while (k < d && ++idx[k] > half) idx[k++] = -half;
    if (k == d) break;
  }
  result.candidates = cands.size();

  // Per entry, keep candidates not dominated by one with higher own gain and
  // lower gains for everyone else.
  std::vector<std::vector<std::size_t>> frontier(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cands[a].gains[j] > cands[b].gains[j]; });
    for (std::size_t q : order) {
      bool dominated = false;
      for (std::size_t kept : frontier[j]) {
        bool all_le = true;
        for (std::size_t i = 0; i < n && all_le; ++i) {
          if (i != j && cands[kept].gains[i] > cands[q].gains[i] + 1e-12) all_le = false;
        }
        if (all_le) {
          dominated = true;
          break;
        }
      }
      if (!dominated) frontier[j].push_back(q);
    }
    result.frontier_sizes.push_back(frontier[j].size());
  }

  const auto& f = inst.type_dist();
  std::vector<double> rest(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) rest[j] = rest[j + 1] + f[j] * cands[frontier[j].front()].gains[j];

  std::vector<std::size_t> pick(n, 0), best_pick(n, 0);
  std::vector<std::vector<double>> gains(n, std::vector<double>(n));
  std::vector<double> prices, best_prices_found(n, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  auto recurse = [&](auto&& self, std::size_t j, double bound) -> void {
    if (j == n) {
      for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t i = 0; i < n; ++i) gains[i][e] = cands[frontier[e][pick[e]]].gains[i];
      }
      const double r = best_prices(gains, f, &prices);
      if (r > best) {
        best = r;
        best_pick = pick;
        best_prices_found = prices;
      }
      return;
    }
    for (std::size_t q = 0; q < frontier[j].size(); ++q) {
      const double own = f[j] * cands[frontier[j][q]].gains[j];
      if (bound + own + rest[j + 1] <= best + 1e-15) break;  // own gains only decrease along the frontier
      pick[j] = q;
      self(self, j + 1, bound + own);
    }
  };
  recurse(recurse, 0, 0.0);

  result.revenue = best;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& dir = cands[frontier[i][best_pick[i]]].v;
    ScalarGaussianExperiment e{dir, std::max(0.0, 1.0 - dir.squaredNorm())};
    if (e.v.squaredNorm() + e.sigma2 <= 0.0) e = ScalarGaussianExperiment::null(d);
    result.menu.entries.push_back({e, best_prices_found[i]});
  }
  return result;
}

FiniteInstance random_instance(std::size_t n, std::size_t m, std::size_t num_states, std::uint64_t seed) {
  if (n == 0 || m == 0 || num_states == 0) throw std::invalid_argument("sizes must be positive");
  Rng rng = Rng(seed).stream("finite-instance");
  std::vector<double> prior = normalized_exponentials(rng, num_states);
  std::vector<double> f = normalized_exponentials(rng, n);
  UtilityTensor u(n, std::vector<std::vector<double>>(num_states, std::vector<double>(m)));
  for (auto& type : u) {
    for (auto& row : type) {
      for (auto& x : row) x = rng.uniform();
    }
  }
  std::vector<std::string> states, actions;
  for (std::size_t s = 0; s < num_states; ++s) states.push_back("w" + std::to_string(s + 1));
  for (std::size_t a = 0; a < m; ++a) actions.push_back("a" + std::to_string(a + 1));
  return FiniteInstance(std::move(states), std::move(prior), std::move(actions), std::move(f), std::move(u));
}

GaussianInstance random_gaussian_instance(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("sizes must be positive");
  Rng rng = Rng(seed).stream("gaussian-instance");
  std::vector<Eigen::VectorXd> thetas;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd th(static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < th.size(); ++k) th(k) = rng.normal();
    thetas.push_back(std::move(th));
  }
  std::vector<double> f = normalized_exponentials(rng, n);
  return GaussianInstance(d, std::move(thetas), std::move(f));
}

FiniteShape finite_corpus_shape(std::uint64_t seed) {
  static constexpr std::size_t kStatesActions[4][2] = {{2, 2}, {3, 2}, {4, 2}, {2, 3}};
  const auto& sa = kStatesActions[seed % 4];
  return {1 + static_cast<std::size_t>((seed / 4) % 3), sa[1], sa[0]};
}

FiniteInstance finite_corpus_instance(std::uint64_t seed) {
  const auto shape = finite_corpus_shape(seed);
  return random_instance(shape.types, shape.actions, shape.states, seed);
}

GaussianShape gaussian_corpus_shape(std::uint64_t seed) {
  return {1 + static_cast<std::size_t>((seed / 4) % 4), 1 + static_cast<std::size_t>(seed % 4)};
}

GaussianInstance gaussian_corpus_instance(std::uint64_t seed) {
  const auto shape = gaussian_corpus_shape(seed);
  return random_gaussian_instance(shape.types, shape.dim, seed);
}

}  // namespace infomenu
