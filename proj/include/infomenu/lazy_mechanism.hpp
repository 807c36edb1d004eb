#pragma once

// Sample-based menu mechanism. Only a sampler over states and pointwise
// utilities are needed: the realized state is mixed into K-1 fresh draws, the
// multiset is shuffled, the empirical menu LP is solved, and the buyer receives
// a signal drawn from its kernel row at the realized state together with the
// empirical price.

#include "infomenu/core_model.hpp"
#include "infomenu/menu_lp.hpp"
#include "infomenu/random.hpp"
#include "infomenu/verification.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace infomenu {

template <class O>
concept StateOracle = requires(const O& o, Rng& rng, std::size_t i, const typename O::state_type& s) {
  { o.sample(rng) } -> std::convertible_to<typename O::state_type>;
  { o.utility(i, s, i) } -> std::convertible_to<double>;
  { o.contains(s) } -> std::convertible_to<bool>;
  { o.num_types() } -> std::convertible_to<std::size_t>;
  { o.num_actions() } -> std::convertible_to<std::size_t>;
  { o.type_dist() } -> std::convertible_to<const std::vector<double>&>;
  { o.actions() } -> std::convertible_to<const std::vector<std::string>&>;
};

// Draws state indices of a FiniteInstance from its prior.
class CategoricalOracle {
 public:
  using state_type = std::size_t;

  explicit CategoricalOracle(FiniteInstance inst);

  std::size_t sample(Rng& rng) const;
  double utility(std::size_t type, std::size_t state, std::size_t action) const {
    return inst_.utility(type, state, action);
  }
  bool contains(std::size_t state) const { return state < inst_.num_states() && inst_.prior()[state] > 0.0; }
  std::size_t num_types() const { return inst_.num_types(); }
  std::size_t num_actions() const { return inst_.num_actions(); }
  const std::vector<double>& type_dist() const { return inst_.type_dist(); }
  const std::vector<std::string>& actions() const { return inst_.actions(); }
  const FiniteInstance& instance() const { return inst_; }

 private:
  FiniteInstance inst_;
  std::vector<double> cumulative_;
};

// Built-in continuous oracle "line": the state is uniform on [0, 1], action k
// is the point k/(m-1), and type i wants to match the state shifted by
// offset_i = 0.3 i/n with a linear payoff falloff of slope 1 + i.
class LineOracle {
 public:
  using state_type = double;

  LineOracle(std::size_t num_types, std::size_t num_actions);

  double sample(Rng& rng) const { return rng.uniform(); }
  double utility(std::size_t type, double state, std::size_t action) const;
  bool contains(double state) const { return state >= 0.0 && state <= 1.0; }
  std::size_t num_types() const { return type_dist_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  const std::vector<double>& type_dist() const { return type_dist_; }
  const std::vector<std::string>& actions() const { return actions_; }

 private:
  std::vector<double> type_dist_;
  std::vector<std::string> actions_;
};

// K = ceil(c min(n^2/eps^2, 1/eps^4) m ln(mn/delta)), at least 1.
std::size_t sample_budget(std::size_t n, std::size_t m, double epsilon, double delta, double c = 1.0);

// 2 sqrt(m ln(2mn/delta) / K): with probability 1 - delta no IC/IR row of the
// empirical solution is violated by more than this under the true prior.
double certified_violation_bound(std::size_t n, std::size_t m, std::size_t K, double delta);

struct LazyParams {
  double delta = 0.1;  // only used for the certified bound
  // Slot of the realized state before shuffling. The shuffle makes the choice
  // irrelevant in distribution; tests vary it to confirm that.
  std::size_t realized_slot = 0;
  conic::SolveParams solver;
};

class LazyLpFailure : public std::runtime_error {
 public:
  LazyLpFailure(conic::Status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  conic::Status status() const { return status_; }

 private:
  conic::Status status_;
};

template <class State>
struct LazyTranscript {
  std::uint64_t seed = 0;
  std::size_t declared_type = 0;
  std::size_t num_samples = 0;
  // samples[k] = original[permutation[k]]. The realized state sits in
  // original[realized_slot] (slot 0 unless overridden), and
  // samples[realized_position] is that same draw.
  std::vector<State> samples;
  std::vector<std::size_t> permutation;
  std::size_t realized_position = 0;
  conic::Status lp_status = conic::Status::numerical_failure;
  double lp_objective = 0.0;
  double lp_residual = 0.0;
  int lp_iterations = 0;
  double empirical_violation = 0.0;  // worst IC/IR residual under the sample weights
  double certified_bound = 0.0;
  std::vector<double> kernel_row;  // pi^i(. | realized state)
  std::size_t signal = 0;
  std::string signal_label;
  double price = 0.0;
};

template <class State>
struct LazyOutcome {
  std::size_t signal = 0;
  double price = 0.0;
  LazyTranscript<State> transcript;
};

namespace detail {

// Samples with identical utility rows are interchangeable in the menu LP, so
// they share one support point weighted by their count. Any optimum of the
// merged LP is an optimum of the per-sample LP with rows copied back.
struct MergedSample {
  DiscreteModel model;
  std::vector<std::size_t> point_of;  // sample position -> support point
};

template <StateOracle O>
MergedSample merged_empirical_model(const O& oracle, const std::vector<typename O::state_type>& points) {
  const std::size_t n = oracle.num_types();
  const std::size_t m = oracle.num_actions();
  std::map<std::vector<double>, std::size_t> index;
  std::vector<double> counts, u;
  std::vector<std::size_t> point_of;
  point_of.reserve(points.size());
  std::vector<double> row(n * m);
  for (const auto& s : points) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < m; ++a) row[i * m + a] = oracle.utility(i, s, a);
    }
    const auto [it, fresh] = index.try_emplace(row, counts.size());
    if (fresh) {
      counts.push_back(0.0);
      u.insert(u.end(), row.begin(), row.end());
    }
    counts[it->second] += 1.0;
    point_of.push_back(it->second);
  }
  const double total = static_cast<double>(points.size());
  std::vector<double> w(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) w[k] = counts[k] / total;
  w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
  return {DiscreteModel(std::move(w), oracle.type_dist(), oracle.actions(), std::move(u)), std::move(point_of)};
}

inline std::size_t draw_index(Rng& rng, const std::vector<double>& probabilities) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    acc += probabilities[k];
    if (u < acc) return k;
  }
  // Rounding left u above the total; fall back to the last positive entry.
  for (std::size_t k = probabilities.size(); k-- > 0;) {
    if (probabilities[k] > 0.0) return k;
  }
  return probabilities.size() - 1;
}

inline std::uint64_t child_seed(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
  return Rng(seed).stream(name, index).next();
}

}  // namespace detail

// The shuffled multiset of one run: K-1 fresh draws plus the realized state.
template <class State>
struct LazySample {
  std::vector<State> samples;
  std::vector<std::size_t> permutation;
  std::size_t realized_position = 0;
};

// The empirical menu solved on one multiset, shared by every declared type.
template <class State>
struct LazyMenuRun {
  LazySample<State> sample;
  LpSolveReport report;  // status is optimal and menu is set
  std::vector<std::size_t> point_of_sample;  // kernel row used at each sample position
  double empirical_violation = 0.0;
  double certified_bound = 0.0;
};

template <StateOracle O>
LazySample<typename O::state_type> draw_lazy_sample(const O& oracle, const typename O::state_type& realized_state,
                                                    std::size_t num_samples, std::uint64_t seed,
                                                    const LazyParams& params = {}) {
  if (num_samples == 0) throw std::invalid_argument("K must be at least 1");
  if (!oracle.contains(realized_state)) throw std::invalid_argument("realized state is outside the oracle's support");
  if (params.realized_slot >= num_samples) throw std::out_of_range("realized slot outside the sample");
  const Rng root(seed);
  Rng sample_rng = root.stream("samples");
  Rng shuffle_rng = root.stream("permutation");

  std::vector<typename O::state_type> original;
  original.reserve(num_samples);
  for (std::size_t k = 1; k < num_samples; ++k) original.push_back(oracle.sample(sample_rng));
  original.insert(original.begin() + static_cast<std::ptrdiff_t>(params.realized_slot), realized_state);

  LazySample<typename O::state_type> out;
  out.permutation.resize(num_samples);
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});
  for (std::size_t k = num_samples; k > 1; --k) {
    std::swap(out.permutation[k - 1], out.permutation[static_cast<std::size_t>(shuffle_rng.below(k))]);
  }
  out.samples.reserve(num_samples);
  for (std::size_t k = 0; k < num_samples; ++k) {
    out.samples.push_back(original[out.permutation[k]]);
    if (out.permutation[k] == params.realized_slot) out.realized_position = k;
  }
  return out;
}

// Solves the empirical LP; throws LazyLpFailure unless it is optimal.
template <StateOracle O>
LazyMenuRun<typename O::state_type> solve_lazy_menu(const O& oracle, LazySample<typename O::state_type> sample,
                                                    const LazyParams& params = {}) {
  if (sample.samples.empty()) throw std::invalid_argument("at least one sample is required");
  if (sample.realized_position >= sample.samples.size()) {
    throw std::out_of_range("realized position outside the sample");
  }
  auto [model, point_of] = detail::merged_empirical_model(oracle, sample.samples);
  LazyMenuRun<typename O::state_type> run;
  run.report = solve_menu_lp(model, params.solver);
  run.point_of_sample = std::move(point_of);
  run.certified_bound =
      certified_violation_bound(oracle.num_types(), oracle.num_actions(), sample.samples.size(), params.delta);
  if (run.report.status != conic::Status::optimal || !run.report.menu) {
    throw LazyLpFailure(run.report.status,
                        "empirical menu LP failed: " + std::string(conic::to_string(run.report.status)));
  }
  run.empirical_violation = std::max(0.0, check_ic_ir(model, *run.report.menu, 0.0).max_residual);
  run.sample = std::move(sample);
  return run;
}

// Draws the declared type's signal at the realized position.
template <class State>
LazyOutcome<State> emit_lazy_signal(const LazyMenuRun<State>& run, std::size_t declared_type, Rng& signal_rng) {
  const Menu& menu = *run.report.menu;
  if (declared_type >= menu.size()) throw std::out_of_range("declared type out of range");
  LazyOutcome<State> out;
  auto& t = out.transcript;
  t.declared_type = declared_type;
  t.num_samples = run.sample.samples.size();
  t.realized_position = run.sample.realized_position;
  t.permutation = run.sample.permutation;
  t.lp_status = run.report.status;
  t.lp_objective = run.report.objective;
  t.lp_residual = run.report.max_constraint_residual;
  t.lp_iterations = run.report.iterations;
  t.certified_bound = run.certified_bound;
  t.empirical_violation = run.empirical_violation;

  const auto& entry = menu.entry(declared_type);
  const auto point = run.point_of_sample[run.sample.realized_position];
  const auto row = entry.experiment.kernel().row(static_cast<Eigen::Index>(point));
  t.kernel_row.resize(static_cast<std::size_t>(row.size()));
  for (Eigen::Index a = 0; a < row.size(); ++a) t.kernel_row[static_cast<std::size_t>(a)] = row(a);
  t.signal = detail::draw_index(signal_rng, t.kernel_row);
  t.signal_label = entry.experiment.signals()[t.signal];
  t.price = entry.price;
  t.samples = run.sample.samples;

  out.signal = t.signal;
  out.price = t.price;
  return out;
}

// Solves the empirical LP on an already shuffled multiset and draws the
// signal at samples[realized_position]. Exposed so that fixed multisets can be
// replayed.
template <StateOracle O>
LazyOutcome<typename O::state_type> solve_lazy_on_samples(const O& oracle, std::size_t declared_type,
                                                          std::vector<typename O::state_type> samples,
                                                          std::size_t realized_position, Rng& signal_rng,
                                                          const LazyParams& params = {}) {
  if (declared_type >= oracle.num_types()) throw std::out_of_range("declared type out of range");
  LazySample<typename O::state_type> sample;
  sample.samples = std::move(samples);
  sample.realized_position = realized_position;
  const auto run = solve_lazy_menu(oracle, std::move(sample), params);
  return emit_lazy_signal(run, declared_type, signal_rng);
}

// One run of the mechanism for a buyer declaring declared_type while the
// state is realized_state. Deterministic in (seed, inputs).
template <StateOracle O>
LazyOutcome<typename O::state_type> run_lazy_experiment(const O& oracle, std::size_t declared_type,
                                                        const typename O::state_type& realized_state,
                                                        std::size_t num_samples, std::uint64_t seed,
                                                        const LazyParams& params = {}) {
  if (declared_type >= oracle.num_types()) throw std::out_of_range("declared type out of range");
  auto sample = draw_lazy_sample(oracle, realized_state, num_samples, seed, params);
  const auto run = solve_lazy_menu(oracle, std::move(sample), params);
  Rng signal_rng = Rng(seed).stream("signal");
  auto out = emit_lazy_signal(run, declared_type, signal_rng);
  out.transcript.seed = seed;
  return out;
}

template <class State>
struct StateIndependentOutcome {
  std::size_t signal = 0;
  double price = 0.0;
  LazyTranscript<State> signal_run;
  LazyTranscript<State> price_run;
};

// The signal comes from a run on the realized state; the price comes from an
// independent run on a fresh draw from the prior, so the charged price does
// not depend on the realized state.
template <StateOracle O>
StateIndependentOutcome<typename O::state_type> run_lazy_state_independent_price(
    const O& oracle, std::size_t declared_type, const typename O::state_type& realized_state, std::size_t num_samples,
    std::uint64_t seed, const LazyParams& params = {}) {
  auto signal_run = run_lazy_experiment(oracle, declared_type, realized_state, num_samples,
                                        detail::child_seed(seed, "signal-run"), params);
  Rng state_rng = Rng(seed).stream("price-state");
  const auto fresh = oracle.sample(state_rng);
  auto price_run =
      run_lazy_experiment(oracle, declared_type, fresh, num_samples, detail::child_seed(seed, "price-run"), params);
  return {signal_run.signal, price_run.price, std::move(signal_run.transcript), std::move(price_run.transcript)};
}

struct RevenueEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half-width
  double stddev = 0.0;
  std::size_t trials = 0;
  std::size_t num_samples = 0;
  std::vector<double> prices;  // per trial, in trial order
};

// Mean charged price over independent (type ~ f, state ~ prior) runs. Trial t
// uses its own stream, so results do not depend on the worker count.
template <StateOracle O>
RevenueEstimate estimate_mechanism_revenue(const O& oracle, std::size_t num_samples, std::size_t trials,
                                           std::uint64_t seed, const LazyParams& params = {},
                                           unsigned workers = 0) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));

  RevenueEstimate est;
  est.trials = trials;
  est.num_samples = num_samples;
  est.prices.assign(trials, 0.0);
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](unsigned w) {
    try {
      for (std::size_t t = w; t < trials; t += workers) {
        Rng rng = Rng(seed).stream("trial", t);
        const std::size_t type = detail::draw_index(rng, oracle.type_dist());
        const auto state = oracle.sample(rng);
        est.prices[t] = run_lazy_experiment(oracle, type, state, num_samples, rng.next(), params).price;
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const double count = static_cast<double>(trials);
  est.mean = std::accumulate(est.prices.begin(), est.prices.end(), 0.0) / count;
  double ss = 0.0;
  for (double p : est.prices) ss += (p - est.mean) * (p - est.mean);
  est.stddev = trials > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  est.half_width = 1.96 * est.stddev / std::sqrt(count);
  return est;
}

}  // namespace infomenu
