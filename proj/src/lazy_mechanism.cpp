#include "infomenu/lazy_mechanism.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace infomenu {

CategoricalOracle::CategoricalOracle(FiniteInstance inst) : inst_(std::move(inst)) {}

std::size_t CategoricalOracle::sample(Rng& rng) const { return detail::draw_index(rng, inst_.prior()); }

LineOracle::LineOracle(std::size_t num_types, std::size_t num_actions) {
  if (num_types == 0 || num_actions == 0) throw std::invalid_argument("line oracle needs at least one type and action");
  type_dist_.assign(num_types, 1.0 / static_cast<double>(num_types));
  for (std::size_t a = 0; a < num_actions; ++a) actions_.push_back("a" + std::to_string(a));
}

double LineOracle::utility(std::size_t type, double state, std::size_t action) const {
  const double n = static_cast<double>(num_types());
  const std::size_t m = num_actions();
  const double point = m == 1 ? 0.5 : static_cast<double>(action) / static_cast<double>(m - 1);
  const double target = state + 0.3 * static_cast<double>(type) / n;
  const double slope = 1.0 + static_cast<double>(type);
  return std::max(0.0, 1.0 - slope * std::abs(target - point));
}

std::size_t sample_budget(std::size_t n, std::size_t m, double epsilon, double delta, double c) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("scale constant must be positive");
  if (n == 0 || m == 0) throw std::invalid_argument("n and m must be positive");
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double branch = std::min(nn * nn / (epsilon * epsilon), 1.0 / std::pow(epsilon, 4));
  const double k = std::ceil(c * branch * mm * std::log(mm * nn / delta));
  if (!(k < 9.0e15)) throw std::overflow_error("sample budget does not fit in an integer");
  return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

double certified_violation_bound(std::size_t n, std::size_t m, std::size_t K, double delta) {
  if (K == 0) return std::numeric_limits<double>::infinity();
  const double mm = static_cast<double>(m);
  return 2.0 * std::sqrt(mm * std::log(2.0 * mm * static_cast<double>(n) / delta) / static_cast<double>(K));
}

}  // namespace infomenu
