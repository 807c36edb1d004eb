#pragma once

// Small fixed instances shared by the unit tests.

#include "infomenu/core_model.hpp"

#include <random>
#include <string>
#include <vector>

namespace testing_support {

// Two equally likely states; the buyer gets 1 for naming the state, else 0.
inline infomenu::FiniteInstance matching_instance(std::size_t copies = 1) {
  infomenu::UtilityTensor u(copies, {{1.0, 0.0}, {0.0, 1.0}});
  return {{"w1", "w2"}, {0.5, 0.5}, {"a1", "a2"}, std::vector<double>(copies, 1.0 / static_cast<double>(copies)), u};
}

// Three states with prior (0.5, 0.3, 0.2), two actions, two types. Utilities
// were drawn once and frozen here.
inline infomenu::FiniteInstance three_state_instance() {
  return {{"w1", "w2", "w3"},
          {0.5, 0.3, 0.2},
          {"a1", "a2"},
          {0.6, 0.4},
          {{{0.81, 0.12}, {0.27, 0.64}, {0.05, 0.93}}, {{0.33, 0.71}, {0.90, 0.18}, {0.44, 0.46}}}};
}

inline infomenu::FiniteInstance random_finite(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t states) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> prior(states), f(n);
  double sp = 0.0, sf = 0.0;
  for (auto& p : prior) sp += (p = ex(rng) + 1e-3);
  for (auto& p : f) sf += (p = ex(rng) + 1e-3);
  for (auto& p : prior) p /= sp;
  for (auto& p : f) p /= sf;
  infomenu::UtilityTensor u(n, std::vector<std::vector<double>>(states, std::vector<double>(m)));
  for (auto& t : u)
    for (auto& row : t)
      for (auto& x : row) x = unif(rng);
  std::vector<std::string> sn, an;
  for (std::size_t s = 0; s < states; ++s) sn.push_back("w" + std::to_string(s + 1));
  for (std::size_t a = 0; a < m; ++a) an.push_back("a" + std::to_string(a + 1));
  return {sn, prior, an, f, u};
}

}  // namespace testing_support
