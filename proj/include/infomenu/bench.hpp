#pragma once

// Benchmarks and reference constructions: the single-item revenue baseline,
// the differentiated-values Gaussian family, a grid oracle for Gaussian menus
// and reproducible random instances.

#include "infomenu/core_model.hpp"
#include "infomenu/gaussian_pricing.hpp"

#include <cstdint>
#include <vector>

namespace infomenu {

// Best revenue from one posted price for a single product, where type i
// values the product at surplus[i]: max over t in surplus of t * f{i : s_i >= t}.
double single_price_revenue(const std::vector<double>& surplus, const std::vector<double>& type_dist);

// Single-item baseline for the Gaussian model: the product reveals the state,
// so type i values it at |theta_i|^2.
double single_item_full_revelation_revenue(const GaussianInstance& inst);

// Single-item baseline for a finite instance: full revelation sold at one
// price, type i valuing it at its full-information surplus.
double single_item_full_revelation_revenue(const FiniteInstance& inst);

// theta_i = alpha^{-i/2} e_i and f_i = alpha^i / sum_k alpha^k for i = 1..n,
// in dimension d = n.
GaussianInstance build_diff_value_instance(std::size_t n, double alpha);

struct GaussianGridResult {
  double revenue = 0.0;
  // Reported Lipschitz gap: max_i 2|theta_i|(1 + |theta_i|) * step * sqrt(d).
  double gap = 0.0;
  std::size_t candidates = 0;
  std::vector<std::size_t> frontier_sizes;
  GaussianMenu menu;
};

// Enumerates directions on a grid over the unit ball (plus their normalized
// versions), prices every assignment of directions to types exactly, and
// returns the best menu found. Requires d <= 3 and n <= 3.
GaussianGridResult gaussian_grid_oracle(const GaussianInstance& inst, double step);

// Uniform utilities in [0, 1]; prior and type distribution from normalized
// exponential draws. Reproducible for a fixed seed on every platform.
FiniteInstance random_instance(std::size_t n, std::size_t m, std::size_t num_states, std::uint64_t seed);

// Standard normal theta entries and a normalized exponential type distribution.
GaussianInstance random_gaussian_instance(std::size_t n, std::size_t d, std::uint64_t seed);

// Shapes of the pinned corpus. Finite seeds cycle (states, actions) through
// (2,2), (3,2), (4,2), (2,3) and the type count through 1..3; Gaussian seeds
// cycle d through 1..4 and n through 1..4.
struct FiniteShape {
  std::size_t types = 1;
  std::size_t actions = 2;
  std::size_t states = 2;
};
FiniteShape finite_corpus_shape(std::uint64_t seed);
FiniteInstance finite_corpus_instance(std::uint64_t seed);

struct GaussianShape {
  std::size_t types = 1;
  std::size_t dim = 1;
};
GaussianShape gaussian_corpus_shape(std::uint64_t seed);
GaussianInstance gaussian_corpus_instance(std::uint64_t seed);

}  // namespace infomenu
