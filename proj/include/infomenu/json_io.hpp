#pragma once

// JSON forms of instances, menus and lazy transcripts. Readers are strict:
// unknown or missing fields raise SchemaError with the offending path.

#include "infomenu/core_model.hpp"
#include "infomenu/gaussian_pricing.hpp"
#include "infomenu/lazy_mechanism.hpp"
#include "infomenu/verification.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace infomenu {

using Json = nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"states", "prior", "actions", "type_dist", "utilities"[type][state][action]}
FiniteInstance finite_instance_from_json(const Json& j);
Json to_json(const FiniteInstance& inst);

// {"d", "thetas", "type_dist"}
GaussianInstance gaussian_instance_from_json(const Json& j);
Json to_json(const GaussianInstance& inst);

// {"entries": [{"kernel", "price", "signals"?}], "revenue", "status"}
Json to_json(const Menu& menu, std::string_view status);
Menu finite_menu_from_json(const Json& j, const FiniteInstance& inst);

// {"entries": [{"v", "sigma2", "price"}], "revenue", "status"}
Json to_json(const GaussianMenu& menu, const std::vector<double>& type_dist, std::string_view status);
GaussianMenu gaussian_menu_from_json(const Json& j, std::size_t d);

Json to_json(const ViolationReport& report);

template <class State>
Json to_json(const LazyTranscript<State>& t) {
  return Json{{"seed", t.seed},
              {"declared_type", t.declared_type},
              {"num_samples", t.num_samples},
              {"samples", t.samples},
              {"permutation", t.permutation},
              {"realized_position", t.realized_position},
              {"lp_status", std::string(conic::to_string(t.lp_status))},
              {"lp_objective", t.lp_objective},
              {"lp_residual", t.lp_residual},
              {"lp_iterations", t.lp_iterations},
              {"empirical_violation", t.empirical_violation},
              {"certified_bound", t.certified_bound},
              {"kernel_row", t.kernel_row},
              {"signal", t.signal},
              {"signal_label", t.signal_label},
              {"price", t.price}};
}

// Parses a file's contents, turning syntax errors into SchemaError.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

// FNV-1a 64 of the compact dump. Object keys are sorted and numbers printed
// shortest round-trip, so equal documents hash equally on every platform.
std::uint64_t canonical_hash(const Json& j);
std::string hex_hash(std::uint64_t h);

}  // namespace infomenu
