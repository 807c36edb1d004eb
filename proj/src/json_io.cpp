#include "infomenu/json_io.hpp"

#include "infomenu/random.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace infomenu {
namespace {

void require_fields(const Json& j, const std::string& where, const std::set<std::string>& required,
                    const std::set<std::string>& optional = {}) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!required.count(key) && !optional.count(key)) throw SchemaError(where + ": unknown field \"" + key + "\"");
  }
  for (const auto& key : required) {
    if (!j.contains(key)) throw SchemaError(where + ": missing field \"" + key + "\"");
  }
}

const Json& array_at(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  return j;
}

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  std::vector<double> out;
  std::size_t k = 0;
  for (const auto& x : array_at(j, where)) out.push_back(number_at(x, where + "[" + std::to_string(k++) + "]"));
  return out;
}

std::vector<std::string> strings(const Json& j, const std::string& where) {
  std::vector<std::string> out;
  std::size_t k = 0;
  for (const auto& x : array_at(j, where)) {
    if (!x.is_string()) throw SchemaError(where + "[" + std::to_string(k) + "]: expected a string");
    out.push_back(x.get<std::string>());
    ++k;
  }
  return out;
}

Eigen::VectorXd eigen_vector(const std::vector<double>& xs) {
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

std::vector<double> std_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

template <class F>
auto rejected_as_schema(const std::string& what, F&& build) {
  try {
    return build();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(what + " rejected: " + e.what());
  }
}

}  // namespace

FiniteInstance finite_instance_from_json(const Json& j) {
  require_fields(j, "instance", {"states", "prior", "actions", "type_dist", "utilities"});
  auto states = strings(j["states"], "instance.states");
  auto prior = numbers(j["prior"], "instance.prior");
  auto actions = strings(j["actions"], "instance.actions");
  auto f = numbers(j["type_dist"], "instance.type_dist");
  UtilityTensor u;
  std::size_t i = 0;
  for (const auto& type : array_at(j["utilities"], "instance.utilities")) {
    const std::string where = "instance.utilities[" + std::to_string(i++) + "]";
    auto& rows = u.emplace_back();
    std::size_t s = 0;
    for (const auto& row : array_at(type, where)) rows.push_back(numbers(row, where + "[" + std::to_string(s++) + "]"));
  }
  return rejected_as_schema("instance", [&] {
    return FiniteInstance(std::move(states), std::move(prior), std::move(actions), std::move(f), std::move(u));
  });
}

Json to_json(const FiniteInstance& inst) {
  return Json{{"states", inst.states()},
              {"prior", inst.prior()},
              {"actions", inst.actions()},
              {"type_dist", inst.type_dist()},
              {"utilities", inst.utilities()}};
}

GaussianInstance gaussian_instance_from_json(const Json& j) {
  require_fields(j, "instance", {"d", "thetas", "type_dist"});
  if (!j["d"].is_number_unsigned()) throw SchemaError("instance.d: expected a positive integer");
  const auto d = j["d"].get<std::size_t>();
  std::vector<Eigen::VectorXd> thetas;
  std::size_t i = 0;
  for (const auto& th : array_at(j["thetas"], "instance.thetas")) {
    thetas.push_back(eigen_vector(numbers(th, "instance.thetas[" + std::to_string(i++) + "]")));
  }
  auto f = numbers(j["type_dist"], "instance.type_dist");
  return rejected_as_schema("instance", [&] { return GaussianInstance(d, std::move(thetas), std::move(f)); });
}

Json to_json(const GaussianInstance& inst) {
  Json thetas = Json::array();
  for (const auto& th : inst.thetas()) thetas.push_back(std_vector(th));
  return Json{{"d", inst.dim()}, {"thetas", thetas}, {"type_dist", inst.type_dist()}};
}

Json to_json(const Menu& menu, std::string_view status) {
  Json entries = Json::array();
  for (const auto& e : menu.entries()) {
    const auto& k = e.experiment.kernel();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(k.rows()));
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
      for (Eigen::Index c = 0; c < k.cols(); ++c) rows[static_cast<std::size_t>(r)].push_back(k(r, c));
    }
    entries.push_back({{"kernel", rows}, {"price", e.price}, {"signals", e.experiment.signals()}});
  }
  return Json{{"entries", entries}, {"revenue", menu.revenue()}, {"status", status}};
}

Menu finite_menu_from_json(const Json& j, const FiniteInstance& inst) {
  require_fields(j, "menu", {"entries"}, {"revenue", "status", "max_violation"});
  std::vector<MenuEntry> entries;
  std::size_t i = 0;
  for (const auto& e : array_at(j["entries"], "menu.entries")) {
    const std::string where = "menu.entries[" + std::to_string(i++) + "]";
    require_fields(e, where, {"kernel", "price"}, {"signals"});
    std::vector<std::vector<double>> rows;
    std::size_t s = 0;
    for (const auto& row : array_at(e["kernel"], where + ".kernel")) {
      rows.push_back(numbers(row, where + ".kernel[" + std::to_string(s++) + "]"));
    }
    if (rows.size() != inst.num_states()) throw SchemaError(where + ".kernel: one row per state expected");
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw SchemaError(where + ".kernel: ragged rows");
      for (std::size_t c = 0; c < cols; ++c) k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    std::vector<std::string> signals;
    if (e.contains("signals")) {
      signals = strings(e["signals"], where + ".signals");
    } else {
      for (std::size_t c = 0; c < cols; ++c) signals.push_back(c < inst.num_actions() ? inst.actions()[c] : "s" + std::to_string(c));
    }
    const double price = number_at(e["price"], where + ".price");
    entries.push_back(rejected_as_schema(where, [&] { return MenuEntry{Experiment(signals, k), price}; }));
  }
  return rejected_as_schema("menu", [&] { return Menu(std::move(entries), inst.type_dist()); });
}

Json to_json(const GaussianMenu& menu, const std::vector<double>& type_dist, std::string_view status) {
  Json entries = Json::array();
  for (const auto& e : menu.entries) {
    entries.push_back({{"v", std_vector(e.experiment.v)}, {"sigma2", e.experiment.sigma2}, {"price", e.price}});
  }
  return Json{{"entries", entries}, {"revenue", menu.revenue(type_dist)}, {"status", status}};
}

GaussianMenu gaussian_menu_from_json(const Json& j, std::size_t d) {
  require_fields(j, "menu", {"entries"}, {"revenue", "status"});
  GaussianMenu menu;
  std::size_t i = 0;
  for (const auto& e : array_at(j["entries"], "menu.entries")) {
    const std::string where = "menu.entries[" + std::to_string(i++) + "]";
    require_fields(e, where, {"v", "sigma2", "price"});
    ScalarGaussianExperiment exp{eigen_vector(numbers(e["v"], where + ".v")), number_at(e["sigma2"], where + ".sigma2")};
    if (static_cast<std::size_t>(exp.v.size()) != d) throw SchemaError(where + ".v: wrong dimension");
    rejected_as_schema(where, [&] {
      exp.validate();
      return 0;
    });
    menu.entries.push_back({exp, number_at(e["price"], where + ".price")});
  }
  return menu;
}

Json to_json(const ViolationReport& report) {
  Json residuals = Json::array();
  for (const auto& r : report.residuals) residuals.push_back({{"label", r.label}, {"value", r.value}});
  return Json{{"pass", report.pass},
              {"tolerance", report.tolerance},
              {"max_residual", report.max_residual},
              {"residuals", residuals}};
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

std::uint64_t canonical_hash(const Json& j) { return fnv1a(j.dump()); }

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace infomenu
