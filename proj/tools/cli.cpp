#include "cli.hpp"

#include "infomenu/bench.hpp"
#include "infomenu/gaussian_pricing.hpp"
#include "infomenu/json_io.hpp"
#include "infomenu/lazy_mechanism.hpp"
#include "infomenu/menu_lp.hpp"
#include "infomenu/verification.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace infomenu::cli {
namespace {

constexpr const char* kTolEnv = "INFOMENU_SOLVER_TOL";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string menu_path;
  std::string output;
  std::uint64_t seed = 0;
  double solver_tol = conic::SolveParams{}.tolerance;
  double check_tol = 1e-6;

  // lazy and lazy-revenue
  std::string builtin;
  std::size_t builtin_types = 2;
  std::size_t builtin_actions = 3;
  std::size_t type = 0;
  std::string state;
  bool sample_state = false;
  double epsilon = 0.1;
  double delta = 0.1;
  double scale = 1.0;
  std::size_t samples = 0;
  std::size_t trials = 500;
  unsigned workers = 0;

  // gaussian, check, bench-diff, gen-corpus
  bool lift = false;
  bool check_surplus = false;
  double grid_step = 0.0;
  bool gaussian_menu = false;
  std::size_t n = 2;
  std::vector<double> alphas{0.1};
  std::size_t count = 100;
};

conic::SolveParams solver_params(const RunConfig& cfg) {
  conic::SolveParams p;
  p.tolerance = cfg.solver_tol;
  return p;
}

Json envelope(const RunConfig& cfg) {
  return Json{{"command", cfg.command},
              {"version", INFOMENU_VERSION},
              {"seed", cfg.seed},
              {"tolerances", {{"solver", cfg.solver_tol}, {"check", cfg.check_tol}}}};
}

int status_exit(conic::Status s) {
  switch (s) {
    case conic::Status::optimal:
      return kOk;
    case conic::Status::infeasible:
    case conic::Status::unbounded:
      return kFail;
    case conic::Status::numerical_failure:
      return kNumerical;
  }
  return kNumerical;
}

std::string status_name(conic::Status s) { return std::string(conic::to_string(s)); }

// ---------------------------------------------------------------- solve-exact

int cmd_solve_exact(const RunConfig& cfg, Json& out) {
  const auto inst = finite_instance_from_json(read_json_file(cfg.input));
  const auto report = solve_exact(inst, solver_params(cfg));
  Json r{{"status", status_name(report.status)},
         {"revenue", report.objective},
         {"full_info_revenue", full_info_revenue(inst)},
         {"single_item_revenue", single_item_full_revelation_revenue(inst)},
         {"max_constraint_residual", report.max_constraint_residual},
         {"iterations", report.iterations},
         {"has_negative_price", report.has_negative_price},
         {"ir_slack", report.ir_slack}};
  int code = status_exit(report.status);
  if (report.menu) {
    const auto check = check_ic_ir(inst, *report.menu, cfg.check_tol);
    r["menu"] = to_json(*report.menu, conic::to_string(report.status));
    r["violations"] = to_json(check);
    if (code == kOk && !check.pass) code = kFail;
  }
  out["result"] = std::move(r);
  return code;
}

// ----------------------------------------------------------------------- lazy

std::size_t budget(const RunConfig& cfg, std::size_t n, std::size_t m) {
  if (cfg.samples > 0) return cfg.samples;
  return sample_budget(n, m, cfg.epsilon, cfg.delta, cfg.scale);
}

LazyParams lazy_params(const RunConfig& cfg) {
  LazyParams p;
  p.delta = cfg.delta;
  p.solver = solver_params(cfg);
  return p;
}

std::size_t finite_state(const RunConfig& cfg, const CategoricalOracle& oracle) {
  if (cfg.sample_state) {
    Rng rng = Rng(cfg.seed).stream("cli-state");
    return oracle.sample(rng);
  }
  const auto& names = oracle.instance().states();
  for (std::size_t s = 0; s < names.size(); ++s) {
    if (names[s] == cfg.state) return s;
  }
  try {
    std::size_t used = 0;
    const auto idx = std::stoull(cfg.state, &used);
    if (used == cfg.state.size() && idx < names.size()) return idx;
  } catch (const std::exception&) {
  }
  throw UsageError("unknown state \"" + cfg.state + "\"");
}

double line_state(const RunConfig& cfg, const LineOracle& oracle) {
  if (cfg.sample_state) {
    Rng rng = Rng(cfg.seed).stream("cli-state");
    return oracle.sample(rng);
  }
  try {
    std::size_t used = 0;
    const double x = std::stod(cfg.state, &used);
    if (used == cfg.state.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("state for the line oracle must be a number in [0, 1]");
}

template <class O, class State>
int run_lazy(const RunConfig& cfg, const O& oracle, const State& state, Json& out) {
  if (cfg.type >= oracle.num_types()) throw UsageError("--type is out of range");
  const std::size_t k = budget(cfg, oracle.num_types(), oracle.num_actions());
  const auto outcome = run_lazy_experiment(oracle, cfg.type, state, k, cfg.seed, lazy_params(cfg));
  out["result"] = Json{{"signal", outcome.signal},
                       {"signal_label", outcome.transcript.signal_label},
                       {"price", outcome.price},
                       {"num_samples", k},
                       {"epsilon", cfg.samples > 0 ? Json() : Json(cfg.epsilon)},
                       {"delta", cfg.delta},
                       {"scale", cfg.scale},
                       {"realized_state", state},
                       {"transcript", to_json(outcome.transcript)}};
  return kOk;
}

void require_source(const RunConfig& cfg) {
  if (cfg.input.empty() == cfg.builtin.empty()) throw UsageError("give exactly one of an instance file or --builtin");
  if (!cfg.builtin.empty() && cfg.builtin != "line") throw UsageError("unknown built-in oracle \"" + cfg.builtin + "\"");
}

int cmd_lazy(const RunConfig& cfg, Json& out) {
  require_source(cfg);
  if (cfg.state.empty() == !cfg.sample_state) throw UsageError("give exactly one of --state or --sample-state");
  if (!cfg.builtin.empty()) {
    const LineOracle oracle(cfg.builtin_types, cfg.builtin_actions);
    return run_lazy(cfg, oracle, line_state(cfg, oracle), out);
  }
  const CategoricalOracle oracle(finite_instance_from_json(read_json_file(cfg.input)));
  return run_lazy(cfg, oracle, finite_state(cfg, oracle), out);
}

template <class O>
Json estimate(const RunConfig& cfg, const O& oracle) {
  const std::size_t k = budget(cfg, oracle.num_types(), oracle.num_actions());
  const auto est = estimate_mechanism_revenue(oracle, k, cfg.trials, cfg.seed, lazy_params(cfg), cfg.workers);
  return Json{{"mean", est.mean},       {"half_width", est.half_width}, {"stddev", est.stddev},
              {"trials", est.trials},   {"num_samples", k},             {"epsilon", cfg.samples > 0 ? Json() : Json(cfg.epsilon)},
              {"delta", cfg.delta},     {"scale", cfg.scale},           {"prices", est.prices}};
}

int cmd_lazy_revenue(const RunConfig& cfg, Json& out) {
  require_source(cfg);
  if (!cfg.builtin.empty()) {
    out["result"] = estimate(cfg, LineOracle(cfg.builtin_types, cfg.builtin_actions));
    return kOk;
  }
  const auto inst = finite_instance_from_json(read_json_file(cfg.input));
  Json r = estimate(cfg, CategoricalOracle(inst));
  const auto exact = solve_exact(inst, solver_params(cfg));
  r["exact_status"] = status_name(exact.status);
  if (exact.status == conic::Status::optimal) {
    const double mean = r["mean"].get<double>(), hw = r["half_width"].get<double>();
    const double slack = cfg.samples > 0 ? 0.0 : cfg.epsilon;
    r["exact_revenue"] = exact.objective;
    r["window"] = {exact.objective - slack - hw, exact.objective + hw};
    r["within_window"] = mean >= exact.objective - slack - hw && mean <= exact.objective + hw;
  }
  out["result"] = std::move(r);
  return kOk;
}

// ------------------------------------------------------------------- gaussian

Json surplus_json(const SurplusCheck& s) {
  return Json{{"holds", s.holds}, {"margin", s.margin}, {"worst_pair", {s.worst_i, s.worst_j}}};
}

int cmd_gaussian(const RunConfig& cfg, Json& out) {
  const auto inst = gaussian_instance_from_json(read_json_file(cfg.input));
  if (cfg.lift && inst.dim() < inst.num_types()) {
    throw UsageError("--lift needs d >= n, got d = " + std::to_string(inst.dim()) +
                     " and n = " + std::to_string(inst.num_types()));
  }
  const auto report = solve_gaussian_menu(inst, solver_params(cfg));
  const double full = full_surplus_revenue(inst);
  Json r{{"status", status_name(report.status)},
         {"revenue", report.revenue},
         {"sdp_objective", report.sdp_objective},
         {"closed_form", report.closed_form},
         {"full_surplus_revenue", full},
         {"single_item_revenue", single_item_full_revelation_revenue(inst)},
         {"surplus", surplus_json(report.surplus)}};
  int code = status_exit(report.status);
  if (report.menu) {
    const auto check = evaluate_gaussian_menu(*report.menu, inst, cfg.check_tol);
    r["menu"] = to_json(*report.menu, inst.type_dist(), conic::to_string(report.status));
    r["violations"] = to_json(check);
    if (code == kOk && !check.pass) code = kFail;
    if (cfg.lift) {
      const auto lifted = lift_to_deterministic(*report.menu, inst);
      const auto lcheck = evaluate_gaussian_menu(lifted, inst, cfg.check_tol);
      r["lifted_menu"] = to_json(lifted, inst.type_dist(), conic::to_string(report.status));
      r["lifted_violations"] = to_json(lcheck);
      if (code == kOk && !lcheck.pass) code = kFail;
    }
  }
  if (cfg.check_surplus && report.status == conic::Status::optimal) {
    const bool attained = report.sdp_objective >= full - 1e-5;
    r["surplus_check"] = {{"separated", report.surplus.holds},
                          {"sdp_attains_full_surplus", attained},
                          {"consistent", attained == report.surplus.holds}};
  }
  if (cfg.grid_step > 0.0) {
    const auto grid = gaussian_grid_oracle(inst, cfg.grid_step);
    const bool ok = grid.revenue <= report.sdp_objective + 1e-6 && report.sdp_objective <= grid.revenue + grid.gap;
    r["grid_check"] = {{"step", cfg.grid_step},
                       {"revenue", grid.revenue},
                       {"gap", grid.gap},
                       {"candidates", grid.candidates},
                       {"consistent", ok}};
    if (code == kOk && !ok) code = kFail;
  }
  out["result"] = std::move(r);
  return code;
}

// ----------------------------------------------------------------- bench-diff

int cmd_bench_diff(const RunConfig& cfg, Json& out) {
  Json rows = Json::array();
  int code = kOk;
  for (double alpha : cfg.alphas) {
    const auto inst = build_diff_value_instance(cfg.n, alpha);
    const auto menu = solve_gaussian_menu(inst, solver_params(cfg));
    const double r_one = single_item_full_revelation_revenue(inst);
    const double r_full = full_surplus_revenue(inst);
    Json row{{"n", cfg.n},
             {"alpha", alpha},
             {"status", status_name(menu.status)},
             {"r_one", r_one},
             {"r_menu", menu.revenue},
             {"r_full_info", r_full},
             {"sdp_objective", menu.sdp_objective},
             {"ratio", r_one / menu.revenue},
             {"ratio_floor", 1.0 / static_cast<double>(cfg.n)}};
    if (alpha < 1.0) {
      const double bound = 1.0 / (static_cast<double>(cfg.n) * (1.0 - alpha));
      row["ratio_bound"] = bound;
      row["within_bound"] = r_one / menu.revenue <= bound;
    } else {
      row["ratio_bound"] = nullptr;
      row["note"] = "the bound 1/(n(1 - alpha)) is undefined at alpha = 1";
    }
    if (menu.status != conic::Status::optimal) code = std::max(code, status_exit(menu.status));
    rows.push_back(std::move(row));
  }
  out["result"] = {{"rows", rows}};
  return code;
}

// ---------------------------------------------------------------------- check

bool is_responsive(const Menu& menu, const FiniteInstance& inst) {
  for (const auto& e : menu.entries()) {
    if (e.experiment.signals() != inst.actions()) return false;
  }
  return true;
}

int cmd_check(const RunConfig& cfg, Json& out) {
  const Json inst_json = read_json_file(cfg.input);
  Json menu_json = read_json_file(cfg.menu_path);
  // A full solve-exact or gaussian output is accepted as well as a bare menu.
  if (menu_json.contains("result") && menu_json["result"].contains("menu")) menu_json = menu_json["result"]["menu"];
  Json r;
  bool pass = true;
  if (cfg.gaussian_menu) {
    const auto inst = gaussian_instance_from_json(inst_json);
    const auto menu = gaussian_menu_from_json(menu_json, inst.dim());
    if (menu.entries.size() != inst.num_types()) throw SchemaError("menu: one entry per type expected");
    const auto report = evaluate_gaussian_menu(menu, inst, cfg.check_tol);
    r = {{"kind", "gaussian"}, {"revenue", menu.revenue(inst.type_dist())}, {"violations", to_json(report)}};
    pass = report.pass;
  } else {
    const auto inst = finite_instance_from_json(inst_json);
    const auto menu = finite_menu_from_json(menu_json, inst);
    if (menu.size() != inst.num_types()) throw SchemaError("menu: one entry per type expected");
    const bool responsive = is_responsive(menu, inst);
    const auto report =
        check_ic_ir(inst, menu, cfg.check_tol, responsive ? OwnValue::responsive : OwnValue::full);
    r = {{"kind", "finite"}, {"revenue", menu.revenue()}, {"responsive", responsive}, {"violations", to_json(report)}};
    pass = report.pass;
    if (responsive) {
      const auto ob = check_obedience(inst, menu, cfg.check_tol);
      r["obedience"] = to_json(ob);
      pass = pass && ob.pass;
    }
  }
  r["pass"] = pass;
  out["result"] = std::move(r);
  return pass ? kOk : kFail;
}

// ----------------------------------------------------------------- gen-corpus

void write_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

int cmd_gen_corpus(const RunConfig& cfg, Json& out) {
  const auto params = solver_params(cfg);
  Json finite = Json::array(), gaussian = Json::array();
  int code = kOk;
  std::optional<std::filesystem::path> dir;
  if (!cfg.menu_path.empty()) {
    dir = cfg.menu_path;
    std::filesystem::create_directories(*dir);
  }
  for (std::uint64_t seed = 0; seed < cfg.count; ++seed) {
    const auto inst = finite_corpus_instance(seed);
    const auto shape = finite_corpus_shape(seed);
    const auto lp = solve_exact(inst, params);
    if (lp.status != conic::Status::optimal) code = std::max(code, status_exit(lp.status));
    const Json ij = to_json(inst);
    finite.push_back({{"seed", seed},
                      {"types", shape.types},
                      {"actions", shape.actions},
                      {"states", shape.states},
                      {"hash", hex_hash(canonical_hash(ij))},
                      {"r_one", single_item_full_revelation_revenue(inst)},
                      {"r_menu", lp.objective},
                      {"r_full_info", full_info_revenue(inst)}});
    if (dir) write_file(*dir / ("finite-" + std::to_string(seed) + ".json"), ij);
  }
  for (std::uint64_t seed = 0; seed < cfg.count; ++seed) {
    const auto inst = gaussian_corpus_instance(seed);
    const auto shape = gaussian_corpus_shape(seed);
    const auto sol = solve_gaussian_menu(inst, params);
    if (sol.status != conic::Status::optimal) code = std::max(code, status_exit(sol.status));
    const Json ij = to_json(inst);
    gaussian.push_back({{"seed", seed},
                        {"types", shape.types},
                        {"dim", shape.dim},
                        {"hash", hex_hash(canonical_hash(ij))},
                        {"r_one", single_item_full_revelation_revenue(inst)},
                        {"r_menu", sol.revenue},
                        {"r_full_info", full_surplus_revenue(inst)},
                        {"separated", sol.surplus.holds}});
    if (dir) write_file(*dir / ("gaussian-" + std::to_string(seed) + ".json"), ij);
  }
  out["result"] = {{"finite", finite}, {"gaussian", gaussian}};
  return code;
}

// ---------------------------------------------------------------------- setup

void add_lazy_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("instance", cfg.input, "Finite instance JSON")->check(CLI::ExistingFile);
  sub->add_option("--builtin", cfg.builtin, "Built-in oracle instead of a file (\"line\")");
  sub->add_option("--builtin-types", cfg.builtin_types, "Types of the built-in oracle")->check(CLI::PositiveNumber);
  sub->add_option("--builtin-actions", cfg.builtin_actions, "Actions of the built-in oracle")->check(CLI::Range(2, 1 << 16));
  sub->add_option("--epsilon", cfg.epsilon, "Target revenue loss");
  sub->add_option("--delta", cfg.delta, "Failure probability");
  sub->add_option("--scale", cfg.scale, "Constant c in the sample budget");
  sub->add_option("-K,--samples", cfg.samples, "Override the sample budget");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv(kTolEnv)) {
    try {
      cfg.solver_tol = std::stod(env);
    } catch (const std::exception&) {
      err << "error: " << kTolEnv << " is not a number\n";
      return kUsage;
    }
  }

  CLI::App app{"Design and verify revenue-maximizing menus of information products"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Root seed for every random stream");
  app.add_option("-o,--output", cfg.output, "Write JSON here instead of stdout");
  app.add_option("--solver-tol", cfg.solver_tol, std::string("Solver tolerance (env ") + kTolEnv + ")")
      ->check(CLI::PositiveNumber);
  app.add_option("--check-tol", cfg.check_tol, "Tolerance of IC/IR verification")->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", INFOMENU_VERSION);

  auto* solve = app.add_subcommand("solve-exact", "Solve the exact menu LP of a finite instance");
  solve->add_option("instance", cfg.input, "Finite instance JSON")->required()->check(CLI::ExistingFile);

  auto* lazy = app.add_subcommand("lazy", "Run the sample-based mechanism once");
  add_lazy_options(lazy, cfg);
  lazy->add_option("--type", cfg.type, "Declared type (zero-based)");
  lazy->add_option("--state", cfg.state, "Realized state: name or index, or a number for --builtin line");
  lazy->add_flag("--sample-state", cfg.sample_state, "Draw the realized state from the prior");

  auto* lazy_rev = app.add_subcommand("lazy-revenue", "Monte Carlo revenue of the sample-based mechanism");
  add_lazy_options(lazy_rev, cfg);
  lazy_rev->add_option("--trials", cfg.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  lazy_rev->add_option("--workers", cfg.workers, "Worker threads (0 = hardware)");

  auto* gauss = app.add_subcommand("gaussian", "Solve the Gaussian menu SDP");
  gauss->add_option("instance", cfg.input, "Gaussian instance JSON")->required()->check(CLI::ExistingFile);
  gauss->add_flag("--lift", cfg.lift, "Also report the deterministic lift");
  gauss->add_flag("--check-surplus", cfg.check_surplus, "Cross-check full surplus against separation");
  gauss->add_option("--grid-check", cfg.grid_step, "Compare with the grid oracle at this step")
      ->check(CLI::Range(1e-6, 1.0));

  auto* bench = app.add_subcommand("bench-diff", "Single-item versus menu revenue on the differentiated family");
  bench->add_option("--n", cfg.n, "Number of types")->check(CLI::PositiveNumber);
  bench->add_option("--alpha", cfg.alphas, "One or more alpha values in (0, 1]");

  auto* check = app.add_subcommand("check", "Verify IC/IR of a menu");
  check->add_option("instance", cfg.input, "Instance JSON")->required()->check(CLI::ExistingFile);
  check->add_option("menu", cfg.menu_path, "Menu JSON")->required()->check(CLI::ExistingFile);
  check->add_flag("--gaussian", cfg.gaussian_menu, "Instance and menu are Gaussian");

  auto* corpus = app.add_subcommand("gen-corpus", "Regenerate the pinned corpus manifest");
  corpus->add_option("--count", cfg.count, "Seeds 0..count-1 per family");
  corpus->add_option("--instances-dir", cfg.menu_path, "Also write every instance here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  Json doc = envelope(cfg);
  int code = kOk;
  try {
    if (cfg.command == "solve-exact") code = cmd_solve_exact(cfg, doc);
    else if (cfg.command == "lazy") code = cmd_lazy(cfg, doc);
    else if (cfg.command == "lazy-revenue") code = cmd_lazy_revenue(cfg, doc);
    else if (cfg.command == "gaussian") code = cmd_gaussian(cfg, doc);
    else if (cfg.command == "bench-diff") code = cmd_bench_diff(cfg, doc);
    else if (cfg.command == "check") code = cmd_check(cfg, doc);
    else if (cfg.command == "gen-corpus") code = cmd_gen_corpus(cfg, doc);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const LazyLpFailure& e) {
    err << "error: " << e.what() << '\n';
    return status_exit(e.status());
  } catch (const std::invalid_argument& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }

  const std::string text = doc.dump(2) + "\n";
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output);
    if (!f) {
      err << "error: cannot write " << cfg.output << '\n';
      return kUsage;
    }
    f << text;
  }
  return code;
}

}  // namespace infomenu::cli
