#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsreg/diagnostics.hpp"
#include "nsreg/direction.hpp"
#include "nsreg/error.hpp"
#include "nsreg/exponents.hpp"
#include "nsreg/gronwall.hpp"
#include "nsreg/inequality_lab.hpp"
#include "nsreg/initial_conditions.hpp"
#include "nsreg/snapshot.hpp"
#include "nsreg/solver.hpp"

namespace nsreg {

using json = nlohmann::json;

inline constexpr const char* kCsvHeader =
    "time,energy,grad_sq,l3_cubed,flux,dirdiv_Lq,weighted_dirdiv,serrin_l9,criterion_accum,serrin_accum,"
    "identity_residual,gronwall_margin";

struct InitialCondition {
  enum class Kind { taylor_green, random, snapshot } kind = Kind::taylor_green;
  std::uint64_t seed = 1;
  int spectrum_peak = 3;
  double amplitude = 1.0;
  std::string path;
};

struct SimConfig {
  std::size_t n = 32;
  double dealias_fraction = 2.0 / 3.0;
  SolverConfig solver;
  InitialCondition initial;
  std::string p = "inf", q = "6", b = "6";
  bool monitor_only = false;
  DirectionFloors floors;
  double gronwall_slack = 1e-8;
  std::optional<double> gronwall_constant;
  std::string csv_path;
  std::string json_path;
  long snapshot_every = 0;
  std::string snapshot_prefix = "snapshot_";
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline std::string exponent_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    return os.str();
  }
  throw ConfigError("exponent must be a number or a string such as \"inf\"");
}

}  // namespace detail

/// Parses the JSON run configuration. Every field except "n", "viscosity",
/// "dt" and "t_end" is optional.
inline SimConfig parse_sim_config(const json& j) {
  SimConfig cfg;
  try {
    const json& grid = j.contains("grid") ? j.at("grid") : j;
    cfg.n = grid.at("n").get<std::size_t>();
    cfg.dealias_fraction = detail::get_or(grid, "dealias_fraction", cfg.dealias_fraction);
    cfg.solver.viscosity = j.at("viscosity").get<double>();
    cfg.solver.dt = j.at("dt").get<double>();
    cfg.solver.t_end = j.at("t_end").get<double>();
    cfg.solver.cfl_limit = detail::get_or(j, "cfl_limit", cfg.solver.cfl_limit);

    if (j.contains("initial_condition")) {
      const json& ic = j.at("initial_condition");
      const std::string type = ic.is_string() ? ic.get<std::string>() : ic.at("type").get<std::string>();
      if (type == "taylor_green") {
        cfg.initial.kind = InitialCondition::Kind::taylor_green;
      } else if (type == "random") {
        cfg.initial.kind = InitialCondition::Kind::random;
        cfg.initial.seed = detail::get_or<std::uint64_t>(ic, "seed", 1);
        cfg.initial.spectrum_peak = detail::get_or(ic, "spectrum_peak", 3);
        cfg.initial.amplitude = detail::get_or(ic, "amplitude", 1.0);
      } else if (type == "snapshot") {
        cfg.initial.kind = InitialCondition::Kind::snapshot;
        cfg.initial.path = ic.at("path").get<std::string>();
      } else {
        throw ConfigError("unknown initial_condition type '" + type + "'");
      }
    }
    if (j.contains("criterion")) {
      const json& c = j.at("criterion");
      if (c.contains("p")) cfg.p = detail::exponent_text(c.at("p"));
      if (c.contains("q")) cfg.q = detail::exponent_text(c.at("q"));
      if (c.contains("b")) cfg.b = detail::exponent_text(c.at("b"));
      cfg.monitor_only = detail::get_or(c, "monitor_only", false);
    }
    if (j.contains("floors")) {
      cfg.floors.epsilon_rel = detail::get_or(j.at("floors"), "epsilon_rel", cfg.floors.epsilon_rel);
      cfg.floors.mask_delta = detail::get_or(j.at("floors"), "mask_delta", cfg.floors.mask_delta);
    }
    if (j.contains("gronwall")) {
      cfg.gronwall_slack = detail::get_or(j.at("gronwall"), "slack", cfg.gronwall_slack);
      if (j.at("gronwall").contains("constant")) cfg.gronwall_constant = j.at("gronwall").at("constant").get<double>();
    }
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      cfg.csv_path = detail::get_or<std::string>(o, "csv_path", "");
      cfg.json_path = detail::get_or<std::string>(o, "json_path", "");
      cfg.snapshot_every = detail::get_or(o, "snapshot_every", 0L);
      cfg.snapshot_prefix = detail::get_or<std::string>(o, "snapshot_prefix", cfg.snapshot_prefix);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  try {
    cfg.solver.validate();
    cfg.floors.validate();
    Grid(cfg.n, cfg.dealias_fraction);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (cfg.snapshot_every < 0) throw ConfigError("invalid config: snapshot_every must be >= 0");
  return cfg;
}

inline SimConfig load_sim_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_sim_config(j);
}

namespace detail {

/// Budget used for the run. Monitor-only runs of inadmissible exponents still
/// get the bookkeeping, with the failed admissibility constraints appended.
inline ExponentBudget run_budget(const SimConfig& cfg) {
  Exponent p = Exponent::infinity(), q = Exponent::infinity(), b = Exponent::infinity();
  try {
    p = Exponent::parse(cfg.p);
    q = Exponent::parse(cfg.q);
    b = Exponent::parse(cfg.b);
    return exponent_budget(p, q, b);
  } catch (const InadmissibleCriterion& e) {
    if (!cfg.monitor_only) {
      throw ConfigError(std::string(e.what()) + " (set criterion.monitor_only to run anyway)");
    }
    ExponentBudget budget = assemble_budget(p, q, b);
    const auto& failed = e.report().checks;
    budget.checks.insert(budget.checks.begin(), failed.begin(), failed.end());
    return budget;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid criterion: ") + e.what());
  }
}

inline json checks_json(const std::vector<ConstraintCheck>& checks) {
  json arr = json::array();
  for (const auto& c : checks) arr.push_back({{"constraint", c.name}, {"satisfied", c.satisfied}, {"evaluation", c.detail}});
  return arr;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline SolverState initial_state(const SimConfig& cfg) {
  const Grid grid(cfg.n, cfg.dealias_fraction);
  switch (cfg.initial.kind) {
    case InitialCondition::Kind::taylor_green:
      return {0.0, initial_taylor_green(grid), 0};
    case InitialCondition::Kind::random:
      try {
        return {0.0, initial_random_divfree(grid, cfg.initial.seed, cfg.initial.spectrum_peak, cfg.initial.amplitude), 0};
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid random initial condition: ") + e.what());
      }
    case InitialCondition::Kind::snapshot: {
      Snapshot snap = read_snapshot(cfg.initial.path);
      if (snap.velocity.grid().n() != cfg.n) {
        throw ConfigError("snapshot grid n = " + std::to_string(snap.velocity.grid().n()) +
                          " does not match config n = " + std::to_string(cfg.n));
      }
      VectorField u(Grid(cfg.n, cfg.dealias_fraction));
      for (int c = 0; c < 3; ++c) {
        std::copy(snap.velocity[c].values().begin(), snap.velocity[c].values().end(), u[c].values().begin());
      }
      return {snap.time, std::move(u), 0};
    }
  }
  throw ConfigError("unreachable initial condition");
}

struct RunResult {
  std::vector<DiagnosticsRecord> records;  // index 0 is the initial state
  GronwallReport gronwall;
  bool gronwall_evaluated = false;
  std::vector<double> energy_residuals;
  SolverState final_state;
  ExponentBudget budget;
  json summary;
};

/// Steps the solver to t_end, recording diagnostics after every step and
/// writing snapshots when configured. Does not write the CSV/JSON outputs.
inline RunResult simulate(const SimConfig& cfg) {
  ExponentBudget budget = detail::run_budget(cfg);
  SolverState state = initial_state(cfg);
  DiagnosticsTracker tracker(budget, cfg.floors);
  tracker.observe(state.time, state.velocity);

  const long steps = step_count(state.time, cfg.solver.t_end, cfg.solver.dt);
  for (long s = 0; s < steps; ++s) {
    state = step(state, cfg.solver);
    const auto& rec = tracker.observe(state.time, state.velocity);
    if (!std::isfinite(rec.energy)) {
      throw NumericalError("non-finite diagnostics at step " + std::to_string(state.step_index), "nan");
    }
    if (cfg.snapshot_every > 0 && state.step_index % cfg.snapshot_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "%06ld.nsrg", state.step_index);
      write_snapshot(cfg.snapshot_prefix + name, state.time, state.velocity);
    }
  }

  RunResult result{std::move(tracker.records()), {}, false, {}, std::move(state), budget, json::object()};
  result.energy_residuals = energy_balance_residuals(result.records, cfg.solver.viscosity);
  result.gronwall_evaluated = budget.valid();
  if (result.gronwall_evaluated) {
    result.gronwall = gronwall_check(result.records, budget,
                                     {cfg.solver.viscosity, cfg.gronwall_slack, cfg.gronwall_constant});
    for (std::size_t m = 1; m < result.records.size(); ++m) result.records[m].gronwall_margin = result.gronwall.margins[m - 1];
  }

  const auto& recs = result.records;
  bool strictly_decreasing = true;
  double max_identity = 0.0, max_flux_rel = 0.0;
  for (std::size_t m = 0; m < recs.size(); ++m) {
    if (m > 0 && !(recs[m].energy < recs[m - 1].energy)) strictly_decreasing = false;
    max_identity = std::max(max_identity, recs[m].identity_residual);
    if (recs[m].flux > 0.0) {
      max_flux_rel = std::max(max_flux_rel, std::abs(recs[m].flux - recs[m].flux_gradient_form) / recs[m].flux);
    }
  }
  double max_balance = 0.0;
  for (double r : result.energy_residuals) max_balance = std::max(max_balance, r);

  json s;
  s["grid_n"] = cfg.n;
  s["viscosity"] = cfg.solver.viscosity;
  s["dt"] = cfg.solver.dt;
  s["t_start"] = recs.front().time;
  s["t_final"] = recs.back().time;
  s["steps"] = recs.size() - 1;
  const auto admissibility = check_admissibility({budget.p, budget.q});
  s["criterion"] = {{"p", budget.p.str()},
                    {"q", budget.q.str()},
                    {"b", budget.b.str()},
                    {"admissible", admissibility.admissible()},
                    {"monitor_only", cfg.monitor_only},
                    {"checks", detail::checks_json(admissibility.checks)}};
  s["budget"] = {{"a", budget.a.str()},     {"p_bar", budget.p_bar.str()}, {"q_bar", budget.q_bar.str()},
                 {"r", budget.r.str()},     {"theta", budget.theta.str()}, {"valid", budget.valid()},
                 {"checks", detail::checks_json(budget.checks)}};
  const double crit_integral = recs.back().criterion_accum;
  s["accumulators"] = {
      {"criterion_integral", crit_integral},
      {"criterion_mixed_norm", budget.p.is_infinite() ? crit_integral : std::pow(crit_integral, budget.p.reciprocal().value())},
      {"serrin_accum", recs.back().serrin_accum}};
  if (result.gronwall_evaluated) {
    double min_margin = 0.0;
    for (double m : result.gronwall.margins) min_margin = std::min(min_margin, m);
    s["gronwall"] = {{"constant", result.gronwall.constant},
                     {"fitted", !cfg.gronwall_constant.has_value()},
                     {"feasible", result.gronwall.feasible},
                     {"envelope_dominates", result.gronwall.envelope_dominates},
                     {"min_margin", min_margin},
                     {"slack", cfg.gronwall_slack}};
  } else {
    s["gronwall"] = {{"evaluated", false}};
  }
  s["energy"] = {{"initial", recs.front().energy},
                 {"final", recs.back().energy},
                 {"strictly_decreasing", strictly_decreasing},
                 {"max_balance_residual", max_balance}};
  s["identity"] = {{"max_residual", max_identity}};
  s["flux_identity_max_relative_error"] = max_flux_rel;
  result.summary = std::move(s);
  return result;
}

inline void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records, std::size_t first = 1) {
  os << kCsvHeader << '\n';
  for (std::size_t m = first; m < records.size(); ++m) {
    const auto& r = records[m];
    const double row[] = {r.time,         r.energy,          r.grad_sq,         r.l3_cubed,
                          r.flux,         r.dirdiv_Lq,       r.weighted_dirdiv, r.serrin_l9,
                          r.criterion_accum, r.serrin_accum, r.identity_residual, r.gronwall_margin};
    for (std::size_t c = 0; c < std::size(row); ++c) os << (c ? "," : "") << detail::format_double(row[c]);
    os << '\n';
  }
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open output for writing: " + path);
  return os;
}

}  // namespace detail

/// Full pipeline: simulate, then write the CSV time series and JSON summary.
inline RunResult run_simulation(const SimConfig& cfg) {
  // Fail on unwritable outputs before spending time on the run.
  std::optional<std::ofstream> csv, summary;
  if (!cfg.csv_path.empty()) csv.emplace(detail::open_output(cfg.csv_path));
  if (!cfg.json_path.empty()) summary.emplace(detail::open_output(cfg.json_path));

  RunResult result = simulate(cfg);
  if (csv) {
    write_csv(*csv, result.records);
    if (!*csv) throw IoError("failed writing " + cfg.csv_path);
  }
  if (summary) {
    *summary << result.summary.dump(2) << '\n';
    if (!*summary) throw IoError("failed writing " + cfg.json_path);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Identity refinement sweep

inline VectorField named_test_field(const std::string& name, const Grid& grid, std::uint64_t seed = 7) {
  if (name == "taylor_green") return initial_taylor_green(grid);
  if (name == "random") return initial_random_divfree(grid, seed, 3, 1.0);
  if (name == "shear") {
    return VectorField::sample(grid, [](double, double y, double) { return std::array<double, 3>{std::sin(y), 0.0, 0.0}; });
  }
  if (name == "constant_direction") {
    return VectorField::sample(grid, [](double, double, double) { return std::array<double, 3>{1.0, 0.0, 0.0}; });
  }
  throw ConfigError("unknown field '" + name + "' (taylor_green, random, shear, constant_direction)");
}

struct IdentitySweepRow {
  std::size_t n;
  double residual;
  bool degenerate;
};

struct IdentitySweep {
  std::string field;
  std::vector<IdentitySweepRow> rows;
  bool monotone = true;  // residual non-increasing under refinement
};

inline IdentitySweep sweep_identity(const std::string& field, const std::vector<std::size_t>& resolutions,
                                    const DirectionFloors& floors = {}, std::uint64_t seed = 7) {
  if (resolutions.empty()) throw ConfigError("sweep_identity: no resolutions given");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    const std::size_t n = resolutions[i];
    if (n < 4 || (n & (n - 1)) != 0) throw ConfigError("sweep_identity: resolution " + std::to_string(n) + " is not a power of two >= 4");
    if (i > 0 && n <= resolutions[i - 1]) throw ConfigError("sweep_identity: resolutions must be ascending");
  }
  IdentitySweep out{field, {}, true};
  for (std::size_t n : resolutions) {
    const Grid grid(n);
    const auto res = identity_residual(named_test_field(field, grid, seed), floors);
    out.rows.push_back({n, res.value, res.degenerate});
    if (out.rows.size() > 1 && out.rows.back().residual > out.rows[out.rows.size() - 2].residual) out.monotone = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lemma sweep

struct EnsembleSpec {
  std::size_t count = 50;
  std::size_t n = 32;
  std::uint64_t seed = 1;
  int spectrum_peak = 3;
};

/// "count=50,n=32,seed=1,peak=3"; omitted keys keep their defaults.
inline EnsembleSpec parse_ensemble_spec(const std::string& text) {
  EnsembleSpec spec;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("ensemble spec item '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    try {
      if (key == "count") spec.count = std::stoul(value);
      else if (key == "n") spec.n = std::stoul(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "peak") spec.spectrum_peak = std::stoi(value);
      else throw ConfigError("unknown ensemble key '" + key + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad ensemble value '" + value + "' for " + key);
    }
  }
  return spec;
}

inline std::vector<ScalarField> build_ensemble(const EnsembleSpec& spec) {
  if (spec.count == 0) throw ConfigError("empty ensemble");
  try {
    const Grid grid(spec.n);
    std::vector<ScalarField> out;
    out.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) out.push_back(random_band_limited_scalar(grid, spec.seed + i, spec.spectrum_peak));
    return out;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid ensemble: ") + e.what());
  }
}

inline json lemma_report_json(const LemmaReport& rep, const EnsembleSpec& spec) {
  return {{"r", rep.r},
          {"theta", rep.theta},
          {"beta_grid", rep.beta_grid},
          {"fitted_C", rep.fitted_constant},
          {"worst_case", {{"member", rep.worst_member}, {"seed", spec.seed + rep.worst_member}, {"beta", rep.worst_beta}}},
          {"holds", rep.holds},
          {"domain", "periodic box [0, 2pi)^3"},
          {"ensemble", {{"count", spec.count}, {"n", spec.n}, {"seed", spec.seed}, {"spectrum_peak", spec.spectrum_peak}}}};
}

inline std::vector<LemmaReport> sweep_lemma(const std::vector<double>& r_grid, const EnsembleSpec& spec,
                                            const std::vector<double>& beta_grid = default_beta_grid()) {
  if (r_grid.empty()) throw ConfigError("sweep_lemma: no r values");
  for (double r : r_grid) {
    if (!(r >= 2.0 && r < 6.0)) throw ConfigError("sweep_lemma: r = " + detail::format_double(r) + " outside [2, 6)");
  }
  const auto ensemble = build_ensemble(spec);
  std::vector<LemmaReport> out;
  for (double r : r_grid) out.push_back(lemma1_verify(ensemble, r, beta_grid));
  return out;
}

}  // namespace nsreg
