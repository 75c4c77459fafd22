// nsreg: simulate periodic Navier-Stokes flows and evaluate the velocity-direction
// regularity diagnostics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsreg/runner.hpp"

namespace {

using nsreg::json;

int report_error(nsreg::ErrorKind kind, const std::string& tag, const std::string& message) {
  const int code = static_cast<int>(kind);
  const char* name = kind == nsreg::ErrorKind::config ? "config" : kind == nsreg::ErrorKind::io ? "io" : "numerical";
  json err = {{"error", {{"kind", name}, {"tag", tag}, {"exit_code", code}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

template <class T>
std::vector<T> split_list(const std::string& text, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(convert(item));
    } catch (const std::logic_error&) {
      throw nsreg::ConfigError("cannot parse list item '" + item + "'");
    }
  }
  return out;
}

std::size_t to_size(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoul(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

int cmd_run(const std::string& config_path) {
  const auto cfg = nsreg::load_sim_config(config_path);
  const auto result = nsreg::run_simulation(cfg);
  std::cout << "steps " << result.records.size() - 1 << ", t = " << result.final_state.time << '\n';
  if (cfg.json_path.empty()) std::cout << result.summary.dump(2) << '\n';
  return 0;
}

int cmd_check_criterion(const std::string& p_text, const std::string& q_text) {
  nsreg::CriterionSpec spec;
  try {
    spec.p = nsreg::Exponent::parse(p_text);
    spec.q = nsreg::Exponent::parse(q_text);
  } catch (const std::invalid_argument& e) {
    throw nsreg::ConfigError(std::string("usage: ") + e.what());
  }
  const auto report = nsreg::check_admissibility(spec);
  std::cout << "(p, q) = (" << spec.p.str() << ", " << spec.q.str() << ")\n";
  for (const auto& c : report.checks) {
    std::cout << "  " << (c.satisfied ? "ok   " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  std::cout << (report.admissible() ? "admissible" : "inadmissible") << '\n';
  return report.admissible() ? 0 : 1;
}

int cmd_sweep_identity(const std::string& field, const std::string& resolutions, std::uint64_t seed,
                       const nsreg::DirectionFloors& floors, const std::string& json_path) {
  const auto ns = split_list<std::size_t>(resolutions, &to_size);
  const auto sweep = nsreg::sweep_identity(field, ns, floors, seed);
  std::cout << "field " << sweep.field << " (mask_delta " << floors.mask_delta << ")\n";
  std::cout << "       n   identity_residual\n";
  json rows = json::array();
  for (const auto& row : sweep.rows) {
    char line[96];
    std::snprintf(line, sizeof line, "%8zu   %.6e%s\n", row.n, row.residual, row.degenerate ? "  (degenerate mask)" : "");
    std::cout << line;
    rows.push_back({{"n", row.n}, {"residual", row.residual}, {"degenerate", row.degenerate}});
  }
  std::cout << (sweep.monotone ? "monotone non-increasing" : "NOT monotone") << '\n';
  if (!json_path.empty()) {
    std::ofstream os(json_path);
    if (!os) throw nsreg::IoError("cannot write " + json_path);
    os << json{{"field", sweep.field}, {"rows", rows}, {"monotone", sweep.monotone}}.dump(2) << '\n';
  }
  return sweep.monotone ? 0 : static_cast<int>(nsreg::ErrorKind::numerical);
}

int cmd_sweep_lemma(const std::string& r_list, const std::string& ensemble, const std::string& out_dir) {
  const auto rs = split_list<double>(r_list, &to_double);
  const auto spec = nsreg::parse_ensemble_spec(ensemble);
  const auto reports = nsreg::sweep_lemma(rs, spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  bool all_hold = true;
  for (const auto& rep : reports) {
    char name[64];
    std::snprintf(name, sizeof name, "lemma_r%g.json", rep.r);
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream os(path);
    if (!os) throw nsreg::IoError("cannot write " + path.string());
    os << nsreg::lemma_report_json(rep, spec).dump(2) << '\n';
    std::printf("r = %-5g theta = %-8.5g fitted_C = %.10e  holds = %s  -> %s\n", rep.r, rep.theta,
                rep.fitted_constant, rep.holds ? "yes" : "NO", path.c_str());
    all_hold = all_hold && rep.holds;
  }
  return all_hold ? 0 : static_cast<int>(nsreg::ErrorKind::numerical);
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("NSREG_THREADS")) {
    const int t = std::atoi(threads);
    if (t > 0) nsreg::set_fft_threads(t);
  }

  CLI::App app{"Pseudo-spectral Navier-Stokes solver with velocity-direction regularity diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Simulate a configuration and emit CSV/JSON diagnostics");
  run->add_option("config", config_path, "JSON configuration file")->required();

  std::string p_text, q_text;
  auto* check = app.add_subcommand("check-criterion", "Evaluate admissibility of (p, q)");
  check->add_option("--p", p_text, "time exponent (number, a/b, or inf)")->required();
  check->add_option("--q", q_text, "space exponent (number, a/b, or inf)")->required();

  std::string field = "taylor_green", resolutions = "16,32,64", identity_json;
  std::uint64_t seed = 7;
  nsreg::DirectionFloors floors;
  auto* sweep_id = app.add_subcommand("sweep-identity", "Identity residual under grid refinement");
  sweep_id->add_option("--field", field, "taylor_green | random | shear | constant_direction")->required();
  sweep_id->add_option("--resolutions", resolutions, "comma-separated ascending powers of two")->required();
  sweep_id->add_option("--seed", seed, "seed for the random field");
  sweep_id->add_option("--delta", floors.mask_delta, "mask threshold relative to max|u|");
  sweep_id->add_option("--epsilon-rel", floors.epsilon_rel, "|u| floor relative to max|u|");
  sweep_id->add_option("--json", identity_json, "also write the table as JSON");

  std::string r_list, ensemble = "count=50,n=32,seed=1,peak=3", out_dir = ".";
  auto* sweep_lemma = app.add_subcommand("sweep-lemma", "Fit the interpolation-Sobolev constant per r");
  sweep_lemma->add_option("--r", r_list, "comma-separated r values in [2, 6)")->required();
  sweep_lemma->add_option("--ensemble", ensemble, "count=..,n=..,seed=..,peak=..");
  sweep_lemma->add_option("--out", out_dir, "directory for lemma_r<r>.json reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(nsreg::ErrorKind::config);
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*check) return cmd_check_criterion(p_text, q_text);
    if (*sweep_id) return cmd_sweep_identity(field, resolutions, seed, floors, identity_json);
    if (*sweep_lemma) return cmd_sweep_lemma(r_list, ensemble, out_dir);
  } catch (const nsreg::NumericalError& e) {
    return report_error(e.kind(), e.tag(), e.what());
  } catch (const nsreg::Error& e) {
    return report_error(e.kind(), e.kind() == nsreg::ErrorKind::io ? "io" : "config", e.what());
  } catch (const std::invalid_argument& e) {
    return report_error(nsreg::ErrorKind::config, "config", e.what());
  }
  return 0;
}
