// qosgame: command-line front end for the delay-constrained power and rate
// control games. See README.md for the scenario format.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qosgame/csv.hpp"
#include "qosgame/errors.hpp"
#include "qosgame/experiments.hpp"
#include "qosgame/psr_model.hpp"
#include "qosgame/scenario.hpp"
#include "qosgame/units.hpp"
#include "qosgame/validation_suite.hpp"

namespace {

using namespace qosgame;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitValidation = 4;

struct Options {
  std::string config;
  std::string out;
  std::string summary;
  std::string echo;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  int packet_bits = 100;
  std::string scale = "small";
};

Scenario load(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config", "a scenario file is required");
  Scenario s = load_scenario(opt.config);
  if (opt.seed) s.seed = *opt.seed;
  if (!opt.out.empty()) s.output.csv = opt.out;
  if (!opt.summary.empty()) s.output.summary = opt.summary;
  if (!opt.echo.empty()) {
    std::ofstream echo(opt.echo);
    if (!echo) throw ConfigError("--echo", "cannot write " + opt.echo);
    echo << to_json(s).dump(2) << '\n';
  }
  return s;
}

// CSV goes to output.csv when set (the JSON summary then goes to stdout),
// otherwise to stdout. output.summary always receives the summary.
template <typename Result>
void emit(const Scenario& s, const Result& result) {
  const nlohmann::json info = summary(result);
  if (s.output.csv.empty()) {
    write_csv(std::cout, result);
  } else {
    std::ofstream csv(s.output.csv, std::ios::binary);
    if (!csv) throw ConfigError("output.csv", "cannot write " + s.output.csv);
    write_csv(csv, result);
    std::cout << info.dump(2) << '\n';
  }
  if (!s.output.summary.empty()) {
    std::ofstream out(s.output.summary, std::ios::binary);
    if (!out) throw ConfigError("output.summary", "cannot write " + s.output.summary);
    out << info.dump(2) << '\n';
  }
}

int cmd_gamma_star(const Options& opt) {
  const EfficiencyModel model = EfficiencyModel::exponential(opt.packet_bits);
  const double g = gamma_star(model);
  CsvWriter csv(std::cout, {"packet_bits", "gamma_star_linear", "gamma_star_db", "psr_at_optimum"});
  csv.row({format_int(opt.packet_bits), format_double(g), format_double(to_db(g)),
           format_double(psr(model, g))});
  return kExitOk;
}

int cmd_pcg_sweep(const Options& opt) {
  const Scenario s = load(opt);
  const PcgSweepResult result = run_pcg_sweep(s);
  emit(s, result);
  return opt.strict && result.any_infeasible() ? kExitInfeasible : kExitOk;
}

int cmd_prcg_sweep(const Options& opt) {
  const Scenario s = load(opt);
  emit(s, run_prcg_sweep(s));
  return kExitOk;
}

int cmd_prcg_admit(const Options& opt) {
  const Scenario s = load(opt);
  const PrcgAdmitResult result = run_prcg_admit(s);
  emit(s, result);
  return opt.strict && !result.admission.admissible ? kExitInfeasible : kExitOk;
}

int cmd_best_response(const Options& opt) {
  const Scenario s = load(opt);
  const BestResponseExperiment result = run_best_response_experiment(s);
  const nlohmann::json info = summary(result);
  if (s.output.csv.empty()) {
    std::cout << info.dump(2) << '\n';
  } else {
    std::ofstream csv(s.output.csv, std::ios::binary);
    if (!csv) throw ConfigError("output.csv", "cannot write " + s.output.csv);
    write_trajectory_csv(csv, result.run);
    std::cout << info.dump(2) << '\n';
  }
  if (!s.output.summary.empty()) {
    std::ofstream out(s.output.summary, std::ios::binary);
    out << info.dump(2) << '\n';
  }
  return opt.strict && !result.run.converged() ? kExitInfeasible : kExitOk;
}

int cmd_validate(const Options& opt) {
  if (opt.scale != "small" && opt.scale != "full") {
    throw ConfigError("--scale", "expected \"small\" or \"full\"");
  }
  const ValidationReport report = run_validation(
      opt.seed.value_or(1), opt.scale == "full" ? ValidationScale::full : ValidationScale::small);
  if (opt.out.empty()) {
    write_report(std::cout, report);
  } else {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw ConfigError("--out", "cannot write " + opt.out);
    write_report(out, report);
  }
  return report.all_pass() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient power and rate control games with delay QoS"};
  app.require_subcommand(1);
  Options opt;

  auto add_scenario_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "Scenario JSON file")->required();
    cmd->add_option("--out", opt.out, "CSV output path (overrides output.csv)");
    cmd->add_option("--summary", opt.summary, "JSON summary path (overrides output.summary)");
    cmd->add_option("--echo", opt.echo, "Write the parsed scenario back as JSON");
    cmd->add_option("--seed", opt.seed, "RNG seed (overrides the scenario seed)");
    cmd->add_flag("--strict", opt.strict, "Exit with status 3 on an infeasible scenario");
  };

  auto* gamma = app.add_subcommand("gamma-star", "Efficiency-optimal SIR for a packet size");
  gamma->add_option("--packet-bits", opt.packet_bits, "Packet size M in bits")->required();

  auto* pcg = app.add_subcommand("pcg-sweep", "Utility loss from delay-sensitive users");
  add_scenario_flags(pcg);
  auto* prcg = app.add_subcommand("prcg-sweep", "User size, capacity and goodput sweep");
  add_scenario_flags(prcg);
  auto* admit = app.add_subcommand("prcg-admit", "Admission and equilibrium of a user list");
  add_scenario_flags(admit);
  auto* br = app.add_subcommand("best-response", "Best-response power dynamics (matched filter)");
  add_scenario_flags(br);

  auto* validate = app.add_subcommand("validate", "Monte Carlo and best-response oracle suite");
  validate->add_option("--seed", opt.seed, "RNG seed (default 1)");
  validate->add_option("--scale", opt.scale, "small or full")->check(CLI::IsMember({"small", "full"}));
  validate->add_option("--out", opt.out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gamma->parsed()) return cmd_gamma_star(opt);
    if (pcg->parsed()) return cmd_pcg_sweep(opt);
    if (prcg->parsed()) return cmd_prcg_sweep(opt);
    if (admit->parsed()) return cmd_prcg_admit(opt);
    if (br->parsed()) return cmd_best_response(opt);
    if (validate->parsed()) return cmd_validate(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return kExitConfig;
}
