#include "qosgame/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "qosgame/csv.hpp"
#include "qosgame/errors.hpp"
#include "qosgame/parallel.hpp"
#include "qosgame/units.hpp"

namespace qosgame {
namespace {

using nlohmann::json;

const PcgConfig& require_pcg(const Scenario& s) {
  if (!s.pcg) throw ConfigError("pcg", "this command needs a power-control (pcg) scenario");
  return *s.pcg;
}

const PrcgConfig& require_prcg(const Scenario& s) {
  if (!s.prcg) throw ConfigError("prcg", "this command needs a power-and-rate (prcg) scenario");
  return *s.prcg;
}

// JSON has no infinity; unbounded quantities are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

EfficiencyModel scenario_model(const Scenario& scenario) {
  try {
    return EfficiencyModel::exponential(scenario.system.packet_bits);
  } catch (const DomainError& e) {
    throw ConfigError("system.packet_bits", e.what());
  }
}

bool PcgSweepResult::any_infeasible() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const PcgSweepRow& r) { return !r.loss.feasible; });
}

PcgSweepResult run_pcg_sweep(const Scenario& scenario) {
  const PcgConfig& pcg = require_pcg(scenario);
  if (pcg.classes.size() != 2) {
    throw ConfigError("pcg.classes", "the utility-loss sweep needs exactly two classes (A, B)");
  }
  if (pcg.total_loads.empty()) throw ConfigError("pcg.total_loads", "missing");
  if (!pcg.split) throw ConfigError("pcg.split", "missing");
  if (pcg.receivers.empty()) throw ConfigError("pcg.receivers", "must not be empty");

  const EfficiencyModel model = scenario_model(scenario);
  PcgSweepResult result;
  result.optimum_sir = gamma_star(model);
  for (const PcgClassConfig& c : pcg.classes) {
    const double floor = c.requirement ? gamma_tilde(*c.requirement, model) : 0.0;
    result.class_targets.push_back(std::max(floor, result.optimum_sir));
    result.class_active.push_back(floor > result.optimum_sir);
  }

  const std::vector<double> splits = pcg.split->values();
  const std::size_t n_receivers = pcg.receivers.size();
  const auto blocks = parallel_map(pcg.total_loads.size() * n_receivers, [&](std::size_t i) {
    return utility_loss_sweep(pcg.receivers[i % n_receivers], pcg.total_loads[i / n_receivers],
                              splits, pcg.classes[0].requirement, pcg.classes[1].requirement,
                              model);
  });
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (const LossRow& row : blocks[i]) {
      result.rows.push_back({pcg.total_loads[i / n_receivers], pcg.receivers[i % n_receivers], row});
    }
  }
  return result;
}

void write_csv(std::ostream& out, const PcgSweepResult& result) {
  CsvWriter csv(out, {"total_load", "class_a_fraction", "receiver", "utility_ratio_a",
                      "utility_ratio_b", "feasible"});
  for (const PcgSweepRow& r : result.rows) {
    const bool ok = r.loss.feasible;
    csv.row({format_double(r.total_load), format_double(r.loss.split),
             std::string(to_string(r.receiver)), ok ? format_double(r.loss.ratio_a) : "",
             ok ? format_double(r.loss.ratio_b) : "", ok ? "true" : "false"});
  }
}

json summary(const PcgSweepResult& result) {
  json classes = json::array();
  for (std::size_t c = 0; c < result.class_targets.size(); ++c) {
    classes.push_back({{"target_sir_linear", result.class_targets[c]},
                       {"target_sir_db", to_db(result.class_targets[c])},
                       {"delay_constraint_active", static_cast<bool>(result.class_active[c])}});
  }
  const auto infeasible = std::count_if(result.rows.begin(), result.rows.end(),
                                        [](const PcgSweepRow& r) { return !r.loss.feasible; });
  return {{"command", "pcg-sweep"},
          {"gamma_star_linear", result.optimum_sir},
          {"gamma_star_db", to_db(result.optimum_sir)},
          {"classes", classes},
          {"points", result.rows.size()},
          {"infeasible_points", infeasible}};
}

PrcgSweepResult run_prcg_sweep(const Scenario& scenario) {
  const PrcgConfig& prcg = require_prcg(scenario);
  if (!scenario.system.bandwidth_hz) throw ConfigError("system.bandwidth_hz", "missing");
  if (prcg.delay_bounds_s.empty()) throw ConfigError("prcg.delay_bounds_s", "missing");
  if (!prcg.sweep) throw ConfigError("prcg.sweep", "missing");

  const EfficiencyModel model = scenario_model(scenario);
  const SystemParams params{*scenario.system.bandwidth_hz, scenario.system.noise_power_w, model};
  const double m = model.packet_bits();
  const bool by_source_rate = prcg.sweep->variable == "source_rate_bps";
  const std::vector<double> axis = prcg.sweep->values();

  PrcgSweepResult result;
  result.optimum_sir = gamma_star(model);
  result.optimum_psr = psr_at_optimum(model);
  const std::size_t n_axis = axis.size();
  result.rows = parallel_map(prcg.delay_bounds_s.size() * n_axis, [&](std::size_t i) {
    const double d = prcg.delay_bounds_s[i / n_axis];
    const double lambda = by_source_rate ? axis[i % n_axis] / m : axis[i % n_axis];
    const AverageDelaySpec qos(lambda, d);
    const double omega = omega_star(qos, model);
    const double size = phi_star(omega, params.bandwidth, result.optimum_sir);
    const int capacity = capacity_for_size(size);
    return PrcgSweepRow{m * lambda, lambda,   d, omega, size, capacity,
                        total_goodput(capacity, omega, result.optimum_psr)};
  });
  return result;
}

void write_csv(std::ostream& out, const PrcgSweepResult& result) {
  CsvWriter csv(out, {"source_rate_bps", "arrival_rate_pps", "delay_bound_s", "omega_star_bps",
                      "user_size", "capacity_users", "total_goodput_bps"});
  for (const PrcgSweepRow& r : result.rows) {
    csv.row({format_double(r.source_rate_bps), format_double(r.arrival_rate_pps),
             format_double(r.delay_bound_s), format_double(r.omega_star_bps),
             format_double(r.user_size), format_int(r.capacity),
             format_double(r.total_goodput_bps)});
  }
}

json summary(const PrcgSweepResult& result) {
  int min_capacity = std::numeric_limits<int>::max();
  int max_capacity = 0;
  for (const PrcgSweepRow& r : result.rows) {
    min_capacity = std::min(min_capacity, r.capacity);
    max_capacity = std::max(max_capacity, r.capacity);
  }
  return {{"command", "prcg-sweep"},
          {"gamma_star_linear", result.optimum_sir},
          {"psr_at_optimum", result.optimum_psr},
          {"points", result.rows.size()},
          {"min_capacity_users", result.rows.empty() ? 0 : min_capacity},
          {"max_capacity_users", max_capacity}};
}

PrcgAdmitResult run_prcg_admit(const Scenario& scenario) {
  const PrcgConfig& prcg = require_prcg(scenario);
  if (!scenario.system.bandwidth_hz) throw ConfigError("system.bandwidth_hz", "missing");
  if (prcg.users.empty()) throw ConfigError("prcg.users", "missing");

  const EfficiencyModel model = scenario_model(scenario);
  const SystemParams params{*scenario.system.bandwidth_hz, scenario.system.noise_power_w, model};
  const double default_cap =
      scenario.system.max_power_w.value_or(std::numeric_limits<double>::infinity());

  PrcgAdmitResult result;
  for (const PrcgUserGroup& g : prcg.users) {
    for (int i = 0; i < g.count; ++i) {
      result.users.push_back(
          {AverageDelaySpec(g.arrival_rate_pps, g.delay_bound_s), g.gain,
           g.max_power_w.value_or(default_cap)});
    }
  }
  result.admission = admissible(result.users, params);
  if (result.admission.admissible) result.equilibrium = prcg_equilibrium(result.users, params);
  return result;
}

void write_csv(std::ostream& out, const PrcgAdmitResult& result) {
  CsvWriter csv(out, {"user", "arrival_rate_pps", "delay_bound_s", "user_size",
                      "omega_star_bps", "power_w", "sir_linear", "sir_db",
                      "utility_bits_per_joule", "clipped"});
  for (std::size_t k = 0; k < result.users.size(); ++k) {
    const PrcgUser& u = result.users[k];
    std::vector<std::string> row = {format_int(static_cast<long long>(k)),
                                    format_double(u.qos.arrival_rate()),
                                    format_double(u.qos.delay_bound()),
                                    format_double(result.admission.sizes[k])};
    if (result.equilibrium) {
      const UserEquilibrium& e = result.equilibrium->outcome.users[k];
      row.insert(row.end(), {format_double(e.rate), format_double(e.power),
                             format_double(e.achieved_sir), format_double(to_db(e.achieved_sir)),
                             format_double(e.utility), e.clipped ? "true" : "false"});
    } else {
      row.insert(row.end(), {"", "", "", "", "", ""});
    }
    csv.row(row);
  }
}

json summary(const PrcgAdmitResult& result) {
  json j = {{"command", "prcg-admit"},
            {"users", result.users.size()},
            {"admissible", result.admission.admissible},
            {"total_size", result.admission.total_size}};
  if (result.equilibrium) {
    const auto& users = result.equilibrium->outcome.users;
    j["clipped_users"] = std::count_if(users.begin(), users.end(),
                                       [](const UserEquilibrium& u) { return u.clipped; });
  }
  return j;
}

BestResponseExperiment run_best_response_experiment(const Scenario& scenario,
                                                    const BestResponseOptions& options) {
  const PcgConfig& pcg = require_pcg(scenario);
  if (pcg.users.empty()) throw ConfigError("pcg.users", "missing");
  if (!scenario.system.processing_gain) throw ConfigError("system.processing_gain", "missing");
  if (!scenario.system.max_power_w) throw ConfigError("system.max_power_w", "missing");

  const EfficiencyModel model = scenario_model(scenario);
  const double optimum = gamma_star(model);

  BestResponseExperiment result;
  MfEnvironment env;
  env.noise_power = scenario.system.noise_power_w;
  env.processing_gain = *scenario.system.processing_gain;
  env.max_power = *scenario.system.max_power_w;
  for (const PcgUserGroup& g : pcg.users) {
    const auto cls = std::find_if(pcg.classes.begin(), pcg.classes.end(),
                                  [&](const PcgClassConfig& c) { return c.name == g.class_name; });
    const double target =
        cls->requirement ? std::max(gamma_tilde(*cls->requirement, model), optimum) : optimum;
    for (int i = 0; i < g.count; ++i) {
      result.targets.push_back(target);
      env.gains.push_back(g.gain);
      env.rates.push_back(cls->rate_bps);
    }
  }
  result.load = mf_finite_load(result.targets, env.processing_gain);
  result.run = run_best_response(env, result.targets, model, options);
  if (result.load < 1.0) {
    result.closed_form =
        finite_k_mf_powers(result.targets, env.gains, env.noise_power, env.processing_gain);
    for (std::size_t k = 0; k < result.targets.size(); ++k) {
      const double ref = (*result.closed_form)[k];
      result.max_relative_gap = std::max(
          result.max_relative_gap, std::abs(result.run.outcome.users[k].power - ref) / ref);
    }
  }
  return result;
}

json summary(const BestResponseExperiment& result) {
  json powers = json::array();
  for (const UserEquilibrium& u : result.run.outcome.users) powers.push_back(u.power);
  json j = {{"command", "best-response"},
            {"users", result.targets.size()},
            {"load", result.load},
            {"status", std::string(to_string(result.run.status))},
            {"iterations", result.run.iterations},
            {"powers_w", powers}};
  if (result.closed_form) {
    j["closed_form_powers_w"] = *result.closed_form;
    j["max_relative_gap"] = finite_or_null(result.max_relative_gap);
  }
  if (!result.run.outcome.reason.empty()) j["reason"] = result.run.outcome.reason;
  return j;
}

}  // namespace qosgame
