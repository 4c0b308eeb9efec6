#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qosgame/best_response.hpp"
#include "qosgame/pcg_equilibrium.hpp"
#include "qosgame/prcg_equilibrium.hpp"
#include "qosgame/scenario.hpp"

namespace qosgame {

/// Efficiency model of a scenario's system block.
EfficiencyModel scenario_model(const Scenario& scenario);

// ---- utility loss of delay-sensitive traffic (power control game) ----------

struct PcgSweepRow {
  double total_load;
  Receiver receiver;
  LossRow loss;
};

struct PcgSweepResult {
  double optimum_sir;
  std::vector<double> class_targets;  // linear, one per configured class
  std::vector<bool> class_active;     // delay floor above gamma*
  std::vector<PcgSweepRow> rows;      // load-major, then receiver, then split

  bool any_infeasible() const;
};

/// Class-A fraction sweep for every (total load, receiver) pair. Needs
/// pcg.total_loads, pcg.split and exactly two classes (A first).
PcgSweepResult run_pcg_sweep(const Scenario& scenario);

void write_csv(std::ostream& out, const PcgSweepResult& result);
nlohmann::json summary(const PcgSweepResult& result);

// ---- size / capacity / goodput sweep (power and rate game) -----------------

struct PrcgSweepRow {
  double source_rate_bps;
  double arrival_rate_pps;
  double delay_bound_s;
  double omega_star_bps;
  double user_size;
  int capacity;
  double total_goodput_bps;
};

struct PrcgSweepResult {
  double optimum_sir;
  double optimum_psr;
  std::vector<PrcgSweepRow> rows;  // delay-bound-major, then rate
};

PrcgSweepResult run_prcg_sweep(const Scenario& scenario);

void write_csv(std::ostream& out, const PrcgSweepResult& result);
nlohmann::json summary(const PrcgSweepResult& result);

// ---- admission of a concrete user list -------------------------------------

struct PrcgAdmitResult {
  std::vector<PrcgUser> users;
  Admission admission;
  std::optional<PrcgEquilibrium> equilibrium;  // present when admissible
};

PrcgAdmitResult run_prcg_admit(const Scenario& scenario);

void write_csv(std::ostream& out, const PrcgAdmitResult& result);
nlohmann::json summary(const PrcgAdmitResult& result);

// ---- best-response dynamics on a finite matched-filter population ----------

struct BestResponseExperiment {
  std::vector<double> targets;
  double load;                                   // sum 1/(1 + N/gamma_k)
  BestResponseRun run;
  std::optional<std::vector<double>> closed_form;  // linear-solve powers when load < 1
  double max_relative_gap = 0.0;                 // run vs closed form
};

BestResponseExperiment run_best_response_experiment(const Scenario& scenario,
                                                    const BestResponseOptions& options = {});

nlohmann::json summary(const BestResponseExperiment& result);

}  // namespace qosgame
