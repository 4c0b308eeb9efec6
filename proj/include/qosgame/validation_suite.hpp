#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qosgame/best_response.hpp"

namespace qosgame {

enum class ValidationScale { small, full };

struct ValidationCheck {
  std::string name;
  double statistic;  // z-score for Monte Carlo checks, relative gap otherwise
  double bound;
  bool pass;
};

struct ValidationReport {
  std::uint64_t seed;
  ValidationScale scale;
  std::vector<ValidationCheck> checks;

  bool all_pass() const;
};

/// One Monte Carlo case: success probability and either a transmission
/// limit (retransmission check) or an arrival rate and packet time (queue
/// check).
struct RetransmissionCase {
  double success_prob;
  int max_transmissions;
};

struct QueueCase {
  double arrival_rate;
  double packet_time;
  double success_prob;
};

/// 20-case grids used by `validate` and the acceptance suite.
std::vector<RetransmissionCase> retransmission_grid();
std::vector<QueueCase> queue_grid();

/// A random feasible matched-filter instance with K in [2, max_users]:
/// targets drawn from [1, 10], gains from [0.3, 3], and the processing gain
/// set so the finite-K load lands in [0.2, 0.85]. P_max is 100 times the
/// largest equilibrium power.
struct RandomMfInstance {
  MfEnvironment env;
  std::vector<double> targets;
};

RandomMfInstance random_feasible_instance(std::uint64_t seed, int max_users = 50);

/// Monte Carlo agreement of the retransmission and queue simulators with
/// their closed forms (within 3 standard errors), best-response versus the
/// linear solve on random instances, and behavioural detection of an
/// infeasible population. `small` uses 1e5 samples and 10 instances, `full`
/// 1e6 samples and 100 instances. Deterministic in `seed`.
ValidationReport run_validation(std::uint64_t seed, ValidationScale scale);

/// One line per check, `check,statistic,bound,verdict`, then a totals line.
void write_report(std::ostream& out, const ValidationReport& report);

}  // namespace qosgame
