#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "qosgame/pcg_equilibrium.hpp"
#include "qosgame/psr_model.hpp"

namespace qosgame {

/// Finite-K matched-filter uplink with a common spreading factor.
struct MfEnvironment {
  std::vector<double> gains;  // amplitude, one per user
  std::vector<double> rates;  // bits/s, one per user
  double noise_power = 1.0;   // W
  double processing_gain = 1.0;
  double max_power = 1.0;     // W
};

/// Synchronous best response: every user picks the power that meets its
/// target against the current interference, capped at P_max.
std::vector<double> best_response_step(std::span<const double> powers,
                                       std::span<const double> targets,
                                       const MfEnvironment& env);

enum class BestResponseStatus { converged, infeasible, max_iterations };

std::string_view to_string(BestResponseStatus status);

struct BestResponseOptions {
  double tolerance = 1e-10;  // max relative power change between sweeps
  int max_iterations = 10'000;
  int clip_patience = 50;    // sweeps of unrelieved clipping before giving up
  bool record_trajectory = true;
};

struct TrajectoryPoint {
  int iteration;
  std::size_t user;
  double power;  // W
  double sir;    // linear
};

struct BestResponseRun {
  EquilibriumOutcome outcome;
  BestResponseStatus status = BestResponseStatus::max_iterations;
  int iterations = 0;
  std::vector<TrajectoryPoint> trajectory;  // iteration 0 is the start point

  bool converged() const noexcept { return status == BestResponseStatus::converged; }
};

/// Iterates best_response_step from `initial` (all zeros when empty) until
/// the relative power change drops below the tolerance. Clipped users whose
/// demand keeps growing for `clip_patience` sweeps end the run as
/// infeasible; a run that converges with users held at P_max below target
/// is reported infeasible too. Never throws on non-convergence.
BestResponseRun run_best_response(const MfEnvironment& env, std::span<const double> targets,
                                  const EfficiencyModel& model,
                                  const BestResponseOptions& options = {},
                                  std::span<const double> initial = {});

/// CSV with header `iteration,user,power_w,sir_linear`.
void write_trajectory_csv(std::ostream& out, const BestResponseRun& run);

}  // namespace qosgame
