#include "qosgame/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qosgame/csv.hpp"
#include "qosgame/errors.hpp"

namespace qosgame {
namespace {

void check_env(const MfEnvironment& env, std::size_t users) {
  if (env.gains.size() != users || env.rates.size() != users) {
    throw DomainError("environment must list a gain and a rate for each of the " +
                      std::to_string(users) + " users");
  }
  if (!(env.noise_power > 0.0) || !(env.processing_gain >= 1.0) || !(env.max_power > 0.0)) {
    throw DomainError("noise power, processing gain and max power must be positive");
  }
}

// Unclipped power each user needs against the interference created by `powers`.
std::vector<double> demands(std::span<const double> powers, std::span<const double> targets,
                            const MfEnvironment& env) {
  double total = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    total += powers[k] * env.gains[k] * env.gains[k];
  }
  std::vector<double> out(powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) {
    const double h2 = env.gains[k] * env.gains[k];
    const double interference = (total - powers[k] * h2) / env.processing_gain;
    out[k] = targets[k] * (env.noise_power + interference) / h2;
  }
  return out;
}

}  // namespace

std::vector<double> best_response_step(std::span<const double> powers,
                                       std::span<const double> targets,
                                       const MfEnvironment& env) {
  check_env(env, powers.size());
  std::vector<double> next = demands(powers, targets, env);
  for (double& p : next) p = std::min(p, env.max_power);
  return next;
}

std::string_view to_string(BestResponseStatus status) {
  switch (status) {
    case BestResponseStatus::converged:
      return "converged";
    case BestResponseStatus::infeasible:
      return "infeasible";
    case BestResponseStatus::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

BestResponseRun run_best_response(const MfEnvironment& env, std::span<const double> targets,
                                  const EfficiencyModel& model,
                                  const BestResponseOptions& options,
                                  std::span<const double> initial) {
  const std::size_t k_users = targets.size();
  check_env(env, k_users);
  if (!initial.empty() && initial.size() != k_users) {
    throw DomainError("initial power vector has the wrong length");
  }

  std::vector<double> powers(initial.begin(), initial.end());
  if (powers.empty()) powers.assign(k_users, 0.0);
  for (double& p : powers) p = std::clamp(p, 0.0, env.max_power);

  BestResponseRun run;
  auto record = [&](int iteration) {
    if (!options.record_trajectory) return;
    const std::vector<double> sirs =
        mf_achieved_sirs(powers, env.gains, env.noise_power, env.processing_gain);
    for (std::size_t k = 0; k < k_users; ++k) {
      run.trajectory.push_back({iteration, k, powers[k], sirs[k]});
    }
  };
  record(0);

  std::vector<double> previous_demand(k_users, 0.0);
  std::vector<bool> pinned(k_users, false);
  int clip_streak = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const std::vector<double> demand = demands(powers, targets, env);
    double change = 0.0;
    bool any_pinned = false;
    bool relieved = false;
    for (std::size_t k = 0; k < k_users; ++k) {
      const double next = std::min(demand[k], env.max_power);
      const double scale = std::max(std::abs(next), std::abs(powers[k]));
      if (scale > 0.0) change = std::max(change, std::abs(next - powers[k]) / scale);
      powers[k] = next;
      pinned[k] = demand[k] > env.max_power;
      if (pinned[k]) {
        any_pinned = true;
        if (demand[k] < previous_demand[k]) relieved = true;
      }
    }
    previous_demand = demand;
    run.iterations = it;
    record(it);

    clip_streak = (any_pinned && !relieved) ? clip_streak + 1 : 0;
    if (clip_streak >= options.clip_patience) {
      run.status = BestResponseStatus::infeasible;
      break;
    }
    if (change < options.tolerance) {
      run.status = any_pinned ? BestResponseStatus::infeasible : BestResponseStatus::converged;
      break;
    }
  }

  const std::vector<double> sirs =
      mf_achieved_sirs(powers, env.gains, env.noise_power, env.processing_gain);
  run.outcome.feasible = run.status == BestResponseStatus::converged;
  for (std::size_t k = 0; k < k_users; ++k) {
    const double utility =
        powers[k] > 0.0 ? env.rates[k] * psr(model, sirs[k]) / powers[k] : 0.0;
    run.outcome.users.push_back(
        {targets[k], powers[k], env.rates[k], sirs[k], utility, pinned[k]});
  }
  switch (run.status) {
    case BestResponseStatus::converged:
      break;
    case BestResponseStatus::infeasible:
      run.outcome.reason = "users held at max power below their SIR target";
      break;
    case BestResponseStatus::max_iterations:
      run.outcome.reason = "no convergence within " + std::to_string(options.max_iterations) +
                           " iterations";
      break;
  }
  return run;
}

void write_trajectory_csv(std::ostream& out, const BestResponseRun& run) {
  CsvWriter csv(out, {"iteration", "user", "power_w", "sir_linear"});
  for (const TrajectoryPoint& p : run.trajectory) {
    csv.row({format_int(p.iteration), format_int(static_cast<long long>(p.user)),
             format_double(p.power), format_double(p.sir)});
  }
}

}  // namespace qosgame
