#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qosgame/delay_qos.hpp"
#include "qosgame/psr_model.hpp"

namespace qosgame {

enum class Receiver { matched_filter, decorrelator, mmse };

inline constexpr std::array<Receiver, 3> kAllReceivers = {
    Receiver::matched_filter, Receiver::decorrelator, Receiver::mmse};

std::string_view to_string(Receiver receiver);

/// Accepts "matched_filter"/"mf", "decorrelator"/"de", "mmse". Throws
/// DomainError otherwise.
Receiver parse_receiver(std::string_view name);

/// One class of users in the large-system limit (K, N -> inf, K/N fixed).
struct ClassSpec {
  double load = 0.0;                            // alpha^(c) = K^(c)/N
  std::optional<OutageDelaySpec> requirement;   // empty: delay tolerant
  double rate = 1.0;                            // bits/s
};

/// Per-user view of an equilibrium.
struct UserEquilibrium {
  double target_sir = 0.0;    // linear
  double power = 0.0;         // W, after clipping at P_max
  double rate = 0.0;          // bits/s
  double achieved_sir = 0.0;  // linear, under the reported powers
  double utility = 0.0;       // bits/J
  bool clipped = false;       // power held at P_max
};

struct EquilibriumOutcome {
  std::vector<UserEquilibrium> users;
  bool feasible = false;
  std::string reason;

  bool targets_met() const;
};

/// Equilibrium SIR of each class: max(gamma_tilde, gamma*). Receiver
/// independent.
std::vector<double> pcg_sir_targets(std::span<const ClassSpec> classes,
                                    const EfficiencyModel& model);

struct Feasibility {
  bool feasible = false;
  double load_measure = 0.0;  // left-hand side of the receiver's load condition
  double slack = 0.0;         // 1 - load_measure
};

/// Load condition of a receiver in the large-system limit:
///   MF    sum alpha_c gamma_c            < 1
///   DE    sum alpha_c                    < 1
///   MMSE  sum alpha_c gamma_c/(1+gamma_c) < 1
/// Strict, without tolerance.
Feasibility feasibility(Receiver receiver, std::span<const ClassSpec> classes,
                        const EfficiencyModel& model);

struct ClassOutcome {
  double target_sir;  // linear
  double utility;     // bits/J
  double power;       // W
};

/// Closed-form equilibrium utility and power of a representative user of
/// each class with amplitude gain `gain` in noise `noise_power`:
///   u = (R h^2 / sigma^2) * margin * f(gamma)/gamma,
///   p = sigma^2 gamma / (h^2 margin),
/// where margin = 1 - load_measure. Throws InfeasibleError when the load
/// condition fails.
std::vector<ClassOutcome> multiclass_utilities(Receiver receiver,
                                               std::span<const ClassSpec> classes,
                                               const EfficiencyModel& model, double gain,
                                               double noise_power);

struct UserPlacement {
  std::size_t class_index;
  double gain;  // amplitude
};

/// Large-system equilibrium powers for individual users. Powers scale as
/// 1/h^2 and utilities as h^2 relative to the class representative. Users
/// whose power exceeds `max_power` are clipped; their achieved SIR drops in
/// proportion.
EquilibriumOutcome equilibrium_powers_large_system(Receiver receiver,
                                                   std::span<const ClassSpec> classes,
                                                   std::span<const UserPlacement> users,
                                                   const EfficiencyModel& model,
                                                   double noise_power, double max_power);

/// sum_k 1/(1 + N/gamma_k): the finite-K matched-filter load.
double mf_finite_load(std::span<const double> targets, double processing_gain);

/// Matched-filter output SIR of each user:
///   p_k h_k^2 / (sigma^2 + (1/N) sum_{j != k} p_j h_j^2).
std::vector<double> mf_achieved_sirs(std::span<const double> powers,
                                     std::span<const double> gains, double noise_power,
                                     double processing_gain);

/// Powers giving every user exactly its target SIR at the matched filter.
/// Direct LU solve for K <= 4000, fixed-point iteration above that or if the
/// direct solution is not accurate. Throws InfeasibleError naming the load
/// sum when mf_finite_load >= 1.
std::vector<double> finite_k_mf_powers(std::span<const double> targets,
                                       std::span<const double> gains, double noise_power,
                                       double processing_gain);

/// Same solution by Jacobi fixed-point iteration on the received powers.
std::vector<double> finite_k_mf_powers_iterative(std::span<const double> targets,
                                                 std::span<const double> gains,
                                                 double noise_power, double processing_gain);

/// Finite-K matched-filter equilibrium: powers min(p_k, P_max), achieved
/// SIRs under those powers and utilities R f(sir)/p.
EquilibriumOutcome pcg_finite_equilibrium(std::span<const double> targets,
                                          std::span<const double> gains,
                                          std::span<const double> rates,
                                          const EfficiencyModel& model, double noise_power,
                                          double processing_gain, double max_power);

struct LossRow {
  double split;      // alpha_A / alpha
  bool feasible;
  double ratio_a;    // u_A / u, u = same population without delay limits
  double ratio_b;    // u_B / u
};

/// Utility loss from mixing delay-sensitive class A with class B at total
/// load `total_load`, for each class-A fraction in `splits`. A class with
/// no users (split 0 or 1) reports a ratio of 1.
std::vector<LossRow> utility_loss_sweep(Receiver receiver, double total_load,
                                        std::span<const double> splits,
                                        const std::optional<OutageDelaySpec>& class_a,
                                        const std::optional<OutageDelaySpec>& class_b,
                                        const EfficiencyModel& model);

}  // namespace qosgame
