#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qosgame/delay_qos.hpp"
#include "qosgame/pcg_equilibrium.hpp"
#include "qosgame/psr_model.hpp"

namespace qosgame {

/// A user of the joint power and rate game.
struct PrcgUser {
  AverageDelaySpec qos;
  double gain = 1.0;                                          // amplitude
  double max_power = std::numeric_limits<double>::infinity();  // W
};

struct SystemParams {
  double bandwidth;     // Hz
  double noise_power;   // W
  EfficiencyModel model;
};

/// Equilibrium transmit rate (bits/s): the rate at which the mean-delay
/// constraint is tight exactly at SIR gamma*,
///   (M/D) (1 + D lambda + sqrt(1 + D^2 lambda^2 + 2 (1 - f*) D lambda)) / (2 f*).
double omega_star(const AverageDelaySpec& qos, const EfficiencyModel& model);

/// User size 1 / (1 + B / (omega gamma*)), in (0, 1).
double phi_star(double omega, double bandwidth, double optimum_sir);

/// Size of a user under the given system.
double user_size(const AverageDelaySpec& qos, const SystemParams& params);

struct Admission {
  bool admissible = false;
  double total_size = 0.0;
  std::vector<double> sizes;
};

/// Admission test sum_k size_k < 1 (strict).
Admission admissible(std::span<const PrcgUser> users, const SystemParams& params);

/// Largest K with K * size < 1.
int capacity_for_size(double size);

/// Capacity for identical users sharing `qos`.
int network_capacity(const AverageDelaySpec& qos, const SystemParams& params);

/// K * omega * f*: total reliable throughput (bits/s) at equilibrium.
double total_goodput(int users, double omega, double optimum_psr);

/// Total received power Q = gamma* sigma^2 sum(1 - size_k) / (1 - sum size_k)
/// at the equilibrium of users with the given sizes. Throws InfeasibleError
/// when the sizes sum to 1 or more.
double aggregate_received_power(std::span<const double> sizes, double optimum_sir,
                                double noise_power);

/// SIR of each user when user k spreads by B/R_k:
///   p_k h_k^2 / (sigma^2 + (R_k/B) sum_{j != k} p_j h_j^2).
std::vector<double> variable_rate_sirs(std::span<const double> powers,
                                       std::span<const double> gains,
                                       std::span<const double> rates, double bandwidth,
                                       double noise_power);

struct PrcgEquilibrium {
  EquilibriumOutcome outcome;
  Admission admission;
};

/// Efficient equilibrium of the joint game: R_k = omega*_k and powers that
/// bring every user to gamma*. Powers above a user's P_max are clipped and
/// flagged without voiding admission. Throws InfeasibleError carrying the
/// total size when the users are not admissible.
PrcgEquilibrium prcg_equilibrium(std::span<const PrcgUser> users, const SystemParams& params);

/// Second constraint of the joint game, r/R < (DR/M - 1)/(DR/M - 1/2),
/// which is equivalent to eta_hat < 1. False at DR/M = 1; throws DomainError
/// when DR/M < 1.
bool rate_constraint_ok(const AverageDelaySpec& qos, double rate, int packet_bits);

}  // namespace qosgame
