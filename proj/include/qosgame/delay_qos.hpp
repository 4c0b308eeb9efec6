#pragma once

#include "qosgame/psr_model.hpp"

namespace qosgame {

/// Delay requirement for an infinitely backlogged user: at most
/// `max_transmissions` (L) attempts per packet with probability at least
/// `confidence` (beta).
class OutageDelaySpec {
 public:
  /// Throws DomainError unless L >= 1 and 0 < beta < 1.
  OutageDelaySpec(int max_transmissions, double confidence);

  int max_transmissions() const noexcept { return max_transmissions_; }
  double confidence() const noexcept { return confidence_; }

  friend bool operator==(const OutageDelaySpec&, const OutageDelaySpec&) = default;

 private:
  int max_transmissions_;
  double confidence_;
};

/// Delay requirement for a finite-backlog user: Poisson arrivals at
/// `arrival_rate` packets/s and mean total delay (queueing plus service) of
/// at most `delay_bound` seconds.
class AverageDelaySpec {
 public:
  /// Throws DomainError unless arrival_rate >= 0 and delay_bound > 0.
  AverageDelaySpec(double arrival_rate, double delay_bound);

  double arrival_rate() const noexcept { return arrival_rate_; }
  double delay_bound() const noexcept { return delay_bound_; }
  /// Source rate r = M * lambda in bits/s.
  double source_rate(int packet_bits) const noexcept { return packet_bits * arrival_rate_; }

  friend bool operator==(const AverageDelaySpec&, const AverageDelaySpec&) = default;

 private:
  double arrival_rate_;
  double delay_bound_;
};

/// 1 - (1 - beta)^(1/L): the per-attempt success probability that meets the
/// outage requirement with equality.
double eta_tilde(const OutageDelaySpec& spec);

/// Minimum SIR meeting the outage requirement, f^-1(eta_tilde).
double gamma_tilde(const OutageDelaySpec& spec, const EfficiencyModel& model);

/// Equilibrium SIR of a user with this requirement: max(gamma_tilde, gamma*).
double sir_target_infinite(const OutageDelaySpec& spec, const EfficiencyModel& model);

/// True when the outage floor lies above gamma* and therefore moves the
/// equilibrium target.
bool outage_constraint_active(const OutageDelaySpec& spec, const EfficiencyModel& model);

/// Wall-clock reading of the outage bound: L transmissions of tau seconds.
double outage_delay_seconds(const OutageDelaySpec& spec, double packet_time);

/// Load factor rho = lambda * tau / f of the retransmission queue.
double load_factor(double arrival_rate, double packet_time, double success_prob);

/// Mean sojourn time tau (1 - lambda tau / 2) / (f - lambda tau) of the
/// M/G/1 queue with geometric-in-tau service. Throws UnstableQueueError when
/// f <= lambda tau.
double mg1_mean_wait(double arrival_rate, double packet_time, double success_prob);

/// Success-probability threshold making the mean delay at transmit rate
/// `rate` (bits/s) exactly equal to the delay bound:
///   r/R + M/(D R) - M r / (2 D R^2).
/// Throws DomainError if lambda > 0 and D <= M/R, and RateInfeasibleError if
/// the threshold is >= 1.
double eta_hat(const AverageDelaySpec& spec, double rate, int packet_bits);

/// f^-1(eta_hat): the SIR floor implied by the mean-delay requirement.
double gamma_hat(const AverageDelaySpec& spec, double rate, const EfficiencyModel& model);

}  // namespace qosgame
