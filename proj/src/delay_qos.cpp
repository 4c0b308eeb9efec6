#include "qosgame/delay_qos.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qosgame/errors.hpp"

namespace qosgame {

OutageDelaySpec::OutageDelaySpec(int max_transmissions, double confidence)
    : max_transmissions_(max_transmissions), confidence_(confidence) {
  if (max_transmissions < 1) {
    throw DomainError("max transmissions L must be >= 1, got " +
                      std::to_string(max_transmissions));
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("confidence beta must lie in (0, 1), got " + std::to_string(confidence));
  }
}

AverageDelaySpec::AverageDelaySpec(double arrival_rate, double delay_bound)
    : arrival_rate_(arrival_rate), delay_bound_(delay_bound) {
  if (!std::isfinite(arrival_rate) || arrival_rate < 0.0) {
    throw DomainError("arrival rate must be finite and >= 0, got " +
                      std::to_string(arrival_rate));
  }
  if (!(delay_bound > 0.0)) {
    throw DomainError("delay bound must be > 0, got " + std::to_string(delay_bound));
  }
}

double eta_tilde(const OutageDelaySpec& spec) {
  // 1 - (1-beta)^(1/L) computed as -expm1(log1p(-beta)/L).
  return -std::expm1(std::log1p(-spec.confidence()) / spec.max_transmissions());
}

double gamma_tilde(const OutageDelaySpec& spec, const EfficiencyModel& model) {
  return psr_inverse(model, eta_tilde(spec));
}

double sir_target_infinite(const OutageDelaySpec& spec, const EfficiencyModel& model) {
  return std::max(gamma_tilde(spec, model), gamma_star(model));
}

bool outage_constraint_active(const OutageDelaySpec& spec, const EfficiencyModel& model) {
  return gamma_tilde(spec, model) > gamma_star(model);
}

double outage_delay_seconds(const OutageDelaySpec& spec, double packet_time) {
  if (!(packet_time > 0.0)) {
    throw DomainError("packet time must be > 0, got " + std::to_string(packet_time));
  }
  return spec.max_transmissions() * packet_time;
}

double load_factor(double arrival_rate, double packet_time, double success_prob) {
  return arrival_rate * packet_time / success_prob;
}

double mg1_mean_wait(double arrival_rate, double packet_time, double success_prob) {
  if (!(packet_time > 0.0)) {
    throw DomainError("packet time must be > 0, got " + std::to_string(packet_time));
  }
  if (!(arrival_rate >= 0.0)) {
    throw DomainError("arrival rate must be >= 0, got " + std::to_string(arrival_rate));
  }
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw DomainError("success probability must lie in (0, 1], got " +
                      std::to_string(success_prob));
  }
  const double offered = arrival_rate * packet_time;
  if (success_prob <= offered) {
    throw UnstableQueueError("queue unstable: f = " + std::to_string(success_prob) +
                                 " <= lambda*tau = " + std::to_string(offered),
                             offered / success_prob);
  }
  return packet_time * (1.0 - 0.5 * offered) / (success_prob - offered);
}

double eta_hat(const AverageDelaySpec& spec, double rate, int packet_bits) {
  if (!(rate > 0.0) || packet_bits < 1) {
    throw DomainError("rate and packet size must be positive");
  }
  const double tau = packet_bits / rate;
  const double lambda = spec.arrival_rate();
  const double d = spec.delay_bound();
  if (lambda > 0.0 && d <= tau) {
    throw DomainError("delay bound " + std::to_string(d) +
                      " s cannot be met: packet transmission time is " + std::to_string(tau) +
                      " s");
  }
  const double eta = lambda * tau + tau / d - lambda * tau * tau / (2.0 * d);
  if (eta >= 1.0) {
    throw RateInfeasibleError("rate " + std::to_string(rate) +
                                  " bits/s cannot meet the mean delay bound (eta_hat = " +
                                  std::to_string(eta) + ")",
                              eta);
  }
  return eta;
}

double gamma_hat(const AverageDelaySpec& spec, double rate, const EfficiencyModel& model) {
  return psr_inverse(model, eta_hat(spec, rate, model.packet_bits()));
}

}  // namespace qosgame
