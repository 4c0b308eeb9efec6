#include "qosgame/delay_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qosgame/errors.hpp"

namespace qosgame {

std::uint64_t RandomStream::geometric(double p) {
  if (p >= 1.0) return 1;
  const double u = uniform();
  return static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p))) + 1;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

QueueSimulation::QueueSimulation(double arrival_rate, double packet_time,
                                 double success_prob, std::uint64_t seed,
                                 std::size_t log_capacity)
    : arrival_rate_(arrival_rate),
      packet_time_(packet_time),
      success_prob_(success_prob),
      rng_(seed),
      log_capacity_(log_capacity) {
  if (!(arrival_rate > 0.0) || !(packet_time > 0.0)) {
    throw DomainError("simulation needs a positive arrival rate and packet time");
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
  log_.reserve(log_capacity_);
}

double QueueSimulation::step() {
  clock_ += rng_.exponential(arrival_rate_);
  const std::uint64_t attempts = rng_.geometric(success_prob_);
  const double service = static_cast<double>(attempts) * packet_time_;
  const double start = std::max(clock_, last_departure_);
  last_departure_ = start + service;

  const double wait = last_departure_ - clock_;
  if (log_.size() < log_capacity_) {
    log_.push_back({packets_, clock_, start, last_departure_, attempts});
  }
  ++packets_;
  wait_sum_ += wait;
  service_sum_ += service;
  return wait;
}

void QueueSimulation::run(std::size_t packets) {
  for (std::size_t i = 0; i < packets; ++i) step();
}

Mg1Estimate simulate_mg1(double arrival_rate, double packet_time, double success_prob,
                         std::size_t packets, std::uint64_t seed) {
  if (packets < 1) throw DomainError("need at least one packet");
  QueueSimulation queue(arrival_rate, packet_time, success_prob, seed);

  // Sojourn times are autocorrelated, so the error comes from batch means.
  const std::size_t batches = std::min<std::size_t>(100, packets);
  const std::size_t batch_size = packets / batches;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double batch = 0.0;
    for (std::size_t i = 0; i < batch_size; ++i) batch += queue.step();
    batch /= static_cast<double>(batch_size);
    sum += batch;
    sum_sq += batch * batch;
  }
  queue.run(packets - batches * batch_size);

  double se = 0.0;
  if (batches > 1) {
    const double mean = sum / batches;
    const double var = std::max(0.0, (sum_sq - batches * mean * mean) / (batches - 1));
    se = std::sqrt(var / batches);
  }
  return {queue.mean_wait(), se, queue.mean_service(), queue.packets(), seed};
}

RetransmissionEstimate simulate_retransmissions(double success_prob, int max_transmissions,
                                                std::size_t samples, std::uint64_t seed) {
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw DomainError("success probability must lie in (0, 1], got " +
                      std::to_string(success_prob));
  }
  if (max_transmissions < 1 || samples < 1) {
    throw DomainError("need L >= 1 and at least one sample");
  }
  RandomStream rng(seed);
  std::size_t within = 0;
  double attempts_total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    std::uint64_t attempts = 1;
    while (!rng.bernoulli(success_prob)) ++attempts;
    if (attempts <= static_cast<std::uint64_t>(max_transmissions)) ++within;
    attempts_total += static_cast<double>(attempts);
  }
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(within) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), attempts_total / n, samples, seed};
}

}  // namespace qosgame
