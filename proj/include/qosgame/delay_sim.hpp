#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace qosgame {

/// Seedable uniform/exponential/geometric source. Draws are derived from
/// std::mt19937_64 bits by inversion so a seed reproduces the same stream on
/// every standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Number of Bernoulli(p) trials up to and including the first success.
  std::uint64_t geometric(double p);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// Deterministic stream seed for sub-task `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct QueueEvent {
  std::uint64_t packet;
  double arrival;
  double service_start;
  double departure;
  std::uint64_t transmissions;
};

struct Mg1Estimate {
  double mean_wait;       // s
  double standard_error;  // s, batch means
  double mean_service;    // s
  std::size_t packets;
  std::uint64_t seed;
};

/// FIFO single-server queue fed by Poisson arrivals whose service time is
/// tau times a geometric number of transmissions with success probability f.
class QueueSimulation {
 public:
  /// Throws UnstableQueueError when f <= lambda tau, DomainError on bad
  /// parameters. The first `log_capacity` packets are kept in the event log.
  QueueSimulation(double arrival_rate, double packet_time, double success_prob,
                  std::uint64_t seed, std::size_t log_capacity = 0);

  /// Pushes one more packet through the queue and returns its sojourn time.
  double step();

  void run(std::size_t packets);

  std::size_t packets() const noexcept { return packets_; }
  double mean_wait() const noexcept { return packets_ ? wait_sum_ / packets_ : 0.0; }
  double mean_service() const noexcept { return packets_ ? service_sum_ / packets_ : 0.0; }
  const std::vector<QueueEvent>& log() const noexcept { return log_; }

 private:
  double arrival_rate_;
  double packet_time_;
  double success_prob_;
  RandomStream rng_;
  std::size_t log_capacity_;

  double clock_ = 0.0;
  double last_departure_ = 0.0;
  std::size_t packets_ = 0;
  double wait_sum_ = 0.0;
  double service_sum_ = 0.0;
  std::vector<QueueEvent> log_;
};

/// Runs `packets` packets through a fresh QueueSimulation and reports the
/// empirical mean sojourn time with a 100-batch-means standard error.
Mg1Estimate simulate_mg1(double arrival_rate, double packet_time, double success_prob,
                         std::size_t packets, std::uint64_t seed);

struct RetransmissionEstimate {
  double prob_within;        // empirical Pr{X <= L}
  double standard_error;     // binomial
  double mean_transmissions;
  std::size_t samples;
  std::uint64_t seed;
};

/// Sends `samples` packets through independent attempts of success
/// probability f until each gets through, recording how often no more than
/// `max_transmissions` attempts were needed.
RetransmissionEstimate simulate_retransmissions(double success_prob, int max_transmissions,
                                                std::size_t samples, std::uint64_t seed);

}  // namespace qosgame
