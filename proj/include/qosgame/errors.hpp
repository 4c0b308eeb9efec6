#pragma once

#include <stdexcept>
#include <string>

namespace qosgame {

/// Argument outside the mathematical domain of an operation (negative SIR,
/// probability outside (0,1), degenerate packet size, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A valid configuration that admits no equilibrium: a receiver load
/// condition, a finite-K power system or an admission budget is violated.
/// `measure` holds the offending load/size sum.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double measure)
      : std::runtime_error(what), measure_(measure) {}

  double measure() const noexcept { return measure_; }

 private:
  double measure_;
};

/// The average-delay threshold eta_hat reached 1 at the requested rate.
class RateInfeasibleError : public InfeasibleError {
 public:
  RateInfeasibleError(const std::string& what, double eta)
      : InfeasibleError(what, eta) {}

  double eta() const noexcept { return measure(); }
};

/// Arrival rate meets or exceeds the service rate of an M/G/1 queue.
class UnstableQueueError : public std::domain_error {
 public:
  UnstableQueueError(const std::string& what, double load_factor)
      : std::domain_error(what), load_factor_(load_factor) {}

  double load_factor() const noexcept { return load_factor_; }

 private:
  double load_factor_;
};

}  // namespace qosgame
