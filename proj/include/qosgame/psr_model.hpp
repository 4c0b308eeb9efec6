#pragma once

#include <memory>
#include <string>

namespace qosgame {

/// Sigmoidal packet-success-rate curve f(sir). Implementations must be
/// increasing with f(0) = 0 and f(inf) = 1, convex below `inflection()` and
/// concave above it. The S-shape is taken on trust; nothing here checks it
/// symbolically.
class EfficiencyCurve {
 public:
  virtual ~EfficiencyCurve() = default;

  virtual double value(double sir) const = 0;
  virtual double derivative(double sir) const = 0;
  virtual double inflection() const = 0;
  virtual std::string name() const = 0;
};

/// Efficiency function of a user's link together with its packet size.
///
/// The built-in family is f(sir) = (1 - exp(-sir))^M. Other curves plug in
/// through EfficiencyCurve. Instances are immutable and cheap to copy, so a
/// single model can be shared across threads.
class EfficiencyModel {
 public:
  /// Throws DomainError for M < 2 (the optimum collapses to sir = 0).
  static EfficiencyModel exponential(int packet_bits);

  static EfficiencyModel custom(std::shared_ptr<const EfficiencyCurve> curve,
                                int packet_bits);

  int packet_bits() const noexcept { return packet_bits_; }
  bool is_exponential() const noexcept { return exponential_; }
  const EfficiencyCurve& curve() const noexcept { return *curve_; }
  std::string name() const { return curve_->name(); }

 private:
  EfficiencyModel(std::shared_ptr<const EfficiencyCurve> curve, int packet_bits,
                  bool exponential)
      : curve_(std::move(curve)), packet_bits_(packet_bits), exponential_(exponential) {}

  std::shared_ptr<const EfficiencyCurve> curve_;
  int packet_bits_;
  bool exponential_;
};

/// Packet success rate f(sir). `sir` is a linear ratio, finite and >= 0.
double psr(const EfficiencyModel& model, double sir);

double psr_derivative(const EfficiencyModel& model, double sir);

/// SIR at which the success rate equals `eta`, for 0 < eta < 1.
double psr_inverse(const EfficiencyModel& model, double eta);

/// Unique positive SIR maximizing f(sir)/sir, i.e. the root of
/// f(sir) = sir * f'(sir). The exponential family solves the reduced form
/// exp(sir) = 1 + M sir.
double gamma_star(const EfficiencyModel& model);

/// gamma_star through the generic f = sir f' route, for any curve.
double gamma_star_generic(const EfficiencyModel& model);

/// f(gamma_star).
double psr_at_optimum(const EfficiencyModel& model);

}  // namespace qosgame
