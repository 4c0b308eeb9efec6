#include "qosgame/psr_model.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "qosgame/errors.hpp"
#include "root_finding.hpp"

namespace qosgame {
namespace {

constexpr double kSirTolerance = 1e-12;

class ExponentialCurve final : public EfficiencyCurve {
 public:
  explicit ExponentialCurve(int packet_bits) : m_(packet_bits) {}

  double value(double sir) const override {
    // (1 - e^-x)^M evaluated in log space; log1p(-1) = -inf gives f(0) = 0.
    return std::exp(m_ * std::log1p(-std::exp(-sir)));
  }

  double derivative(double sir) const override {
    return m_ * std::exp(-sir + (m_ - 1.0) * std::log1p(-std::exp(-sir)));
  }

  double inflection() const override { return std::log(m_); }

  std::string name() const override {
    return "exponential(M=" + std::to_string(static_cast<int>(m_)) + ")";
  }

 private:
  double m_;
};

void require_sir(double sir) {
  if (!std::isfinite(sir) || sir < 0.0) {
    throw DomainError("SIR must be finite and non-negative, got " + std::to_string(sir));
  }
}

}  // namespace

EfficiencyModel EfficiencyModel::exponential(int packet_bits) {
  if (packet_bits < 2) {
    throw DomainError("packet size must be at least 2 bits, got " +
                      std::to_string(packet_bits));
  }
  return EfficiencyModel(std::make_shared<ExponentialCurve>(packet_bits), packet_bits, true);
}

EfficiencyModel EfficiencyModel::custom(std::shared_ptr<const EfficiencyCurve> curve,
                                        int packet_bits) {
  if (!curve) throw DomainError("efficiency curve must not be null");
  if (packet_bits < 1) {
    throw DomainError("packet size must be positive, got " + std::to_string(packet_bits));
  }
  if (!(curve->inflection() >= 0.0) || !std::isfinite(curve->inflection())) {
    throw DomainError("efficiency curve reports an invalid inflection point");
  }
  return EfficiencyModel(std::move(curve), packet_bits, false);
}

double psr(const EfficiencyModel& model, double sir) {
  require_sir(sir);
  return model.curve().value(sir);
}

double psr_derivative(const EfficiencyModel& model, double sir) {
  require_sir(sir);
  return model.curve().derivative(sir);
}

double psr_inverse(const EfficiencyModel& model, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw DomainError("success probability must lie in (0, 1), got " + std::to_string(eta));
  }
  if (model.is_exponential()) {
    // (1 - e^-x)^M = eta  <=>  x = -log(1 - eta^(1/M))
    const double m = model.packet_bits();
    return -std::log(-std::expm1(std::log(eta) / m));
  }

  const EfficiencyCurve& curve = model.curve();
  double hi = std::max(1.0, 2.0 * curve.inflection());
  while (curve.value(hi) < eta) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw DomainError("efficiency curve never reaches target");
  }
  const double tol = kSirTolerance * std::max(1.0, hi);
  return detail::solve_bracketed(
      [&](double x) { return curve.value(x) - eta; },
      [&](double x) { return std::optional<double>(curve.derivative(x)); }, 0.0, hi, tol);
}

double gamma_star(const EfficiencyModel& model) {
  if (!model.is_exponential()) return gamma_star_generic(model);

  // exp(x) = 1 + M x, written as x - log1p(M x) = 0 to stay finite for
  // large M. Increasing on the bracket [ln M, ln M + M].
  const double m = model.packet_bits();
  const double lo = std::log(m);
  const double hi = lo + m;
  return detail::solve_bracketed(
      [m](double x) { return x - std::log1p(m * x); },
      [m](double x) { return std::optional<double>(1.0 - m / (1.0 + m * x)); }, lo, hi,
      kSirTolerance);
}

double gamma_star_generic(const EfficiencyModel& model) {
  const EfficiencyCurve& curve = model.curve();
  // Sign of f - x f', normalized by f so the magnitude stays O(1).
  auto excess = [&](double x) {
    const double f = curve.value(x);
    return 1.0 - x * curve.derivative(x) / f;
  };

  double lo = curve.inflection();
  if (lo <= 0.0 || curve.value(lo) <= 0.0) lo = 1e-6;
  double hi = std::max(1.0, 2.0 * lo);
  while (excess(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw DomainError("f(x)/x has no interior maximum");
  }
  return detail::solve_bracketed(excess, lo, hi, kSirTolerance);
}

double psr_at_optimum(const EfficiencyModel& model) {
  return model.curve().value(gamma_star(model));
}

}  // namespace qosgame
