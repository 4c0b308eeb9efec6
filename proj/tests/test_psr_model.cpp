#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "oracles.hpp"
#include "qosgame/errors.hpp"
#include "qosgame/psr_model.hpp"
#include "qosgame/units.hpp"

using namespace qosgame;

namespace {

// Logistic-shaped curve f(x) = x^2 / (1 + x^2): sigmoidal with f(0) = 0,
// inflection at 1/sqrt(3), and f(x)/x maximized at x = 1.
class RationalCurve final : public EfficiencyCurve {
 public:
  double value(double x) const override { return x * x / (1.0 + x * x); }
  double derivative(double x) const override {
    const double d = 1.0 + x * x;
    return 2.0 * x / (d * d);
  }
  double inflection() const override { return 1.0 / std::sqrt(3.0); }
  std::string name() const override { return "rational"; }
};

}  // namespace

TEST_CASE("psr matches the exponential family") {
  const auto m100 = EfficiencyModel::exponential(100);
  CHECK(psr(m100, 0.0) == 0.0);
  // Frozen from a 40-digit evaluation of (1 - e^-6.4748)^100.
  CHECK(oracle::rel_close(psr(m100, 6.4748), 0.8570151285764782, 1e-13));
  CHECK(psr(m100, 1e3) == 1.0);
  for (double x : {0.05, 0.7, 3.0, 9.0, 15.0}) {
    CHECK(oracle::rel_close(psr(m100, x), static_cast<double>(oracle::psr(100, x)), 1e-12));
  }
}

TEST_CASE("psr rejects bad SIRs") {
  const auto model = EfficiencyModel::exponential(100);
  CHECK_THROWS_AS(psr(model, -1e-9), DomainError);
  CHECK_THROWS_AS(psr(model, std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(psr(model, std::nan("")), DomainError);
  CHECK_THROWS_AS(psr_derivative(model, -1.0), DomainError);
}

TEST_CASE("packet size below two is rejected") {
  CHECK_THROWS_AS(EfficiencyModel::exponential(1), DomainError);
  CHECK_THROWS_AS(EfficiencyModel::exponential(0), DomainError);
  CHECK_NOTHROW(EfficiencyModel::exponential(2));
}

TEST_CASE("derivative agrees with central differences") {
  const auto model = EfficiencyModel::exponential(100);
  CHECK(psr_derivative(model, 0.0) == 0.0);
  for (double x : {1.0, 6.48, 12.0}) {
    const double fd = oracle::central_difference([&](double t) { return psr(model, t); }, x, 1e-5);
    CHECK(oracle::rel_close(psr_derivative(model, x), fd, 1e-6));
  }
  const auto m2 = EfficiencyModel::exponential(2);
  CHECK(psr_derivative(m2, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("psr_inverse") {
  const auto model = EfficiencyModel::exponential(100);
  SUBCASE("class A threshold") {
    const double g = psr_inverse(model, 0.99);
    CHECK(oracle::rel_close(g, 9.205369664023067, 1e-12));
    CHECK(to_db(g) == doctest::Approx(9.64).epsilon(1e-3));
  }
  SUBCASE("class B threshold") {
    CHECK(oracle::rel_close(psr_inverse(model, 0.5358411166387221), 5.080025144944131, 1e-12));
  }
  SUBCASE("round trip at 5") { CHECK(oracle::rel_close(psr_inverse(model, psr(model, 5.0)), 5.0, 1e-10)); }
  SUBCASE("bisection oracle") {
    for (double eta : {0.01, 0.3, 0.6, 0.9, 0.999}) {
      CHECK(oracle::rel_close(psr_inverse(model, eta), oracle::psr_inverse(100, eta), 1e-10));
    }
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(psr_inverse(model, 0.0), DomainError);
    CHECK_THROWS_AS(psr_inverse(model, 1.0), DomainError);
    CHECK_THROWS_AS(psr_inverse(model, -0.2), DomainError);
  }
}

TEST_CASE("round trip over [0.1, 20]") {
  for (int m : {2, 10, 100, 500}) {
    const auto model = EfficiencyModel::exponential(m);
    for (double x = 0.1; x <= 20.0; x += 0.1) {
      const double f = psr(model, x);
      if (f <= 0.0 || f >= 1.0) continue;  // outside double precision
      CHECK(oracle::rel_close(psr_inverse(model, f), x, 1e-8));
    }
  }
}

TEST_CASE("psr and its inverse are strictly increasing") {
  const auto model = EfficiencyModel::exponential(100);
  double prev = psr(model, 0.0);
  for (double x = 0.25; x <= 25.0; x += 0.25) {
    const double f = psr(model, x);
    CHECK(f > prev);
    prev = f;
  }
  double prev_inv = 0.0;
  for (double eta = 0.01; eta < 1.0; eta += 0.01) {
    const double g = psr_inverse(model, eta);
    CHECK(g > prev_inv);
    prev_inv = g;
  }
}

TEST_CASE("gamma_star") {
  const auto m100 = EfficiencyModel::exponential(100);
  const double g = gamma_star(m100);
  CHECK(g == doctest::Approx(6.48).epsilon(0.01 / 6.48));
  CHECK(oracle::rel_close(g, oracle::optimum_sir(100), 1e-12));
  CHECK(oracle::rel_close(g, 6.474600379589358, 1e-12));
  CHECK(to_db(g) == doctest::Approx(8.1).epsilon(0.02 / 8.1));
  CHECK(oracle::rel_close(psr_at_optimum(m100), 0.8569887087258912, 1e-12));

  CHECK(oracle::rel_close(gamma_star(EfficiencyModel::exponential(2)), 1.2564312086261697, 1e-12));

  for (int m : {2, 10, 100}) {
    const auto model = EfficiencyModel::exponential(m);
    const double x = gamma_star(model);
    const double f = psr(model, x);
    CHECK(std::abs(f - x * psr_derivative(model, x)) < 1e-10 * f);
  }
}

TEST_CASE("reduced and generic optimum routes agree") {
  for (int m : {2, 5, 10, 50, 100, 500, 2000}) {
    const auto model = EfficiencyModel::exponential(m);
    CHECK(std::abs(gamma_star(model) - gamma_star_generic(model)) < 1e-9);
  }
}

TEST_CASE("gamma_star increases with packet size") {
  double prev = 0.0;
  for (int m : {2, 10, 50, 100, 500}) {
    const double g = gamma_star(EfficiencyModel::exponential(m));
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("f(x)/x peaks at gamma_star on a fine grid") {
  for (int m : {10, 100}) {
    const auto model = EfficiencyModel::exponential(m);
    const double step = 1e-3;
    double best_x = 0.0, best = -1.0;
    for (double x = step; x <= 30.0; x += step) {
      const double e = psr(model, x) / x;
      if (e > best) {
        best = e;
        best_x = x;
      }
    }
    CHECK(std::abs(best_x - gamma_star(model)) <= step);
  }
}

TEST_CASE("custom curves go through the generic path") {
  const auto model = EfficiencyModel::custom(std::make_shared<RationalCurve>(), 80);
  CHECK_FALSE(model.is_exponential());
  CHECK(gamma_star(model) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(psr_inverse(model, 0.5) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(psr_inverse(model, 0.9) == doctest::Approx(3.0).epsilon(1e-11));
  CHECK_THROWS_AS(EfficiencyModel::custom(nullptr, 80), DomainError);
}
