#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qosgame/delay_qos.hpp"
#include "qosgame/errors.hpp"
#include "qosgame/units.hpp"

using namespace qosgame;

namespace {
const EfficiencyModel kModel = EfficiencyModel::exponential(100);
}

TEST_CASE("delay specs validate their arguments") {
  CHECK_THROWS_AS(OutageDelaySpec(0, 0.9), DomainError);
  CHECK_THROWS_AS(OutageDelaySpec(1, 0.0), DomainError);
  CHECK_THROWS_AS(OutageDelaySpec(1, 1.0), DomainError);
  CHECK_THROWS_AS(AverageDelaySpec(-1.0, 0.1), DomainError);
  CHECK_THROWS_AS(AverageDelaySpec(10.0, 0.0), DomainError);
  CHECK_NOTHROW(AverageDelaySpec(0.0, 0.1));
  CHECK(AverageDelaySpec(50, 0.01).source_rate(100) == 5000.0);
}

TEST_CASE("eta_tilde") {
  CHECK(eta_tilde(OutageDelaySpec(1, 0.99)) == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(oracle::rel_close(eta_tilde(OutageDelaySpec(3, 0.90)), 0.5358411166387221, 1e-14));
  // Direct formula as oracle across a grid.
  for (int l : {1, 2, 5, 20}) {
    for (double b : {0.5, 0.9, 0.999}) {
      const double direct = 1.0 - std::pow(1.0 - b, 1.0 / l);
      CHECK(oracle::rel_close(eta_tilde(OutageDelaySpec(l, b)), direct, 1e-13));
    }
  }
}

TEST_CASE("eta_tilde is monotone in L and beta") {
  for (double b : {0.5, 0.9, 0.99}) {
    double prev = 2.0;
    for (int l = 1; l <= 10; ++l) {
      const double e = eta_tilde(OutageDelaySpec(l, b));
      CHECK(e < prev);
      prev = e;
    }
  }
  for (int l : {1, 3}) {
    double prev = 0.0;
    for (double b = 0.1; b < 0.999; b += 0.05) {
      const double e = eta_tilde(OutageDelaySpec(l, b));
      CHECK(e > prev);
      prev = e;
    }
  }
}

TEST_CASE("SIR targets for the two reference classes") {
  const OutageDelaySpec a(1, 0.99), b(3, 0.90);
  CHECK(to_db(sir_target_infinite(a, kModel)) == doctest::Approx(9.64).epsilon(0.005 / 9.64));
  CHECK(outage_constraint_active(a, kModel));
  CHECK_FALSE(outage_constraint_active(b, kModel));
  CHECK(oracle::rel_close(gamma_tilde(b, kModel), 5.080025144944131, 1e-11));
  CHECK(sir_target_infinite(b, kModel) == gamma_star(kModel));
}

TEST_CASE("outage reading in seconds") {
  CHECK(outage_delay_seconds(OutageDelaySpec(3, 0.9), 1e-3) == doctest::Approx(3e-3));
  CHECK_THROWS_AS(outage_delay_seconds(OutageDelaySpec(3, 0.9), 0.0), DomainError);
}

TEST_CASE("mean wait agrees with Pollaczek-Khinchine") {
  for (double lambda : {0.0, 10.0, 100.0, 400.0}) {
    for (double f : {0.5, 0.8, 1.0}) {
      const double tau = 1e-3;
      if (lambda * tau >= f) continue;
      CHECK(oracle::rel_close(mg1_mean_wait(lambda, tau, f), oracle::pk_mean_sojourn(lambda, tau, f),
                              1e-12));
    }
  }
  CHECK(load_factor(100.0, 1e-3, 0.5) == doctest::Approx(0.2));
}

TEST_CASE("mean wait grows without bound near saturation") {
  const double tau = 1e-3, f = 0.5;
  double prev = 0.0;
  for (double rho : {0.5, 0.9, 0.99, 0.999, 0.9999}) {
    const double w = mg1_mean_wait(rho * f / tau, tau, f);
    CHECK(w > prev);
    prev = w;
  }
  CHECK(prev > 1000 * tau);
}

TEST_CASE("unstable queue") {
  try {
    mg1_mean_wait(500.0, 1e-3, 0.5);
    FAIL("expected UnstableQueueError");
  } catch (const UnstableQueueError& e) {
    CHECK(e.load_factor() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(mg1_mean_wait(600.0, 1e-3, 0.5), UnstableQueueError);
}

TEST_CASE("eta_hat inverts the mean-wait formula") {
  const int m = 100;
  for (double lambda : {5.0, 50.0, 200.0}) {
    for (double d : {0.01, 0.05, 0.5}) {
      const AverageDelaySpec qos(lambda, d);
      for (double rate : {3e4, 1e5, 1e6}) {
        const double tau = m / rate;
        if (d <= tau) continue;
        double eta = 0.0;
        try {
          eta = eta_hat(qos, rate, m);
        } catch (const RateInfeasibleError&) {
          continue;
        }
        if (eta <= lambda * tau) continue;
        CHECK(oracle::rel_close(mg1_mean_wait(lambda, tau, eta), d, 1e-10));
      }
    }
  }
}

TEST_CASE("eta_hat example and gamma_hat") {
  const AverageDelaySpec qos(50.0, 0.005);
  const double eta = eta_hat(qos, 1e5, 100);
  CHECK(eta == doctest::Approx(0.245).epsilon(1e-12));
  CHECK(mg1_mean_wait(50.0, 1e-3, 0.245) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(oracle::rel_close(gamma_hat(qos, 1e5, kModel), 4.271092164052772, 1e-10));
  CHECK(oracle::rel_close(gamma_hat(qos, 1e5, kModel), oracle::psr_inverse(100, eta), 1e-10));
}

TEST_CASE("eta_hat error paths") {
  SUBCASE("delay bound shorter than a packet") {
    CHECK_THROWS_AS(eta_hat(AverageDelaySpec(50.0, 1e-3), 1e5, 100), DomainError);
  }
  SUBCASE("threshold at or above one") {
    try {
      eta_hat(AverageDelaySpec(900.0, 2e-3), 1e5, 100);
      FAIL("expected RateInfeasibleError");
    } catch (const RateInfeasibleError& e) {
      CHECK(e.eta() >= 1.0);
    }
  }
  SUBCASE("no traffic") {
    // lambda = 0 leaves only the single-packet term M/(D R).
    CHECK(eta_hat(AverageDelaySpec(0.0, 0.01), 1e5, 100) == doctest::Approx(0.1));
  }
}
