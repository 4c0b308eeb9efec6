#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qosgame/delay_sim.hpp"
#include "qosgame/errors.hpp"
#include "qosgame/pcg_equilibrium.hpp"

using namespace qosgame;

namespace {

const EfficiencyModel kModel = EfficiencyModel::exponential(100);
const OutageDelaySpec kClassA(1, 0.99);
const OutageDelaySpec kClassB(3, 0.90);

// Utility ratio of a class computed straight from the closed forms, with
// targets from the bisection oracle.
struct RatioOracle {
  double g_star = oracle::optimum_sir(100);
  double g_a = oracle::psr_inverse(100, 0.99);
  double g_b = g_star;  // class B floor sits below the optimum

  double term(Receiver r, double load, double g) const {
    switch (r) {
      case Receiver::matched_filter: return load * g;
      case Receiver::decorrelator: return load;
      case Receiver::mmse: return load * g / (1 + g);
    }
    return 0;
  }
  double eff(double g) const { return static_cast<double>(oracle::psr(100, g)) / g; }

  std::array<double, 2> ratios(Receiver r, double alpha, double split) const {
    const double mixed = 1 - term(r, split * alpha, g_a) - term(r, (1 - split) * alpha, g_b);
    const double relaxed = 1 - term(r, alpha, g_star);
    const double base = relaxed * eff(g_star);
    return {mixed * eff(g_a) / base, mixed * eff(g_b) / base};
  }
};

std::vector<ClassSpec> two_classes(double alpha, double split) {
  return {ClassSpec{split * alpha, kClassA, 1.0}, ClassSpec{(1 - split) * alpha, kClassB, 1.0}};
}

}  // namespace

TEST_CASE("receiver names") {
  CHECK(parse_receiver("mf") == Receiver::matched_filter);
  CHECK(parse_receiver("matched_filter") == Receiver::matched_filter);
  CHECK(parse_receiver("de") == Receiver::decorrelator);
  CHECK(parse_receiver("mmse") == Receiver::mmse);
  CHECK_THROWS_AS(parse_receiver("zf"), DomainError);
  for (Receiver r : kAllReceivers) CHECK(parse_receiver(to_string(r)) == r);
}

TEST_CASE("class targets") {
  const auto classes = two_classes(0.1, 0.5);
  const std::vector<double> t = pcg_sir_targets(classes, kModel);
  const RatioOracle o;
  CHECK(oracle::rel_close(t[0], o.g_a, 1e-10));
  CHECK(t[1] == gamma_star(kModel));
  const std::vector<ClassSpec> plain{ClassSpec{0.3, std::nullopt, 1.0}};
  CHECK(pcg_sir_targets(plain, kModel)[0] == gamma_star(kModel));
}

TEST_CASE("feasibility thresholds") {
  const std::vector<ClassSpec> heavy{ClassSpec{0.9, std::nullopt, 1.0}};
  const Feasibility mf = feasibility(Receiver::matched_filter, heavy, kModel);
  CHECK_FALSE(mf.feasible);
  CHECK(mf.load_measure == doctest::Approx(0.9 * 6.474600379589358));
  CHECK(feasibility(Receiver::decorrelator, heavy, kModel).feasible);
  const Feasibility mmse = feasibility(Receiver::mmse, heavy, kModel);
  CHECK(mmse.feasible);
  CHECK(oracle::rel_close(mmse.load_measure, 0.9 * 6.474600379589358 / 7.474600379589358, 1e-12));
  CHECK(oracle::rel_close(mmse.load_measure, 0.77959, 1e-5));

  const std::vector<ClassSpec> full{ClassSpec{1.0, std::nullopt, 1.0}};
  CHECK_FALSE(feasibility(Receiver::decorrelator, full, kModel).feasible);

  CHECK_THROWS_AS(feasibility(Receiver::mmse, std::vector<ClassSpec>{}, kModel), DomainError);
  CHECK_THROWS_AS(feasibility(Receiver::mmse, std::vector<ClassSpec>{ClassSpec{-0.1, std::nullopt, 1.0}}, kModel),
                  DomainError);
}

TEST_CASE("single-class powers") {
  const std::vector<ClassSpec> one{ClassSpec{0.1, std::nullopt, 1.0}};
  const double g = oracle::optimum_sir(100);
  // p = sigma^2 gamma / margin with h = sigma = 1.
  const double mf = multiclass_utilities(Receiver::matched_filter, one, kModel, 1.0, 1.0)[0].power;
  const double de = multiclass_utilities(Receiver::decorrelator, one, kModel, 1.0, 1.0)[0].power;
  const double mmse = multiclass_utilities(Receiver::mmse, one, kModel, 1.0, 1.0)[0].power;
  CHECK(oracle::rel_close(mf, g / (1 - 0.1 * g), 1e-10));
  CHECK(oracle::rel_close(mf, 18.365578591726266, 1e-9));
  CHECK(oracle::rel_close(de, 7.194000421765953, 1e-9));
  CHECK(oracle::rel_close(mmse, 7.088626867660166, 1e-9));
}

TEST_CASE("utilities scale with rate, gain and noise") {
  const auto classes = two_classes(0.1, 0.5);
  const auto base = multiclass_utilities(Receiver::mmse, classes, kModel, 1.0, 1.0);
  const auto scaled = multiclass_utilities(Receiver::mmse, classes, kModel, 2.0, 0.5);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(scaled[c].utility == doctest::Approx(8.0 * base[c].utility));
    CHECK(scaled[c].power == doctest::Approx(base[c].power / 8.0));
  }
  std::vector<ClassSpec> fast = classes;
  fast[0].rate = 1e5;
  CHECK(multiclass_utilities(Receiver::mmse, fast, kModel, 1.0, 1.0)[0].utility ==
        doctest::Approx(1e5 * base[0].utility));
}

TEST_CASE("infeasible load throws with its measure") {
  const std::vector<ClassSpec> heavy{ClassSpec{0.9, std::nullopt, 1.0}};
  try {
    multiclass_utilities(Receiver::matched_filter, heavy, kModel, 1.0, 1.0);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.measure() > 1.0);
  }
}

TEST_CASE("utility loss ratios against the closed-form oracle") {
  const RatioOracle o;
  const std::vector<double> splits{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
  for (Receiver r : kAllReceivers) {
    for (double alpha : {0.05, 0.1}) {
      const auto rows = utility_loss_sweep(r, alpha, splits, kClassA, kClassB, kModel);
      REQUIRE(rows.size() == splits.size());
      for (const LossRow& row : rows) {
        REQUIRE(row.feasible);
        const auto expect = o.ratios(r, alpha, row.split);
        if (row.split > 0.0) CHECK(oracle::rel_close(row.ratio_a, expect[0], 1e-9));
        if (row.split < 1.0) CHECK(oracle::rel_close(row.ratio_b, expect[1], 1e-9));
      }
      CHECK(rows.front().ratio_a == 1.0);
      CHECK(rows.front().ratio_b == 1.0);
      CHECK(rows.back().ratio_b == 1.0);
    }
  }
}

TEST_CASE("reference ratios at alpha 0.1, even split") {
  const std::vector<double> half{0.5};
  const LossRow mf = utility_loss_sweep(Receiver::matched_filter, 0.1, half, kClassA, kClassB, kModel)[0];
  CHECK(oracle::rel_close(mf.ratio_a, 0.4978290539607747, 1e-9));
  CHECK(oracle::rel_close(mf.ratio_b, 0.6127007462326176, 1e-9));
  const LossRow mmse = utility_loss_sweep(Receiver::mmse, 0.1, half, kClassA, kClassB, kModel)[0];
  CHECK(oracle::rel_close(mmse.ratio_a, 0.81092354832054, 1e-9));
  CHECK(oracle::rel_close(mmse.ratio_b, 0.998040309701863, 1e-9));
  const LossRow de = utility_loss_sweep(Receiver::decorrelator, 0.1, half, kClassA, kClassB, kModel)[0];
  CHECK(oracle::rel_close(de.ratio_a, 0.8125158277051766, 1e-9));
  CHECK(de.ratio_b == 1.0);
}

TEST_CASE("loss ratios never exceed one and fall with the class-A share") {
  std::vector<double> splits;
  for (int i = 0; i <= 20; ++i) splits.push_back(i / 20.0);
  for (Receiver r : kAllReceivers) {
    const auto rows = utility_loss_sweep(r, 0.1, splits, kClassA, kClassB, kModel);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].ratio_a <= 1.0);
      CHECK(rows[i].ratio_b <= 1.0);
      if (i > 1 && rows[i].split < 1.0) CHECK(rows[i].ratio_b <= rows[i - 1].ratio_b);
    }
  }
}

TEST_CASE("infeasible rows and bad splits") {
  const std::vector<double> splits{0.0, 0.5};
  const auto rows = utility_loss_sweep(Receiver::matched_filter, 0.9, splits, kClassA, kClassB, kModel);
  for (const LossRow& row : rows) CHECK_FALSE(row.feasible);
  const std::vector<double> bad{1.5};
  CHECK_THROWS_AS(utility_loss_sweep(Receiver::mmse, 0.1, bad, kClassA, kClassB, kModel), DomainError);
  CHECK_THROWS_AS(utility_loss_sweep(Receiver::mmse, 0.0, splits, kClassA, kClassB, kModel), DomainError);
}

TEST_CASE("receiver ordering on random scenarios") {
  RandomStream rng(2024);
  int checked = 0;
  while (checked < 200) {
    const double g_a_beta = 0.5 + 0.499 * rng.uniform();
    const int l = 1 + static_cast<int>(rng.uniform() * 4);
    std::vector<ClassSpec> classes{ClassSpec{0.01 + 0.1 * rng.uniform(), OutageDelaySpec(l, g_a_beta), 1.0},
                                   ClassSpec{0.01 + 0.1 * rng.uniform(), std::nullopt, 1.0}};
    if (!feasibility(Receiver::matched_filter, classes, kModel).feasible) continue;
    const auto mf = multiclass_utilities(Receiver::matched_filter, classes, kModel, 1.0, 1.0);
    const auto de = multiclass_utilities(Receiver::decorrelator, classes, kModel, 1.0, 1.0);
    const auto mmse = multiclass_utilities(Receiver::mmse, classes, kModel, 1.0, 1.0);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      CHECK(mmse[c].utility > de[c].utility);
      CHECK(de[c].utility > mf[c].utility);
    }
    ++checked;
  }
}

TEST_CASE("large-system powers per user") {
  const auto classes = two_classes(0.1, 0.5);
  const std::vector<UserPlacement> users{{0, 1.0}, {1, 2.0}, {1, 0.01}};
  const auto reps = multiclass_utilities(Receiver::mmse, classes, kModel, 1.0, 1.0);
  const EquilibriumOutcome out =
      equilibrium_powers_large_system(Receiver::mmse, classes, users, kModel, 1.0, 100.0);
  REQUIRE(out.users.size() == 3);
  CHECK(out.users[0].power == doctest::Approx(reps[0].power));
  CHECK(out.users[1].power == doctest::Approx(reps[1].power / 4.0));
  CHECK(out.users[1].utility == doctest::Approx(reps[1].utility * 4.0));
  CHECK_FALSE(out.users[1].clipped);
  // gain 0.01 needs 1e4 times the representative power
  CHECK(out.users[2].clipped);
  CHECK(out.users[2].power == 100.0);
  CHECK(out.users[2].achieved_sir < out.users[2].target_sir);
  CHECK_FALSE(out.targets_met());

  const std::vector<UserPlacement> stray{{5, 1.0}};
  CHECK_THROWS_AS(equilibrium_powers_large_system(Receiver::mmse, classes, stray, kModel, 1.0, 1.0),
                  DomainError);
}

TEST_CASE("finite-K matched filter powers") {
  SUBCASE("two users, Cramer's rule") {
    const std::vector<double> t{3.0, 5.0}, h{1.0, 0.5};
    const double n = 32.0, s2 = 0.7;
    // q1 - (t1/N) q2 = t1 s2 ; q2 - (t2/N) q1 = t2 s2
    const double det = 1.0 - t[0] * t[1] / (n * n);
    const double q1 = (t[0] * s2 + t[0] / n * t[1] * s2) / det;
    const double q2 = (t[1] * s2 + t[1] / n * t[0] * s2) / det;
    const auto p = finite_k_mf_powers(t, h, s2, n);
    CHECK(oracle::rel_close(p[0], q1, 1e-12));
    CHECK(oracle::rel_close(p[1], q2 / 0.25, 1e-12));
  }
  SUBCASE("symmetric users") {
    const int k = 10;
    const double g = 5.0, n = 128.0;
    const std::vector<double> t(k, g), h(k, 1.0);
    const double expect = g / (1.0 - (k - 1) * g / n);
    for (double p : finite_k_mf_powers(t, h, 1.0, n)) CHECK(oracle::rel_close(p, expect, 1e-12));
  }
  SUBCASE("random instances against elimination and iteration") {
    RandomStream rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 2 + static_cast<int>(rng.uniform() * 30);
      std::vector<double> t(k), h(k);
      for (int i = 0; i < k; ++i) {
        t[i] = 1.0 + 9.0 * rng.uniform();
        h[i] = 0.3 + 2.7 * rng.uniform();
      }
      double n = 1.0;
      while (mf_finite_load(t, n) >= 0.8) n *= 1.5;
      const double s2 = 0.5;

      std::vector<std::vector<double>> a(k, std::vector<double>(k));
      std::vector<double> b(k);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) a[i][j] = i == j ? h[j] * h[j] : -t[i] / n * h[j] * h[j];
        b[i] = t[i] * s2;
      }
      const auto ref = oracle::solve_linear(a, b);
      const auto direct = finite_k_mf_powers(t, h, s2, n);
      const auto iter = finite_k_mf_powers_iterative(t, h, s2, n);
      std::vector<double> spread(k, n);
      const auto sir = oracle::sirs(direct, h, s2, spread);
      for (int i = 0; i < k; ++i) {
        CHECK(oracle::rel_close(direct[i], ref[i], 1e-10));
        CHECK(oracle::rel_close(iter[i], ref[i], 1e-10));
        CHECK(oracle::rel_close(sir[i], t[i], 1e-10));
      }
    }
  }
  SUBCASE("overload") {
    const std::vector<double> t(20, 9.2), h(20, 1.0);
    CHECK(mf_finite_load(t, 100.0) > 1.0);
    CHECK_THROWS_AS(finite_k_mf_powers(t, h, 1.0, 100.0), InfeasibleError);
    CHECK_THROWS_AS(finite_k_mf_powers_iterative(t, h, 1.0, 100.0), InfeasibleError);
  }
  SUBCASE("argument checks") {
    const std::vector<double> t{1.0, 2.0}, h{1.0};
    CHECK_THROWS_AS(finite_k_mf_powers(t, h, 1.0, 10.0), DomainError);
    const std::vector<double> h2{1.0, 1.0};
    CHECK_THROWS_AS(finite_k_mf_powers(t, h2, 0.0, 10.0), DomainError);
    CHECK_THROWS_AS(finite_k_mf_powers(t, h2, 1.0, 0.5), DomainError);
  }
}

TEST_CASE("finite-K equilibrium with a power cap") {
  const std::vector<double> t{6.4746, 6.4746, 9.2}, h{1.0, 1.0, 0.1}, r(3, 1e5);
  const EquilibriumOutcome free = pcg_finite_equilibrium(t, h, r, kModel, 1.0, 64.0, 1e6);
  REQUIRE(free.feasible);
  CHECK(free.targets_met());
  for (const UserEquilibrium& u : free.users) {
    CHECK(oracle::rel_close(u.achieved_sir, u.target_sir, 1e-10));
    CHECK(u.utility == doctest::Approx(u.rate * psr(kModel, u.achieved_sir) / u.power));
  }
  const EquilibriumOutcome capped = pcg_finite_equilibrium(t, h, r, kModel, 1.0, 64.0, 100.0);
  CHECK(capped.feasible);
  CHECK_FALSE(capped.targets_met());
  CHECK(capped.users[2].clipped);
  CHECK(capped.users[2].power == 100.0);
  CHECK(capped.users[2].achieved_sir < 9.2);
  // The others see less interference and overshoot.
  CHECK(capped.users[0].achieved_sir > t[0]);

  const std::vector<double> heavy(20, 9.2), hh(20, 1.0), rr(20, 1e5);
  const EquilibriumOutcome over = pcg_finite_equilibrium(heavy, hh, rr, kModel, 1.0, 100.0, 1.0);
  CHECK_FALSE(over.feasible);
  CHECK_FALSE(over.reason.empty());
}
