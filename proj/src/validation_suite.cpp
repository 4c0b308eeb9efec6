#include "qosgame/validation_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "qosgame/csv.hpp"
#include "qosgame/delay_qos.hpp"
#include "qosgame/delay_sim.hpp"
#include "qosgame/parallel.hpp"
#include "qosgame/pcg_equilibrium.hpp"

namespace qosgame {
namespace {

constexpr double kSigmaBound = 3.0;
constexpr double kPowerGapBound = 1e-8;

// Stream offsets keep the groups of checks on disjoint seeds.
constexpr std::uint64_t kRetransmissionStreams = 0;
constexpr std::uint64_t kQueueStreams = 1000;
constexpr std::uint64_t kInstanceStreams = 2000;

double z_score(double estimate, double exact, double se) {
  const double diff = std::abs(estimate - exact);
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

std::string label(const char* prefix, std::size_t i) {
  return std::string(prefix) + "_" + std::to_string(i);
}

double max_relative_gap(std::span<const double> a, std::span<const double> b) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::abs(a[k] - b[k]) / b[k]);
  return gap;
}

}  // namespace

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

std::vector<RetransmissionCase> retransmission_grid() {
  std::vector<RetransmissionCase> grid;
  for (double f : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    for (int l : {1, 2, 3, 5}) grid.push_back({f, l});
  }
  return grid;
}

std::vector<QueueCase> queue_grid() {
  std::vector<QueueCase> grid;
  for (double lambda : {10.0, 50.0, 100.0, 200.0}) {
    for (double f : {0.3, 0.5, 0.7, 0.9, 1.0}) grid.push_back({lambda, 1e-3, f});
  }
  return grid;
}

RandomMfInstance random_feasible_instance(std::uint64_t seed, int max_users) {
  RandomStream rng(seed);
  const int users = 2 + static_cast<int>(rng.uniform() * (max_users - 1));
  RandomMfInstance inst;
  for (int k = 0; k < users; ++k) {
    inst.targets.push_back(1.0 + 9.0 * rng.uniform());
    inst.env.gains.push_back(0.3 + 2.7 * rng.uniform());
    inst.env.rates.push_back(100e3);
  }
  const double load = 0.2 + 0.65 * rng.uniform();

  // mf_finite_load decreases in N; bisect on log N.
  double lo = 0.0, hi = std::log(1e9);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mf_finite_load(inst.targets, std::exp(mid)) > load ? lo : hi) = mid;
  }
  inst.env.processing_gain = std::exp(hi);
  inst.env.noise_power = 0.1 + rng.uniform();

  const std::vector<double> p = finite_k_mf_powers(inst.targets, inst.env.gains,
                                                   inst.env.noise_power, inst.env.processing_gain);
  inst.env.max_power = 100.0 * *std::max_element(p.begin(), p.end());
  return inst;
}

ValidationReport run_validation(std::uint64_t seed, ValidationScale scale) {
  const bool full = scale == ValidationScale::full;
  const std::size_t samples = full ? 1'000'000 : 100'000;
  const std::size_t instances = full ? 100 : 10;
  const EfficiencyModel model = EfficiencyModel::exponential(100);

  ValidationReport report{seed, scale, {}};

  const std::vector<RetransmissionCase> rgrid = retransmission_grid();
  const std::vector<QueueCase> qgrid = queue_grid();
  const std::size_t n_r = rgrid.size(), n_q = qgrid.size();

  auto checks = parallel_map(n_r + n_q + instances, [&](std::size_t i) -> ValidationCheck {
    if (i < n_r) {
      const RetransmissionCase& c = rgrid[i];
      const RetransmissionEstimate est = simulate_retransmissions(
          c.success_prob, c.max_transmissions, samples,
          derive_seed(seed, kRetransmissionStreams + i));
      const double exact = 1.0 - std::pow(1.0 - c.success_prob, c.max_transmissions);
      const double z = z_score(est.prob_within, exact, est.standard_error);
      return {label("retransmissions", i), z, kSigmaBound, z <= kSigmaBound};
    }
    if (i < n_r + n_q) {
      const QueueCase& c = qgrid[i - n_r];
      const Mg1Estimate est = simulate_mg1(c.arrival_rate, c.packet_time, c.success_prob,
                                           samples, derive_seed(seed, kQueueStreams + i - n_r));
      const double exact = mg1_mean_wait(c.arrival_rate, c.packet_time, c.success_prob);
      const double z = z_score(est.mean_wait, exact, est.standard_error);
      return {label("mg1_mean_wait", i - n_r), z, kSigmaBound, z <= kSigmaBound};
    }
    const std::size_t j = i - n_r - n_q;
    const RandomMfInstance inst =
        random_feasible_instance(derive_seed(seed, kInstanceStreams + j));
    const std::vector<double> reference = finite_k_mf_powers(
        inst.targets, inst.env.gains, inst.env.noise_power, inst.env.processing_gain);

    BestResponseOptions opts;
    opts.tolerance = 1e-13;
    opts.max_iterations = 100'000;
    opts.record_trajectory = false;
    const std::vector<double> top(inst.targets.size(), inst.env.max_power);
    double gap = 0.0;
    bool converged = true;
    for (std::span<const double> start : {std::span<const double>{}, std::span<const double>(top)}) {
      const BestResponseRun run = run_best_response(inst.env, inst.targets, model, opts, start);
      converged = converged && run.converged();
      std::vector<double> powers;
      for (const UserEquilibrium& u : run.outcome.users) powers.push_back(u.power);
      gap = std::max(gap, max_relative_gap(powers, reference));
    }
    return {label("best_response_instance", j), gap, kPowerGapBound,
            converged && gap <= kPowerGapBound};
  });
  report.checks = std::move(checks);

  // Twenty class-A users on N = 100 overload the matched filter.
  {
    const double target = sir_target_infinite(OutageDelaySpec(1, 0.99), model);
    MfEnvironment env;
    env.gains.assign(20, 1.0);
    env.rates.assign(20, 100e3);
    env.processing_gain = 100.0;
    env.max_power = 1e3;
    const std::vector<double> targets(20, target);
    BestResponseOptions opts;
    opts.record_trajectory = false;
    const BestResponseRun run = run_best_response(env, targets, model, opts);
    const bool pinned_below = std::any_of(
        run.outcome.users.begin(), run.outcome.users.end(), [](const UserEquilibrium& u) {
          return u.clipped && u.achieved_sir < u.target_sir;
        });
    const double load = mf_finite_load(targets, env.processing_gain);
    report.checks.push_back({"best_response_overload_detected", load, 1.0,
                             load >= 1.0 && run.status == BestResponseStatus::infeasible &&
                                 pinned_below});
  }
  return report;
}

void write_report(std::ostream& out, const ValidationReport& report) {
  out << "# seed=" << report.seed
      << " scale=" << (report.scale == ValidationScale::full ? "full" : "small") << '\n';
  CsvWriter csv(out, {"check", "statistic", "bound", "verdict"});
  std::size_t passed = 0;
  for (const ValidationCheck& c : report.checks) {
    csv.row({c.name, format_double(c.statistic), format_double(c.bound), c.pass ? "pass" : "FAIL"});
    passed += c.pass ? 1 : 0;
  }
  out << "# " << passed << "/" << report.checks.size() << " checks passed\n";
}

}  // namespace qosgame
