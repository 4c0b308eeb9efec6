#include "qosgame/pcg_equilibrium.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qosgame/errors.hpp"

namespace qosgame {
namespace {

constexpr std::size_t kDirectSolveLimit = 4000;

double load_term(Receiver receiver, double load, double target) {
  switch (receiver) {
    case Receiver::matched_filter:
      return load * target;
    case Receiver::decorrelator:
      return load;
    case Receiver::mmse:
      return load * target / (1.0 + target);
  }
  return 0.0;
}

double load_measure(Receiver receiver, std::span<const ClassSpec> classes,
                    std::span<const double> targets) {
  double sum = 0.0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    sum += load_term(receiver, classes[c].load, targets[c]);
  }
  return sum;
}

void check_classes(std::span<const ClassSpec> classes) {
  if (classes.empty()) throw DomainError("at least one user class is required");
  for (const ClassSpec& c : classes) {
    if (!(c.load > 0.0) || !std::isfinite(c.load)) {
      throw DomainError("class load must be positive, got " + std::to_string(c.load));
    }
    if (!(c.rate > 0.0)) {
      throw DomainError("class rate must be positive, got " + std::to_string(c.rate));
    }
  }
}

void check_env(double noise_power, double processing_gain) {
  if (!(noise_power > 0.0)) {
    throw DomainError("noise power must be positive, got " + std::to_string(noise_power));
  }
  if (!(processing_gain >= 1.0)) {
    throw DomainError("processing gain must be >= 1, got " + std::to_string(processing_gain));
  }
}

void check_users(std::span<const double> targets, std::span<const double> gains) {
  if (targets.size() != gains.size()) {
    throw DomainError("targets and gains differ in length");
  }
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!(targets[k] > 0.0) || !(gains[k] > 0.0)) {
      throw DomainError("user " + std::to_string(k) + " needs a positive target and gain");
    }
  }
}

double efficiency(const EfficiencyModel& model, double sir) { return psr(model, sir) / sir; }

}  // namespace

bool EquilibriumOutcome::targets_met() const {
  return feasible && std::none_of(users.begin(), users.end(),
                                  [](const UserEquilibrium& u) { return u.clipped; });
}

std::string_view to_string(Receiver receiver) {
  switch (receiver) {
    case Receiver::matched_filter:
      return "matched_filter";
    case Receiver::decorrelator:
      return "decorrelator";
    case Receiver::mmse:
      return "mmse";
  }
  return "unknown";
}

Receiver parse_receiver(std::string_view name) {
  if (name == "matched_filter" || name == "mf") return Receiver::matched_filter;
  if (name == "decorrelator" || name == "de") return Receiver::decorrelator;
  if (name == "mmse") return Receiver::mmse;
  throw DomainError("unknown receiver '" + std::string(name) + "'");
}

std::vector<double> pcg_sir_targets(std::span<const ClassSpec> classes,
                                    const EfficiencyModel& model) {
  const double optimum = gamma_star(model);
  std::vector<double> targets;
  targets.reserve(classes.size());
  for (const ClassSpec& c : classes) {
    targets.push_back(c.requirement ? std::max(gamma_tilde(*c.requirement, model), optimum)
                                    : optimum);
  }
  return targets;
}

Feasibility feasibility(Receiver receiver, std::span<const ClassSpec> classes,
                        const EfficiencyModel& model) {
  check_classes(classes);
  const std::vector<double> targets = pcg_sir_targets(classes, model);
  const double measure = load_measure(receiver, classes, targets);
  return {measure < 1.0, measure, 1.0 - measure};
}

std::vector<ClassOutcome> multiclass_utilities(Receiver receiver,
                                               std::span<const ClassSpec> classes,
                                               const EfficiencyModel& model, double gain,
                                               double noise_power) {
  check_classes(classes);
  if (!(gain > 0.0)) throw DomainError("gain must be positive");
  check_env(noise_power, 1.0);

  const std::vector<double> targets = pcg_sir_targets(classes, model);
  const double measure = load_measure(receiver, classes, targets);
  if (!(measure < 1.0)) {
    throw InfeasibleError(std::string(to_string(receiver)) +
                              " load condition violated: load measure " +
                              std::to_string(measure) + " >= 1",
                          measure);
  }
  const double margin = 1.0 - measure;
  const double h2 = gain * gain;

  std::vector<ClassOutcome> out;
  out.reserve(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double g = targets[c];
    out.push_back({g, classes[c].rate * h2 / noise_power * margin * efficiency(model, g),
                   noise_power * g / (h2 * margin)});
  }
  return out;
}

EquilibriumOutcome equilibrium_powers_large_system(Receiver receiver,
                                                   std::span<const ClassSpec> classes,
                                                   std::span<const UserPlacement> users,
                                                   const EfficiencyModel& model,
                                                   double noise_power, double max_power) {
  if (!(max_power > 0.0)) throw DomainError("max power must be positive");
  const std::vector<ClassOutcome> reps =
      multiclass_utilities(receiver, classes, model, 1.0, noise_power);

  EquilibriumOutcome out;
  out.feasible = true;
  out.users.reserve(users.size());
  for (const UserPlacement& u : users) {
    if (u.class_index >= classes.size()) throw DomainError("user refers to unknown class");
    if (!(u.gain > 0.0)) throw DomainError("user gain must be positive");
    const ClassOutcome& rep = reps[u.class_index];
    const double h2 = u.gain * u.gain;

    UserEquilibrium ue;
    ue.target_sir = rep.target_sir;
    ue.rate = classes[u.class_index].rate;
    const double power = rep.power / h2;
    if (power > max_power) {
      ue.clipped = true;
      ue.power = max_power;
      ue.achieved_sir = rep.target_sir * max_power / power;
      ue.utility = ue.rate * psr(model, ue.achieved_sir) / ue.power;
    } else {
      ue.power = power;
      ue.achieved_sir = rep.target_sir;
      ue.utility = rep.utility * h2;
    }
    out.users.push_back(ue);
  }
  return out;
}

double mf_finite_load(std::span<const double> targets, double processing_gain) {
  double sum = 0.0;
  for (double g : targets) sum += 1.0 / (1.0 + processing_gain / g);
  return sum;
}

std::vector<double> mf_achieved_sirs(std::span<const double> powers,
                                     std::span<const double> gains, double noise_power,
                                     double processing_gain) {
  double total = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) total += powers[k] * gains[k] * gains[k];
  std::vector<double> sirs(powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) {
    const double own = powers[k] * gains[k] * gains[k];
    sirs[k] = own / (noise_power + (total - own) / processing_gain);
  }
  return sirs;
}

std::vector<double> finite_k_mf_powers_iterative(std::span<const double> targets,
                                                 std::span<const double> gains,
                                                 double noise_power,
                                                 double processing_gain) {
  check_users(targets, gains);
  check_env(noise_power, processing_gain);
  const double load = mf_finite_load(targets, processing_gain);
  if (!(load < 1.0)) {
    throw InfeasibleError("matched-filter load sum 1/(1+N/gamma_k) = " + std::to_string(load) +
                              " >= 1",
                          load);
  }

  // Received powers q_k = p_k h_k^2 satisfy q = gamma (sigma^2 + (Q - q)/N).
  const std::size_t k_users = targets.size();
  std::vector<double> q(k_users, 0.0), next(k_users);
  for (int it = 0; it < 1'000'000; ++it) {
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    double change = 0.0;
    for (std::size_t k = 0; k < k_users; ++k) {
      next[k] = targets[k] * (noise_power + (total - q[k]) / processing_gain);
      change = std::max(change, std::abs(next[k] - q[k]) / next[k]);
    }
    q.swap(next);
    if (change < 1e-15) break;
  }
  for (std::size_t k = 0; k < k_users; ++k) q[k] /= gains[k] * gains[k];
  return q;
}

std::vector<double> finite_k_mf_powers(std::span<const double> targets,
                                       std::span<const double> gains, double noise_power,
                                       double processing_gain) {
  check_users(targets, gains);
  check_env(noise_power, processing_gain);
  const double load = mf_finite_load(targets, processing_gain);
  if (!(load < 1.0)) {
    throw InfeasibleError("matched-filter load sum 1/(1+N/gamma_k) = " + std::to_string(load) +
                              " >= 1",
                          load);
  }
  const auto k_users = static_cast<Eigen::Index>(targets.size());
  if (targets.size() > kDirectSolveLimit) {
    return finite_k_mf_powers_iterative(targets, gains, noise_power, processing_gain);
  }

  // q_k - (gamma_k/N) sum_{j != k} q_j = gamma_k sigma^2
  Eigen::MatrixXd a(k_users, k_users);
  Eigen::VectorXd rhs(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double g = targets[static_cast<std::size_t>(k)];
    a.row(k).setConstant(-g / processing_gain);
    a(k, k) = 1.0;
    rhs(k) = g * noise_power;
  }
  const Eigen::VectorXd q = a.partialPivLu().solve(rhs);

  std::vector<double> powers(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    powers[k] = q(static_cast<Eigen::Index>(k)) / (gains[k] * gains[k]);
  }
  const std::vector<double> sirs = mf_achieved_sirs(powers, gains, noise_power, processing_gain);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!(powers[k] > 0.0) || !(std::abs(sirs[k] - targets[k]) <= 1e-10 * targets[k])) {
      return finite_k_mf_powers_iterative(targets, gains, noise_power, processing_gain);
    }
  }
  return powers;
}

EquilibriumOutcome pcg_finite_equilibrium(std::span<const double> targets,
                                          std::span<const double> gains,
                                          std::span<const double> rates,
                                          const EfficiencyModel& model, double noise_power,
                                          double processing_gain, double max_power) {
  if (rates.size() != targets.size()) throw DomainError("targets and rates differ in length");
  if (!(max_power > 0.0)) throw DomainError("max power must be positive");

  EquilibriumOutcome out;
  std::vector<double> powers;
  try {
    powers = finite_k_mf_powers(targets, gains, noise_power, processing_gain);
  } catch (const InfeasibleError& e) {
    out.feasible = false;
    out.reason = e.what();
    for (std::size_t k = 0; k < targets.size(); ++k) {
      out.users.push_back({targets[k], 0.0, rates[k], 0.0, 0.0, false});
    }
    return out;
  }

  std::vector<bool> clipped(powers.size(), false);
  for (std::size_t k = 0; k < powers.size(); ++k) {
    if (powers[k] > max_power) {
      powers[k] = max_power;
      clipped[k] = true;
    }
  }
  const std::vector<double> sirs = mf_achieved_sirs(powers, gains, noise_power, processing_gain);

  out.feasible = true;
  out.users.reserve(powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) {
    out.users.push_back({targets[k], powers[k], rates[k], sirs[k],
                         rates[k] * psr(model, sirs[k]) / powers[k], clipped[k]});
  }
  if (!out.targets_met()) out.reason = "power limit prevents some users from reaching target";
  return out;
}

std::vector<LossRow> utility_loss_sweep(Receiver receiver, double total_load,
                                        std::span<const double> splits,
                                        const std::optional<OutageDelaySpec>& class_a,
                                        const std::optional<OutageDelaySpec>& class_b,
                                        const EfficiencyModel& model) {
  if (!(total_load > 0.0)) throw DomainError("total load must be positive");

  const double optimum = gamma_star(model);
  const double best_efficiency = efficiency(model, optimum);
  const double target_a = class_a ? std::max(gamma_tilde(*class_a, model), optimum) : optimum;
  const double target_b = class_b ? std::max(gamma_tilde(*class_b, model), optimum) : optimum;

  std::vector<LossRow> rows;
  rows.reserve(splits.size());
  for (const double split : splits) {
    if (!(split >= 0.0 && split <= 1.0)) {
      throw DomainError("class-A fraction must lie in [0, 1], got " + std::to_string(split));
    }
    const double load_a = split * total_load;
    const double load_b = (1.0 - split) * total_load;

    // Mixed population and the same population without delay limits share
    // loads and summation order, so equal margins divide to exactly 1.
    double mixed = 0.0, relaxed = 0.0;
    if (load_a > 0.0) {
      mixed += load_term(receiver, load_a, target_a);
      relaxed += load_term(receiver, load_a, optimum);
    }
    if (load_b > 0.0) {
      mixed += load_term(receiver, load_b, target_b);
      relaxed += load_term(receiver, load_b, optimum);
    }

    LossRow row{split, mixed < 1.0 && relaxed < 1.0, 0.0, 0.0};
    if (row.feasible) {
      const double margin_ratio = (1.0 - mixed) / (1.0 - relaxed);
      row.ratio_a = load_a > 0.0
                        ? margin_ratio * (efficiency(model, target_a) / best_efficiency)
                        : 1.0;
      row.ratio_b = load_b > 0.0
                        ? margin_ratio * (efficiency(model, target_b) / best_efficiency)
                        : 1.0;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qosgame
