#include "qosgame/prcg_equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qosgame/errors.hpp"

namespace qosgame {

double omega_star(const AverageDelaySpec& qos, const EfficiencyModel& model) {
  const double f_opt = psr_at_optimum(model);
  const double m = model.packet_bits();
  const double d = qos.delay_bound();
  const double dl = d * qos.arrival_rate();
  const double root = std::sqrt(1.0 + dl * dl + 2.0 * (1.0 - f_opt) * dl);
  return (m / d) * (1.0 + dl + root) / (2.0 * f_opt);
}

double phi_star(double omega, double bandwidth, double optimum_sir) {
  if (!(omega > 0.0) || !(bandwidth > 0.0) || !(optimum_sir > 0.0)) {
    throw DomainError("size needs positive rate, bandwidth and SIR");
  }
  return 1.0 / (1.0 + bandwidth / (omega * optimum_sir));
}

double user_size(const AverageDelaySpec& qos, const SystemParams& params) {
  return phi_star(omega_star(qos, params.model), params.bandwidth, gamma_star(params.model));
}

Admission admissible(std::span<const PrcgUser> users, const SystemParams& params) {
  Admission out;
  out.sizes.reserve(users.size());
  const double optimum = gamma_star(params.model);
  for (const PrcgUser& u : users) {
    out.sizes.push_back(phi_star(omega_star(u.qos, params.model), params.bandwidth, optimum));
    out.total_size += out.sizes.back();
  }
  out.admissible = out.total_size < 1.0;
  return out;
}

int capacity_for_size(double size) {
  if (!(size > 0.0 && size < 1.0)) {
    throw DomainError("user size must lie in (0, 1), got " + std::to_string(size));
  }
  auto k = static_cast<long long>(std::floor(1.0 / size));
  while (static_cast<double>(k + 1) * size < 1.0) ++k;
  while (k > 0 && static_cast<double>(k) * size >= 1.0) --k;
  return static_cast<int>(k);
}

int network_capacity(const AverageDelaySpec& qos, const SystemParams& params) {
  return capacity_for_size(user_size(qos, params));
}

double total_goodput(int users, double omega, double optimum_psr) {
  return static_cast<double>(users) * omega * optimum_psr;
}

double aggregate_received_power(std::span<const double> sizes, double optimum_sir,
                                double noise_power) {
  double total = 0.0, complement = 0.0;
  for (double s : sizes) {
    total += s;
    complement += 1.0 - s;
  }
  if (!(total < 1.0)) {
    throw InfeasibleError("total user size " + std::to_string(total) + " >= 1", total);
  }
  return optimum_sir * noise_power * complement / (1.0 - total);
}

std::vector<double> variable_rate_sirs(std::span<const double> powers,
                                       std::span<const double> gains,
                                       std::span<const double> rates, double bandwidth,
                                       double noise_power) {
  double total = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) total += powers[k] * gains[k] * gains[k];
  std::vector<double> sirs(powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) {
    const double own = powers[k] * gains[k] * gains[k];
    sirs[k] = own / (noise_power + (rates[k] / bandwidth) * (total - own));
  }
  return sirs;
}

PrcgEquilibrium prcg_equilibrium(std::span<const PrcgUser> users, const SystemParams& params) {
  if (!(params.bandwidth > 0.0) || !(params.noise_power > 0.0)) {
    throw DomainError("bandwidth and noise power must be positive");
  }
  PrcgEquilibrium out;
  out.admission = admissible(users, params);
  if (!out.admission.admissible) {
    throw InfeasibleError("users not admissible: total size " +
                              std::to_string(out.admission.total_size) + " >= 1",
                          out.admission.total_size);
  }

  const double optimum = gamma_star(params.model);
  const double f_opt = psr_at_optimum(params.model);
  const double noise = params.noise_power;
  const double q_total = aggregate_received_power(out.admission.sizes, optimum, noise);

  std::vector<double> powers, gains, rates;
  std::vector<bool> clipped;
  for (std::size_t k = 0; k < users.size(); ++k) {
    const PrcgUser& u = users[k];
    if (!(u.gain > 0.0)) throw DomainError("user gain must be positive");
    const double size = out.admission.sizes[k];
    // Received power q_k = (1 - size_k) gamma* sigma^2 + size_k Q.
    const double q = (1.0 - size) * optimum * noise + size * q_total;
    double p = q / (u.gain * u.gain);
    clipped.push_back(p > u.max_power);
    if (clipped.back()) p = u.max_power;
    powers.push_back(p);
    gains.push_back(u.gain);
    rates.push_back(omega_star(u.qos, params.model));
  }

  const std::vector<double> sirs =
      variable_rate_sirs(powers, gains, rates, params.bandwidth, noise);
  const bool any_clipped = std::find(clipped.begin(), clipped.end(), true) != clipped.end();
  out.outcome.feasible = true;
  for (std::size_t k = 0; k < users.size(); ++k) {
    // Clipping lowers interference, so SIRs move off gamma* for everyone.
    const double f = any_clipped ? psr(params.model, sirs[k]) : f_opt;
    out.outcome.users.push_back(
        {optimum, powers[k], rates[k], sirs[k], rates[k] * f / powers[k], clipped[k]});
  }
  if (!out.outcome.targets_met()) {
    out.outcome.reason = "power limit prevents some users from reaching gamma*";
  }
  return out;
}

bool rate_constraint_ok(const AverageDelaySpec& qos, double rate, int packet_bits) {
  if (!(rate > 0.0) || packet_bits < 1) throw DomainError("rate and packet size must be positive");
  const double x = qos.delay_bound() * rate / packet_bits;
  if (x < 1.0) {
    throw DomainError("delay bound is shorter than the packet transmission time");
  }
  if (x == 1.0) return false;
  return qos.source_rate(packet_bits) / rate < (x - 1.0) / (x - 0.5);
}

}  // namespace qosgame
