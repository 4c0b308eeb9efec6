#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qosgame/delay_qos.hpp"
#include "qosgame/pcg_equilibrium.hpp"

namespace qosgame {

/// Malformed scenario document. `field()` is the JSON path of the offending
/// entry, e.g. "pcg.classes[1].confidence".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct SweepAxis {
  std::string variable;
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
  bool log_scale = false;

  /// `steps` points from `from` to `to` inclusive, linear or geometric.
  std::vector<double> values() const;

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SystemConfig {
  int packet_bits = 100;
  double noise_power_w = 1.0;
  std::optional<double> processing_gain;   // N, finite-K matched filter
  std::optional<double> bandwidth_hz;      // B, joint power and rate game
  std::optional<double> max_power_w;       // unlimited when absent

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

struct PcgClassConfig {
  std::string name;
  std::optional<OutageDelaySpec> requirement;
  double rate_bps = 100e3;

  friend bool operator==(const PcgClassConfig&, const PcgClassConfig&) = default;
};

struct PcgUserGroup {
  std::string class_name;
  double gain = 1.0;
  int count = 1;

  friend bool operator==(const PcgUserGroup&, const PcgUserGroup&) = default;
};

struct PcgConfig {
  std::vector<Receiver> receivers;
  std::vector<double> total_loads;
  std::vector<PcgClassConfig> classes;   // first: delay-sensitive class A
  std::optional<SweepAxis> split;        // variable "class_a_fraction"
  std::vector<PcgUserGroup> users;       // finite-K population for best-response

  friend bool operator==(const PcgConfig&, const PcgConfig&) = default;
};

struct PrcgUserGroup {
  double arrival_rate_pps = 0.0;
  double delay_bound_s = 0.0;
  double gain = 1.0;
  std::optional<double> max_power_w;
  int count = 1;

  friend bool operator==(const PrcgUserGroup&, const PrcgUserGroup&) = default;
};

struct PrcgConfig {
  std::vector<double> delay_bounds_s;
  std::optional<SweepAxis> sweep;   // "source_rate_bps" or "arrival_rate_pps"
  std::vector<PrcgUserGroup> users;

  friend bool operator==(const PrcgConfig&, const PrcgConfig&) = default;
};

struct OutputConfig {
  std::string csv;
  std::string summary;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/// One experiment: the system, exactly one of a power-control (pcg) or a
/// power-and-rate (prcg) population, and where results go.
struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  SystemConfig system;
  std::optional<PcgConfig> pcg;
  std::optional<PrcgConfig> prcg;
  OutputConfig output;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& scenario);

}  // namespace qosgame
