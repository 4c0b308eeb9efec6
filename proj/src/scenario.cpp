#include "qosgame/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "qosgame/errors.hpp"

namespace qosgame {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void expect_object(const json& j, const std::string& path,
                   std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError(join(path, key), "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

std::optional<double> optional_positive(const json& obj, const char* key,
                                        const std::string& path) {
  if (!obj.contains(key)) return std::nullopt;
  return positive(obj.at(key), join(path, key));
}

SweepAxis parse_axis(const json& j, const std::string& path,
                     std::initializer_list<const char*> variables) {
  expect_object(j, path, {"variable", "from", "to", "steps", "scale"});
  SweepAxis axis;
  if (!j.contains("variable")) throw ConfigError(join(path, "variable"), "missing");
  axis.variable = string(j.at("variable"), join(path, "variable"));
  bool known = false;
  for (const char* v : variables) known = known || axis.variable == v;
  if (!known) throw ConfigError(join(path, "variable"), "unsupported sweep variable '" + axis.variable + "'");

  for (const char* key : {"from", "to", "steps"}) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
  }
  axis.from = number(j.at("from"), join(path, "from"));
  axis.to = number(j.at("to"), join(path, "to"));
  axis.steps = integer(j.at("steps"), join(path, "steps"));
  if (axis.steps < 1) throw ConfigError(join(path, "steps"), "must be at least 1");
  if (axis.to < axis.from) throw ConfigError(join(path, "to"), "range must be ordered (from <= to)");
  if (j.contains("scale")) {
    const std::string scale = string(j.at("scale"), join(path, "scale"));
    if (scale == "log") {
      axis.log_scale = true;
    } else if (scale != "linear") {
      throw ConfigError(join(path, "scale"), "expected \"linear\" or \"log\"");
    }
  }
  if (axis.log_scale && !(axis.from > 0.0)) {
    throw ConfigError(join(path, "from"), "log-scaled sweeps need a positive start");
  }
  return axis;
}

std::vector<double> positive_list(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) {
    out.push_back(positive(j[i], index(path, i)));
  }
  if (out.empty()) throw ConfigError(path, "must not be empty");
  return out;
}

SystemConfig parse_system(const json& j, const std::string& path) {
  expect_object(j, path,
                {"packet_bits", "noise_power_w", "processing_gain", "bandwidth_hz", "max_power_w"});
  SystemConfig sys;
  if (j.contains("packet_bits")) {
    sys.packet_bits = integer(j.at("packet_bits"), join(path, "packet_bits"));
    if (sys.packet_bits < 2) throw ConfigError(join(path, "packet_bits"), "must be at least 2");
  }
  if (j.contains("noise_power_w")) {
    sys.noise_power_w = positive(j.at("noise_power_w"), join(path, "noise_power_w"));
  }
  sys.processing_gain = optional_positive(j, "processing_gain", path);
  if (sys.processing_gain && *sys.processing_gain < 1.0) {
    throw ConfigError(join(path, "processing_gain"), "must be at least 1");
  }
  sys.bandwidth_hz = optional_positive(j, "bandwidth_hz", path);
  sys.max_power_w = optional_positive(j, "max_power_w", path);
  return sys;
}

PcgConfig parse_pcg(const json& j, const std::string& path) {
  expect_object(j, path, {"receivers", "total_loads", "classes", "split", "users"});
  PcgConfig pcg;

  if (j.contains("receivers")) {
    const std::string p = join(path, "receivers");
    for (std::size_t i = 0; i < array(j.at("receivers"), p).size(); ++i) {
      try {
        pcg.receivers.push_back(parse_receiver(string(j.at("receivers")[i], index(p, i))));
      } catch (const DomainError& e) {
        throw ConfigError(index(p, i), e.what());
      }
    }
  } else {
    pcg.receivers.assign(kAllReceivers.begin(), kAllReceivers.end());
  }

  if (j.contains("total_loads")) {
    pcg.total_loads = positive_list(j.at("total_loads"), join(path, "total_loads"));
  }

  const std::string cp = join(path, "classes");
  if (!j.contains("classes")) throw ConfigError(cp, "missing");
  std::set<std::string> names;
  for (std::size_t i = 0; i < array(j.at("classes"), cp).size(); ++i) {
    const json& c = j.at("classes")[i];
    const std::string p = index(cp, i);
    expect_object(c, p, {"name", "max_transmissions", "confidence", "rate_bps"});
    PcgClassConfig cls;
    if (!c.contains("name")) throw ConfigError(join(p, "name"), "missing");
    cls.name = string(c.at("name"), join(p, "name"));
    if (!names.insert(cls.name).second) throw ConfigError(join(p, "name"), "duplicate class name");
    const bool has_l = c.contains("max_transmissions");
    const bool has_b = c.contains("confidence");
    if (has_l != has_b) {
      throw ConfigError(join(p, has_l ? "confidence" : "max_transmissions"),
                        "max_transmissions and confidence must be given together");
    }
    if (has_l) {
      const int l = integer(c.at("max_transmissions"), join(p, "max_transmissions"));
      const double b = number(c.at("confidence"), join(p, "confidence"));
      try {
        cls.requirement = OutageDelaySpec(l, b);
      } catch (const DomainError& e) {
        throw ConfigError(join(p, l < 1 ? "max_transmissions" : "confidence"), e.what());
      }
    }
    if (c.contains("rate_bps")) cls.rate_bps = positive(c.at("rate_bps"), join(p, "rate_bps"));
    pcg.classes.push_back(std::move(cls));
  }
  if (pcg.classes.empty()) throw ConfigError(cp, "must not be empty");

  if (j.contains("split")) {
    pcg.split = parse_axis(j.at("split"), join(path, "split"), {"class_a_fraction"});
    if (pcg.split->from < 0.0 || pcg.split->to > 1.0) {
      throw ConfigError(join(path, "split"), "class_a_fraction must stay within [0, 1]");
    }
  }

  if (j.contains("users")) {
    const std::string up = join(path, "users");
    for (std::size_t i = 0; i < array(j.at("users"), up).size(); ++i) {
      const json& u = j.at("users")[i];
      const std::string p = index(up, i);
      expect_object(u, p, {"class", "gain", "count"});
      PcgUserGroup g;
      if (!u.contains("class")) throw ConfigError(join(p, "class"), "missing");
      g.class_name = string(u.at("class"), join(p, "class"));
      if (!names.count(g.class_name)) {
        throw ConfigError(join(p, "class"), "unknown class '" + g.class_name + "'");
      }
      if (u.contains("gain")) g.gain = positive(u.at("gain"), join(p, "gain"));
      if (u.contains("count")) {
        g.count = integer(u.at("count"), join(p, "count"));
        if (g.count < 1) throw ConfigError(join(p, "count"), "must be at least 1");
      }
      pcg.users.push_back(std::move(g));
    }
  }
  return pcg;
}

PrcgConfig parse_prcg(const json& j, const std::string& path) {
  expect_object(j, path, {"delay_bounds_s", "sweep", "users"});
  PrcgConfig prcg;
  if (j.contains("delay_bounds_s")) {
    prcg.delay_bounds_s = positive_list(j.at("delay_bounds_s"), join(path, "delay_bounds_s"));
  }
  if (j.contains("sweep")) {
    prcg.sweep =
        parse_axis(j.at("sweep"), join(path, "sweep"), {"source_rate_bps", "arrival_rate_pps"});
    if (prcg.sweep->from < 0.0) {
      throw ConfigError(join(path, "sweep.from"), "rates must be non-negative");
    }
  }
  if (j.contains("users")) {
    const std::string up = join(path, "users");
    for (std::size_t i = 0; i < array(j.at("users"), up).size(); ++i) {
      const json& u = j.at("users")[i];
      const std::string p = index(up, i);
      expect_object(u, p, {"arrival_rate_pps", "delay_bound_s", "gain", "max_power_w", "count"});
      PrcgUserGroup g;
      if (!u.contains("arrival_rate_pps")) throw ConfigError(join(p, "arrival_rate_pps"), "missing");
      if (!u.contains("delay_bound_s")) throw ConfigError(join(p, "delay_bound_s"), "missing");
      g.arrival_rate_pps = number(u.at("arrival_rate_pps"), join(p, "arrival_rate_pps"));
      if (g.arrival_rate_pps < 0.0) {
        throw ConfigError(join(p, "arrival_rate_pps"), "must be non-negative");
      }
      g.delay_bound_s = positive(u.at("delay_bound_s"), join(p, "delay_bound_s"));
      if (u.contains("gain")) g.gain = positive(u.at("gain"), join(p, "gain"));
      g.max_power_w = optional_positive(u, "max_power_w", p);
      if (u.contains("count")) {
        g.count = integer(u.at("count"), join(p, "count"));
        if (g.count < 1) throw ConfigError(join(p, "count"), "must be at least 1");
      }
      prcg.users.push_back(g);
    }
  }
  return prcg;
}

json axis_json(const SweepAxis& a) {
  return {{"variable", a.variable},
          {"from", a.from},
          {"to", a.to},
          {"steps", a.steps},
          {"scale", a.log_scale ? "log" : "linear"}};
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) return {from};
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / (steps - 1);
    if (i == steps - 1) {
      out.push_back(to);
    } else if (log_scale) {
      out.push_back(from * std::pow(to / from, t));
    } else {
      out.push_back(from + (to - from) * t);
    }
  }
  return out;
}

Scenario parse_scenario(const json& doc) {
  expect_object(doc, "", {"name", "seed", "system", "pcg", "prcg", "output"});
  Scenario s;
  if (doc.contains("name")) s.name = string(doc.at("name"), "name");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    s.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("system")) s.system = parse_system(doc.at("system"), "system");
  if (doc.contains("pcg")) s.pcg = parse_pcg(doc.at("pcg"), "pcg");
  if (doc.contains("prcg")) s.prcg = parse_prcg(doc.at("prcg"), "prcg");
  if (s.pcg.has_value() == s.prcg.has_value()) {
    throw ConfigError("<root>", "exactly one of \"pcg\" or \"prcg\" must be present");
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    expect_object(o, "output", {"csv", "summary"});
    if (o.contains("csv")) s.output.csv = string(o.at("csv"), "output.csv");
    if (o.contains("summary")) s.output.summary = string(o.at("summary"), "output.summary");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["seed"] = s.seed;

  json sys = {{"packet_bits", s.system.packet_bits}, {"noise_power_w", s.system.noise_power_w}};
  if (s.system.processing_gain) sys["processing_gain"] = *s.system.processing_gain;
  if (s.system.bandwidth_hz) sys["bandwidth_hz"] = *s.system.bandwidth_hz;
  if (s.system.max_power_w) sys["max_power_w"] = *s.system.max_power_w;
  doc["system"] = sys;

  if (s.pcg) {
    json pcg;
    pcg["receivers"] = json::array();
    for (Receiver r : s.pcg->receivers) pcg["receivers"].push_back(std::string(to_string(r)));
    if (!s.pcg->total_loads.empty()) pcg["total_loads"] = s.pcg->total_loads;
    pcg["classes"] = json::array();
    for (const PcgClassConfig& c : s.pcg->classes) {
      json cj = {{"name", c.name}, {"rate_bps", c.rate_bps}};
      if (c.requirement) {
        cj["max_transmissions"] = c.requirement->max_transmissions();
        cj["confidence"] = c.requirement->confidence();
      }
      pcg["classes"].push_back(cj);
    }
    if (s.pcg->split) pcg["split"] = axis_json(*s.pcg->split);
    if (!s.pcg->users.empty()) {
      pcg["users"] = json::array();
      for (const PcgUserGroup& u : s.pcg->users) {
        pcg["users"].push_back({{"class", u.class_name}, {"gain", u.gain}, {"count", u.count}});
      }
    }
    doc["pcg"] = pcg;
  }
  if (s.prcg) {
    json prcg;
    if (!s.prcg->delay_bounds_s.empty()) prcg["delay_bounds_s"] = s.prcg->delay_bounds_s;
    if (s.prcg->sweep) prcg["sweep"] = axis_json(*s.prcg->sweep);
    if (!s.prcg->users.empty()) {
      prcg["users"] = json::array();
      for (const PrcgUserGroup& u : s.prcg->users) {
        json uj = {{"arrival_rate_pps", u.arrival_rate_pps},
                   {"delay_bound_s", u.delay_bound_s},
                   {"gain", u.gain},
                   {"count", u.count}};
        if (u.max_power_w) uj["max_power_w"] = *u.max_power_w;
        prcg["users"].push_back(uj);
      }
    }
    doc["prcg"] = prcg;
  }
  json out = json::object();
  if (!s.output.csv.empty()) out["csv"] = s.output.csv;
  if (!s.output.summary.empty()) out["summary"] = s.output.summary;
  doc["output"] = out;
  return doc;
}

}  // namespace qosgame
