#include "eehc/config.hpp"

#include "eehc/version.hpp"
#include "json.hpp"

namespace eehc {

namespace {

using ordered_json = nlohmann::ordered_json;

double want_number(const std::string& key, const ordered_json& v) {
  if (!v.is_number()) {
    throw ConfigError("config: key '" + key + "' expects a number");
  }
  return v.get<double>();
}

std::int64_t want_count(const std::string& key, const ordered_json& v) {
  if (!v.is_number_integer()) {
    throw ConfigError("config: key '" + key + "' expects an integer");
  }
  return v.get<std::int64_t>();
}

std::uint64_t want_u64(const std::string& key, const ordered_json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError("config: key '" + key + "' expects a non-negative integer");
}

bool want_bool(const std::string& key, const ordered_json& v) {
  if (!v.is_boolean()) {
    throw ConfigError("config: key '" + key + "' expects a boolean");
  }
  return v.get<bool>();
}

std::string want_string(const std::string& key, const ordered_json& v) {
  if (!v.is_string()) {
    throw ConfigError("config: key '" + key + "' expects a string");
  }
  return v.get<std::string>();
}

bool set_radio_key(RadioParams& r, const std::string& field,
                   const std::string& key, const ordered_json& v) {
  if (field == "snr_min_db") r.snr_min_db = want_number(key, v);
  else if (field == "noise_factor_db") r.noise_factor_db = want_number(key, v);
  else if (field == "thermal_noise_floor")
    r.thermal_noise_floor = want_number(key, v);
  else if (field == "bandwidth_hz") r.bandwidth_hz = want_number(key, v);
  else if (field == "wavelength_m") r.wavelength_m = want_number(key, v);
  else if (field == "antenna_gain_product")
    r.antenna_gain_product = want_number(key, v);
  else if (field == "pa_efficiency") r.pa_efficiency = want_number(key, v);
  else if (field == "path_loss_exponent")
    r.path_loss_exponent = want_number(key, v);
  else if (field == "bit_rate") r.bit_rate = want_number(key, v);
  else if (field == "electronics_power_w")
    r.electronics_power_w = want_number(key, v);
  else if (field == "elec_energy_per_bit")
    r.elec_energy_per_bit = want_number(key, v);
  else if (field == "beamform_energy_per_bit")
    r.beamform_energy_per_bit = want_number(key, v);
  else if (field == "long_range_amp") r.long_range_amp = want_number(key, v);
  else if (field == "reference_distance_m")
    r.reference_distance_m = want_number(key, v);
  else return false;
  return true;
}

bool set_cluster_key(ClusterConfig& c, const std::string& field,
                     const std::string& key, const ordered_json& v) {
  if (field == "n") c.n = want_count(key, v);
  else if (field == "k") c.k = want_count(key, v);
  else if (field == "m") c.m = want_count(key, v);
  else if (field == "l") c.l = want_count(key, v);
  else if (field == "n_frames") c.n_frames = want_count(key, v);
  else if (field == "d_bs") c.d_bs = want_number(key, v);
  else if (field == "d_intra") c.d_intra = want_number(key, v);
  else if (field == "field_side") c.field_side = want_number(key, v);
  else return false;
  return true;
}

void set_key(RunConfig& cfg, const std::string& key, const ordered_json& v) {
  const auto dot = key.find('.');
  const std::string group = dot == std::string::npos ? key : key.substr(0, dot);
  const std::string field = dot == std::string::npos ? "" : key.substr(dot + 1);

  if (group == "radio" && set_radio_key(cfg.radio, field, key, v)) return;
  if (group == "cluster" && set_cluster_key(cfg.cluster, field, key, v)) return;
  if (group == "sim") {
    if (field == "seed") {
      cfg.seed = want_u64(key, v);
      return;
    }
    if (field == "max_rounds") {
      cfg.max_rounds = want_count(key, v);
      return;
    }
    if (field == "node_energy_j") {
      cfg.node_energy_j = want_number(key, v);
      return;
    }
    if (field == "stop_at_first_death") {
      cfg.stop_at_first_death = want_bool(key, v);
      return;
    }
  }
  if (group == "sweep") {
    if (field == "preset") {
      cfg.preset = want_string(key, v);
      return;
    }
    if (field == "axes") {
      if (!v.is_object()) {
        throw ConfigError("config: key 'sweep.axes' expects an object of "
                          "parameter -> value list");
      }
      cfg.axes.clear();
      for (const auto& [name, list] : v.items()) {
        if (!list.is_array() || list.empty()) {
          throw ConfigError("config: axis '" + name +
                            "' expects a non-empty array");
        }
        SweepAxis ax;
        ax.name = name;
        for (const auto& item : list) {
          ax.values.push_back(want_number("sweep.axes." + name, item));
        }
        cfg.axes.push_back(std::move(ax));
      }
      return;
    }
    if (field == "outputs") {
      if (!v.is_array()) {
        throw ConfigError("config: key 'sweep.outputs' expects an array");
      }
      cfg.outputs.clear();
      for (const auto& item : v) {
        cfg.outputs.push_back(want_string("sweep.outputs", item));
      }
      return;
    }
  }
  if (group == "optimizer") {
    if (field == "k_lo") {
      cfg.optimal_k_lo = want_count(key, v);
      return;
    }
    if (field == "k_hi") {
      cfg.optimal_k_hi = want_count(key, v);
      return;
    }
  }
  if (key == "snr_mode") {
    const std::string mode = want_string(key, v);
    if (mode == "physical") cfg.snr_mode = SnrMode::kPhysical;
    else if (mode == "paper_db_compat") cfg.snr_mode = SnrMode::kPaperDbCompat;
    else
      throw ConfigError(
          "config: snr_mode must be 'physical' or 'paper_db_compat'");
    return;
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

ordered_json radio_json(const RadioParams& r) {
  ordered_json j;
  j["snr_min_db"] = r.snr_min_db;
  j["noise_factor_db"] = r.noise_factor_db;
  j["thermal_noise_floor"] = r.thermal_noise_floor;
  j["bandwidth_hz"] = r.bandwidth_hz;
  j["wavelength_m"] = r.wavelength_m;
  j["antenna_gain_product"] = r.antenna_gain_product;
  j["pa_efficiency"] = r.pa_efficiency;
  j["path_loss_exponent"] = r.path_loss_exponent;
  j["bit_rate"] = r.bit_rate;
  j["electronics_power_w"] = r.electronics_power_w;
  j["elec_energy_per_bit"] = r.elec_energy_per_bit;
  j["beamform_energy_per_bit"] = r.beamform_energy_per_bit;
  j["long_range_amp"] = r.long_range_amp;
  j["reference_distance_m"] = r.reference_distance_m;
  return j;
}

ordered_json cluster_json(const ClusterConfig& c) {
  ordered_json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["m"] = c.m;
  j["l"] = c.l;
  j["n_frames"] = c.n_frames;
  j["d_bs"] = c.d_bs;
  j["d_intra"] = c.d_intra;
  j["field_side"] = c.field_side;
  return j;
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config_text(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config: document must be a JSON object");
  }
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    set_key(cfg, key, value);
  }
  cfg.radio.validate();
  cfg.cluster.validate();
  if (cfg.max_rounds < 0) {
    throw ConfigError("config: sim.max_rounds must be >= 0");
  }
  if (cfg.node_energy_j && !(*cfg.node_energy_j >= 0)) {
    throw ConfigError("config: sim.node_energy_j must be >= 0");
  }
  if (cfg.optimal_k_lo < 1 || cfg.optimal_k_hi < cfg.optimal_k_lo) {
    throw ConfigError("config: optimizer.k_lo/k_hi must satisfy 1 <= lo <= hi");
  }
  return cfg;
}

std::string metadata_json(const RunConfig& cfg, const std::string& command) {
  ordered_json j;
  j["tool"] = "eehc-lab";
  j["version"] = kVersion;
  j["command"] = command;
  j["rng"] = kRngDescription;
  j["snr_mode"] =
      cfg.snr_mode == SnrMode::kPhysical ? "physical" : "paper_db_compat";
  j["seed"] = cfg.seed;
  j["max_rounds"] = cfg.max_rounds;
  j["stop_at_first_death"] = cfg.stop_at_first_death;
  if (cfg.node_energy_j) {
    j["node_energy_j"] = *cfg.node_energy_j;
  } else {
    j["node_energy_j"] = nullptr;  // default battery resolved at run time
  }
  if (cfg.preset) {
    j["preset"] = *cfg.preset;
  } else {
    j["preset"] = nullptr;
  }
  j["radio"] = radio_json(cfg.radio);
  j["cluster"] = cluster_json(cfg.cluster);
  if (!cfg.axes.empty()) {
    ordered_json axes;
    for (const auto& ax : cfg.axes) axes[ax.name] = ax.values;
    j["sweep_axes"] = axes;
  }
  if (!cfg.outputs.empty()) j["sweep_outputs"] = cfg.outputs;
  j["optimizer_k_lo"] = cfg.optimal_k_lo;
  j["optimizer_k_hi"] = cfg.optimal_k_hi;
  return j.dump(2) + "\n";
}

}  // namespace eehc
