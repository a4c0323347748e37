#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eehc/analysis.hpp"
#include "eehc/sweep.hpp"

namespace eehc {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Everything a run needs, resolved from (defaults <- config file <- CLI
// flags), later wins. Config documents are flat JSON objects with dotted
// keys, e.g. {"radio.pa_efficiency": 0.4, "cluster.n": 1500, "sim.seed": 7}.
struct RunConfig {
  RadioParams radio;
  ClusterConfig cluster;

  std::uint64_t seed = 1;
  std::int64_t max_rounds = 10;
  bool stop_at_first_death = false;
  std::optional<double> node_energy_j;  // sim battery; default n * start_energy

  std::optional<std::string> preset;    // sweep preset name
  std::vector<SweepAxis> axes;          // custom sweep, used when no preset
  std::vector<std::string> outputs;
  SnrMode snr_mode = SnrMode::kPhysical;

  std::int64_t optimal_k_lo = 1;        // numeric scan range for optimal-k
  std::int64_t optimal_k_hi = 200;
};

// Parses a flat dotted-key JSON document. Unknown keys and ill-typed values
// raise ConfigError naming the key. Missing keys keep defaults.
RunConfig parse_config_text(const std::string& json_text);

RunConfig default_config();

// Resolved-run sidecar: full parameter echo, tool version, RNG definition,
// snr mode, seed. Deterministic key order, no timestamps.
std::string metadata_json(const RunConfig& cfg, const std::string& command);

}  // namespace eehc
