#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eehc/analysis.hpp"

namespace eehc {

// One swept parameter. Recognized names: any RadioParams field
// (snr_min_db, noise_factor_db, thermal_noise_floor, bandwidth_hz,
// wavelength_m, antenna_gain_product, pa_efficiency, path_loss_exponent,
// bit_rate, electronics_power_w, elec_energy_per_bit,
// beamform_energy_per_bit, long_range_amp, reference_distance_m) or any
// ClusterConfig field (n, k, m, l, n_frames, d_bs, d_intra, field_side).
// Count fields must be integral-valued.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

// Recognized outputs: e_ch_elec, e_nonch_elec, e_ch_frame, e_nonch_frame,
// e_ch_data, e_nonch_data, e_start, f1, f2, iterations_per_round,
// per_bit_energy (evaluated at d_intra), optimal_k_closed (unrounded),
// optimal_k_numeric.
struct SweepSpec {
  RadioParams base_radio;
  ClusterConfig base_cluster;
  std::vector<SweepAxis> axes;          // row-major, first axis slowest
  std::vector<std::string> outputs;
  SnrMode snr_mode = SnrMode::kPhysical;
  std::int64_t numeric_k_hi = 200;      // scan ceiling for optimal_k_numeric

  std::int64_t total_points() const;
  // Axis names and outputs recognized, every axis non-empty, grid at most
  // 1e6 points. Throws std::invalid_argument with the offending name.
  void validate() const;
};

struct SweepTable {
  std::vector<std::string> header;  // axes..., outputs..., "feasible"
  std::vector<std::vector<double>> rows;
};

// Grid evaluation, one row per point in row-major axis order. Points whose
// parameter combination fails validation get feasible = 0 and NaN outputs.
// Parallelized over points; rows land in preallocated slots so the result
// is bit-identical to run_sweep_serial.
SweepTable run_sweep(const SweepSpec& spec);

// Plain loop used as the reference implementation in tests and benchmarks.
SweepTable run_sweep_serial(const SweepSpec& spec);

// Thread cap for run_sweep: EEHC_LAB_THREADS if set (>=1), else OpenMP
// default. Returns 1 when built without OpenMP.
int sweep_thread_count();

// Canned sweeps regenerating the reference figure datasets. Unknown names
// throw std::invalid_argument listing the valid ones.
SweepSpec figure_preset(const std::string& name);
std::vector<std::string> figure_preset_names();

}  // namespace eehc
