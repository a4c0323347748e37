#include "eehc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eehc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool integral_valued(double v) {
  return std::isfinite(v) && v == std::nearbyint(v);
}

std::int64_t to_count(const std::string& name, double v) {
  if (!integral_valued(v)) {
    throw std::invalid_argument("axis " + name +
                                ": count parameter needs integral values");
  }
  return static_cast<std::int64_t>(v);
}

// Returns false for unknown names; writes into whichever struct owns the field.
bool apply_parameter(RadioParams& r, ClusterConfig& c, const std::string& name,
                     double v) {
  if (name == "snr_min_db") r.snr_min_db = v;
  else if (name == "noise_factor_db") r.noise_factor_db = v;
  else if (name == "thermal_noise_floor") r.thermal_noise_floor = v;
  else if (name == "bandwidth_hz") r.bandwidth_hz = v;
  else if (name == "wavelength_m") r.wavelength_m = v;
  else if (name == "antenna_gain_product") r.antenna_gain_product = v;
  else if (name == "pa_efficiency") r.pa_efficiency = v;
  else if (name == "path_loss_exponent") r.path_loss_exponent = v;
  else if (name == "bit_rate") r.bit_rate = v;
  else if (name == "electronics_power_w") r.electronics_power_w = v;
  else if (name == "elec_energy_per_bit") r.elec_energy_per_bit = v;
  else if (name == "beamform_energy_per_bit") r.beamform_energy_per_bit = v;
  else if (name == "long_range_amp") r.long_range_amp = v;
  else if (name == "reference_distance_m") r.reference_distance_m = v;
  else if (name == "n") c.n = to_count(name, v);
  else if (name == "k") c.k = to_count(name, v);
  else if (name == "m") c.m = to_count(name, v);
  else if (name == "l") c.l = to_count(name, v);
  else if (name == "n_frames") c.n_frames = to_count(name, v);
  else if (name == "d_bs") c.d_bs = v;
  else if (name == "d_intra") c.d_intra = v;
  else if (name == "field_side") c.field_side = v;
  else return false;
  return true;
}

const char* const kOutputNames[] = {
    "e_ch_elec",   "e_nonch_elec", "e_ch_frame", "e_nonch_frame",
    "e_ch_data",   "e_nonch_data", "e_start",    "f1",
    "f2",          "iterations_per_round",       "per_bit_energy",
    "optimal_k_closed", "optimal_k_numeric",
};

bool known_output(const std::string& name) {
  for (const char* n : kOutputNames) {
    if (name == n) return true;
  }
  return false;
}

bool wants_report(const std::vector<std::string>& outputs) {
  for (const auto& o : outputs) {
    if (o != "per_bit_energy" && o != "optimal_k_closed" &&
        o != "optimal_k_numeric") {
      return true;
    }
  }
  return false;
}

void evaluate_point(const SweepSpec& spec, std::int64_t flat,
                    std::vector<double>& row) {
  row.clear();
  RadioParams radio = spec.base_radio;
  ClusterConfig cluster = spec.base_cluster;

  // Row-major decode, first axis slowest.
  std::int64_t rem = flat;
  std::vector<double> axis_vals(spec.axes.size());
  for (std::size_t i = spec.axes.size(); i-- > 0;) {
    const auto& ax = spec.axes[i];
    const std::int64_t len = static_cast<std::int64_t>(ax.values.size());
    axis_vals[i] = ax.values[static_cast<std::size_t>(rem % len)];
    rem /= len;
  }
  for (std::size_t i = 0; i < spec.axes.size(); ++i) {
    row.push_back(axis_vals[i]);
    apply_parameter(radio, cluster, spec.axes[i].name, axis_vals[i]);
  }

  bool feasible = true;
  EnergyReport report;
  try {
    radio.validate();
    cluster.validate();
    if (wants_report(spec.outputs)) report = energy_report(cluster, radio);
  } catch (const std::invalid_argument&) {
    feasible = false;
  }

  for (const auto& out : spec.outputs) {
    double v = kNaN;
    if (feasible) {
      try {
        if (out == "e_ch_elec") v = report.e_ch_elec;
        else if (out == "e_nonch_elec") v = report.e_nonch_elec;
        else if (out == "e_ch_frame") v = report.e_ch_frame;
        else if (out == "e_nonch_frame") v = report.e_nonch_frame;
        else if (out == "e_ch_data") v = report.e_ch_data;
        else if (out == "e_nonch_data") v = report.e_nonch_data;
        else if (out == "e_start") v = report.e_start;
        else if (out == "f1") v = report.f1;
        else if (out == "f2") v = report.f2;
        else if (out == "iterations_per_round")
          v = static_cast<double>(report.iterations_per_round);
        else if (out == "per_bit_energy")
          v = per_bit_energy(radio, cluster.d_intra);
        else if (out == "optimal_k_closed")
          v = optimal_clusters_raw(cluster.n, radio, cluster.d_bs,
                                   cluster.field_side, spec.snr_mode);
        else if (out == "optimal_k_numeric")
          v = static_cast<double>(
              optimal_clusters_numeric(cluster, radio, 1,
                                       std::min(spec.numeric_k_hi, cluster.n))
                  .k);
      } catch (const std::invalid_argument&) {
        v = kNaN;  // e.g. no feasible k for the numeric scan at this point
      }
    }
    row.push_back(v);
  }
  row.push_back(feasible ? 1.0 : 0.0);
}

SweepTable run_impl(const SweepSpec& spec, bool parallel) {
  spec.validate();
  const std::int64_t total = spec.total_points();

  SweepTable table;
  for (const auto& ax : spec.axes) table.header.push_back(ax.name);
  for (const auto& out : spec.outputs) table.header.push_back(out);
  table.header.push_back("feasible");
  table.rows.assign(static_cast<std::size_t>(total), {});

#ifdef _OPENMP
  if (parallel) {
    const int threads = sweep_thread_count();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < total; ++i) {
      evaluate_point(spec, i, table.rows[static_cast<std::size_t>(i)]);
    }
    return table;
  }
#else
  (void)parallel;
#endif
  for (std::int64_t i = 0; i < total; ++i) {
    evaluate_point(spec, i, table.rows[static_cast<std::size_t>(i)]);
  }
  return table;
}

std::vector<double> iota_values(std::int64_t lo, std::int64_t hi) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t x = lo; x <= hi; ++x) v.push_back(static_cast<double>(x));
  return v;
}

}  // namespace

std::int64_t SweepSpec::total_points() const {
  std::int64_t total = 1;
  for (const auto& ax : axes) {
    total *= static_cast<std::int64_t>(ax.values.size());
  }
  return total;
}

void SweepSpec::validate() const {
  base_radio.validate();
  if (axes.empty()) {
    throw std::invalid_argument("sweep: needs at least one axis");
  }
  if (outputs.empty()) {
    throw std::invalid_argument("sweep: needs at least one output");
  }
  std::int64_t total = 1;
  for (const auto& ax : axes) {
    RadioParams r;
    ClusterConfig c;
    if (!apply_parameter(r, c, ax.name, 1.0)) {
      throw std::invalid_argument("sweep: unknown parameter '" + ax.name + "'");
    }
    if (ax.values.empty()) {
      throw std::invalid_argument("sweep: axis '" + ax.name + "' is empty");
    }
    for (double v : ax.values) apply_parameter(r, c, ax.name, v);  // type check
    for (const auto& other : axes) {
      if (&other != &ax && other.name == ax.name) {
        throw std::invalid_argument("sweep: duplicate axis '" + ax.name + "'");
      }
    }
    total *= static_cast<std::int64_t>(ax.values.size());
    if (total > 1000000) {
      throw std::invalid_argument("sweep: grid exceeds 1e6 points");
    }
  }
  for (const auto& out : outputs) {
    if (!known_output(out)) {
      throw std::invalid_argument("sweep: unknown output '" + out + "'");
    }
  }
  if (numeric_k_hi < 1) {
    throw std::invalid_argument("sweep: numeric_k_hi must be >= 1");
  }
}

SweepTable run_sweep(const SweepSpec& spec) { return run_impl(spec, true); }

SweepTable run_sweep_serial(const SweepSpec& spec) {
  return run_impl(spec, false);
}

int sweep_thread_count() {
#ifdef _OPENMP
  if (const char* env = std::getenv("EEHC_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Axis spans not stated in the captions follow the figures' visible ranges:
// k in 1..50 (1..100 where a crossover must be bracketed), m in 1..20.
// Unstated scenario constants stay at the defaults (n = 1000, l = 2000,
// N_f = 10000, d_bs = 150, d_intra = 25, field_side = 100). "Network
// diameter" axes map to d_bs. Optimal-k presets pin base k = 1 so the grid
// stays feasible at large swept m; k is an output there, not an input.
SweepSpec figure_preset(const std::string& name) {
  SweepSpec s;
  const std::vector<double> k_axis = iota_values(1, 50);
  const std::vector<double> m_axis = iota_values(1, 20);
  const std::vector<double> diam = {100, 150, 200};
  const std::vector<double> frames = {10000, 25000, 50000};

  if (name == "fig3a") {
    s.base_cluster.k = 1;
    s.axes = {{"n", {1000, 1500, 2000}}, {"m", m_axis}};
    s.outputs = {"optimal_k_closed", "optimal_k_numeric"};
  } else if (name == "fig3b") {
    s.base_cluster.k = 1;
    s.axes = {{"n", {1000, 1500, 2000}}, {"m", {100, 200, 300}}};
    s.outputs = {"optimal_k_closed", "optimal_k_numeric"};
  } else if (name == "fig5") {
    s.axes = {{"d_bs", diam}, {"m", m_axis}};
    s.outputs = {"e_ch_data", "e_nonch_data"};
  } else if (name == "fig6") {
    s.base_cluster.k = 1;
    s.snr_mode = SnrMode::kPaperDbCompat;
    s.axes = {{"snr_min_db", {10, 20, 30}}, {"m", m_axis}};
    s.outputs = {"optimal_k_closed", "optimal_k_numeric"};
  } else if (name == "fig7") {
    s.base_cluster.k = 1;
    s.axes = {{"pa_efficiency", {0.6, 0.4, 0.2}}, {"m", m_axis}};
    s.outputs = {"optimal_k_closed", "optimal_k_numeric"};
  } else if (name == "fig8") {
    s.base_cluster.m = 1;
    s.axes = {{"k", k_axis}, {"d_bs", {150, 400}}};
    s.outputs = {"e_start"};
  } else if (name == "fig9a" || name == "fig9b") {
    s.base_cluster.m = name == "fig9a" ? 1 : 3;
    s.axes = {{"k", k_axis}, {"n_frames", frames}};
    s.outputs = {"e_start"};
  } else if (name == "fig10a" || name == "fig10b") {
    s.base_cluster.m = name == "fig10a" ? 1 : 3;
    s.axes = {{"k", k_axis}};
    s.outputs = {"e_ch_data", "e_nonch_data"};
  } else if (name == "fig11") {
    s.base_cluster.m = 1;
    s.axes = {{"k", k_axis}, {"d_bs", diam}};
    s.outputs = {"e_start"};
  } else if (name == "fig12") {
    s.base_cluster.m = 1;
    s.axes = {{"k", k_axis}, {"d_bs", diam}, {"n_frames", frames}};
    s.outputs = {"e_start"};
  } else if (name == "fig13") {
    s.axes = {{"m", {1, 3}}, {"k", k_axis}, {"d_bs", diam}};
    s.outputs = {"e_ch_data", "e_nonch_data", "e_start"};
  } else if (name == "fig14") {
    s.axes = {{"m", {1, 3}}, {"k", iota_values(1, 100)}};
    s.outputs = {"e_ch_data", "e_nonch_data"};
  } else {
    std::string msg = "unknown preset '" + name + "'; valid:";
    for (const auto& p : figure_preset_names()) msg += " " + p;
    throw std::invalid_argument(msg);
  }
  return s;
}

std::vector<std::string> figure_preset_names() {
  return {"fig3a", "fig3b", "fig5",   "fig6",   "fig7",  "fig8",  "fig9a",
          "fig9b", "fig10a", "fig10b", "fig11", "fig12", "fig13", "fig14"};
}

}  // namespace eehc
