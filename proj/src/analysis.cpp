#include "eehc/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eehc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* field, const char* rule) {
  if (!ok) {
    throw std::invalid_argument(std::string("cluster.") + field + ": " + rule);
  }
}

}  // namespace

void ClusterConfig::validate() const {
  require(n >= 1, "n", "must be >= 1");
  require(k >= 1, "k", "must be >= 1");
  require(k <= n, "k", "must be <= n");
  require(m >= 1, "m", "must be >= 1");
  require(static_cast<double>(m) <= nodes_per_cluster(), "m",
          "must be <= n/k (head-set cannot exceed the cluster)");
  require(l >= 1, "l", "must be >= 1");
  require(n_frames >= 0, "n_frames", "must be >= 0");
  require(d_bs >= 0 && std::isfinite(d_bs), "d_bs", "must be finite and >= 0");
  require(d_intra >= 0 && std::isfinite(d_intra), "d_intra",
          "must be finite and >= 0");
  require(field_side > 0 && std::isfinite(field_side), "field_side",
          "must be > 0");
}

ElectionEnergies election_energies(const ClusterConfig& c,
                                   const RadioParams& p) {
  c.validate();
  const double l = static_cast<double>(c.l);
  const double members = c.nodes_per_cluster() - 1.0;  // join acks per head
  const double rx_unit = rx_energy(p, l);
  ElectionEnergies e;
  // Head: status broadcast across the cluster + one receive per join.
  e.ch = tx_energy(p, l, c.d_intra, RangeClass::kShort) + members * rx_unit;
  // Ordinary node: hears every head's broadcast, then one join request.
  e.non_ch = tx_energy(p, l, c.d_intra, RangeClass::kShort) +
             static_cast<double>(c.k) * rx_unit;
  return e;
}

FrameEnergies frame_energies(const ClusterConfig& c, const RadioParams& p) {
  c.validate();
  const double l = static_cast<double>(c.l);
  const double senders = c.nodes_per_cluster() - static_cast<double>(c.m);
  FrameEnergies e;
  e.ch = tx_energy(p, l, c.d_bs, RangeClass::kLong) +
         senders * rx_energy(p, l);
  e.non_ch = tx_energy(p, l, c.d_intra, RangeClass::kShort);
  return e;
}

StageFractions stage_fractions(const ClusterConfig& c) {
  c.validate();
  const double q = 1.0 / static_cast<double>(c.k);
  const double slots = c.nodes_per_cluster() - static_cast<double>(c.m) + 1.0;
  StageFractions f;
  f.f1 = q / slots;
  f.f2 = q - f.f1;  // keeps f1 + f2 within one ulp of 1/k
  return f;
}

StageEnergies stage_energies(const ClusterConfig& c, const RadioParams& p) {
  const StageFractions f = stage_fractions(c);
  const FrameEnergies fe = frame_energies(c, p);
  const double frames = static_cast<double>(c.n_frames);
  return {f.f1 * frames * fe.ch, f.f2 * frames * fe.non_ch};
}

double start_energy(const ClusterConfig& c, const RadioParams& p) {
  const ElectionEnergies el = election_energies(c, p);
  const StageFractions f = stage_fractions(c);
  const FrameEnergies fe = frame_energies(c, p);
  const double m = static_cast<double>(c.m);
  const double frames = static_cast<double>(c.n_frames);
  return (el.ch + el.non_ch) / m +
         (frames / m) * (f.f1 * fe.ch + f.f2 * fe.non_ch);
}

FramesSupported frames_supported(double e_start_j, const ClusterConfig& c,
                                 const RadioParams& p) {
  if (!std::isfinite(e_start_j) || e_start_j < 0) {
    throw std::invalid_argument("e_start_j: must be finite and >= 0");
  }
  const ElectionEnergies el = election_energies(c, p);
  const StageFractions f = stage_fractions(c);
  const FrameEnergies fe = frame_energies(c, p);
  const double m = static_cast<double>(c.m);
  const double per_frame = f.f1 * fe.ch + f.f2 * fe.non_ch;
  if (per_frame <= 0) {
    throw std::invalid_argument(
        "frames_supported: zero per-frame energy, budget is unbounded");
  }
  const double frames = (e_start_j - (el.ch + el.non_ch) / m) * m / per_frame;
  if (frames < 0) return {0.0, true};
  return {frames, false};
}

IterationsPerRound iterations_per_round(const ClusterConfig& c) {
  c.validate();
  const std::int64_t per_iter = c.k * c.m;
  IterationsPerRound r;
  r.count = (c.n + per_iter - 1) / per_iter;
  r.remainder = (c.n % per_iter) != 0;
  return r;
}

EnergyReport energy_report(const ClusterConfig& c, const RadioParams& p) {
  EnergyReport r;
  const ElectionEnergies el = election_energies(c, p);
  const FrameEnergies fe = frame_energies(c, p);
  const StageEnergies st = stage_energies(c, p);
  const StageFractions f = stage_fractions(c);
  r.e_ch_elec = el.ch;
  r.e_nonch_elec = el.non_ch;
  r.e_ch_frame = fe.ch;
  r.e_nonch_frame = fe.non_ch;
  r.e_ch_data = st.ch;
  r.e_nonch_data = st.non_ch;
  r.e_start = start_energy(c, p);
  r.f1 = f.f1;
  r.f2 = f.f2;
  r.iterations_per_round = iterations_per_round(c).count;
  return r;
}

namespace {

// per_bit_energy with the chosen S/N convention. The compat mode exists
// because the reference optimal cluster counts only come out if the S/N
// decibel figure is fed into the sensitivity product as a plain ratio.
double per_bit_energy_mode(const RadioParams& p, double d, SnrMode mode) {
  if (mode == SnrMode::kPhysical) return per_bit_energy(p, d);
  if (!(p.snr_min_db > 0)) {
    throw std::invalid_argument(
        "radio.snr_min_db: must be > 0 in paper-db-compat mode");
  }
  RadioParams q = p;
  // Replace lin(S/N) by the raw dB number: scale the noise floor by
  // snr_db / lin(snr_db) and keep everything else identical.
  q.snr_min_db = 0.0;  // lin -> 1
  q.thermal_noise_floor = p.thermal_noise_floor * p.snr_min_db;
  return per_bit_energy(q, d);
}

}  // namespace

double optimal_clusters_raw(std::int64_t n, const RadioParams& p,
                            double distance_m, double field_side_m,
                            SnrMode mode) {
  if (n < 1) throw std::invalid_argument("n: must be >= 1");
  if (!(distance_m > 0) || !std::isfinite(distance_m)) {
    throw std::invalid_argument("distance_m: must be > 0");
  }
  if (!(field_side_m > 0) || !std::isfinite(field_side_m)) {
    throw std::invalid_argument("field_side_m: must be > 0");
  }
  p.validate();
  // As printed the root's argument keeps its joules-per-bit units; the
  // field-side constant absorbs the scale. Downstream figures rely on the
  // ratio structure across n, eta and S/N, which this preserves.
  const double eps_short = per_bit_energy_mode(p, distance_m, mode);
  return std::sqrt(static_cast<double>(n) / (2.0 * kPi)) *
         std::sqrt(eps_short) * field_side_m;
}

std::int64_t optimal_clusters_closed(std::int64_t n, const RadioParams& p,
                                     double distance_m, double field_side_m,
                                     SnrMode mode) {
  const double raw = optimal_clusters_raw(n, p, distance_m, field_side_m, mode);
  const double rounded = std::nearbyint(raw);
  if (rounded < 1) return 1;
  if (rounded > static_cast<double>(n)) return n;
  return static_cast<std::int64_t>(rounded);
}

OptimalScan optimal_clusters_numeric(const ClusterConfig& base,
                                     const RadioParams& p, std::int64_t k_lo,
                                     std::int64_t k_hi) {
  if (k_lo < 1 || k_hi < k_lo) {
    throw std::invalid_argument("optimal_clusters_numeric: bad k range");
  }
  OptimalScan best{-1, 0.0};
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    ClusterConfig c = base;
    c.k = k;
    if (k > c.n) break;
    if (static_cast<double>(c.m) > c.nodes_per_cluster()) continue;
    const double e = start_energy(c, p);
    if (best.k < 0 || e < best.e_start) {  // strict <: ties keep smaller k
      best = {k, e};
    }
  }
  if (best.k < 0) {
    throw std::invalid_argument(
        "optimal_clusters_numeric: no feasible k in range");
  }
  return best;
}

}  // namespace eehc
