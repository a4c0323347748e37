#pragma once

#include <cstdint>

#include "eehc/radio.hpp"

namespace eehc {

// Head-set clustering layout. A round is ceil(n/(k*m)) iterations; each
// iteration elects k cluster heads, each head recruits m-1 associates into
// its head-set, and the head-set shares the n_frames data frames of the
// iteration's transfer stage.
struct ClusterConfig {
  std::int64_t n = 1000;       // nodes
  std::int64_t k = 14;         // clusters per iteration
  std::int64_t m = 6;          // head-set size
  std::int64_t l = 2000;       // bits per message
  std::int64_t n_frames = 10000;  // frames per transfer stage
  double d_bs = 150.0;         // representative node-to-sink distance, m
  double d_intra = 25.0;       // representative intra-cluster distance, m
  double field_side = 100.0;   // deployment square side, m

  double nodes_per_cluster() const {
    return static_cast<double>(n) / static_cast<double>(k);
  }

  // Requires n,k,m,l >= 1, n_frames >= 0, m <= n/k, k <= n, positive
  // distances allowed to be zero. Throws std::invalid_argument naming the
  // field and the violated rule.
  void validate() const;
};

struct ElectionEnergies {
  double ch;      // one head: cluster-wide status broadcast + join acks
  double non_ch;  // one ordinary node: hears all k broadcasts + join request
};

struct FrameEnergies {
  double ch;      // active head, one frame: member payloads in + long haul out
  double non_ch;  // ordinary member, one frame: payload to its head
};

struct StageFractions {
  double f1;  // fraction of node-frames spent as the active head
  double f2;  // fraction spent as an ordinary member
};

struct StageEnergies {
  double ch;      // expected per-node transfer-stage energy, head share
  double non_ch;  // expected per-node transfer-stage energy, member share
};

struct FramesSupported {
  double frames;
  bool energy_deficit;  // budget below the election cost; frames clamped to 0
};

struct IterationsPerRound {
  std::int64_t count;
  bool remainder;  // n not divisible by k*m; count was rounded up
};

// Full per-node energy budget for one iteration plus the derived columns
// the reporting layer emits. Field order here is the CSV column order.
struct EnergyReport {
  double e_ch_elec = 0;
  double e_nonch_elec = 0;
  double e_ch_frame = 0;
  double e_nonch_frame = 0;
  double e_ch_data = 0;
  double e_nonch_data = 0;
  double e_start = 0;
  double f1 = 0;
  double f2 = 0;
  std::int64_t iterations_per_round = 0;
};

ElectionEnergies election_energies(const ClusterConfig& c, const RadioParams& p);
FrameEnergies frame_energies(const ClusterConfig& c, const RadioParams& p);

// f1 = (1/k) / (n/k - m + 1), f2 = 1/k - f1. The subtraction form keeps
// f1 + f2 within one ulp of 1/k.
StageFractions stage_fractions(const ClusterConfig& c);

StageEnergies stage_energies(const ClusterConfig& c, const RadioParams& p);

// Per-node energy needed to survive one full iteration:
//   (election.ch + election.non_ch)/m + (n_frames/m)*(f1*frame.ch + f2*frame.non_ch)
double start_energy(const ClusterConfig& c, const RadioParams& p);

// Inverse of start_energy in n_frames: how many transfer-stage frames a
// budget sustains. Exact inverse (round trip within 1e-12 relative).
FramesSupported frames_supported(double e_start_j, const ClusterConfig& c,
                                 const RadioParams& p);

IterationsPerRound iterations_per_round(const ClusterConfig& c);

EnergyReport energy_report(const ClusterConfig& c, const RadioParams& p);

// The closed-form optimum k ignores m, n_frames and electronics energy:
//   k = sqrt(n / (2*pi)) * sqrt(per_bit_energy(d)) * field_side
// with per_bit_energy the short-range amplifier energy at distance d.
// snr_mode picks how S/N enters that expression's sensitivity term.
enum class SnrMode {
  kPhysical,      // lin(S/N): the dB value converted to a power ratio
  kPaperDbCompat  // the raw dB number used directly as the ratio
};

// Unrounded k; this is what sweeps and calibration emit.
double optimal_clusters_raw(std::int64_t n, const RadioParams& p,
                            double distance_m, double field_side_m,
                            SnrMode mode = SnrMode::kPhysical);

// Nearest integer, clamped to [1, n].
std::int64_t optimal_clusters_closed(std::int64_t n, const RadioParams& p,
                                     double distance_m, double field_side_m,
                                     SnrMode mode = SnrMode::kPhysical);

struct OptimalScan {
  std::int64_t k;
  double e_start;
};

// Exhaustive argmin of start_energy over integer k in [k_lo, k_hi],
// skipping infeasible k (m > n/k). Ties break toward smaller k.
// Throws std::invalid_argument if no feasible k exists in range.
OptimalScan optimal_clusters_numeric(const ClusterConfig& base,
                                     const RadioParams& p, std::int64_t k_lo,
                                     std::int64_t k_hi);

}  // namespace eehc
