#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eehc/analysis.hpp"
#include "eehc/rng.hpp"

namespace eehc {

enum class NodeRole : std::uint8_t { kMember, kHeadsetSleeping, kHeadsetActive };

struct Node {
  std::int64_t id = 0;
  double x = 0, y = 0;
  double residual_j = 0;
  NodeRole role = NodeRole::kMember;
  std::int64_t cluster = -1;        // index into the current iteration's clusters
  std::int64_t times_elected = 0;   // head-set memberships over the node's life
  std::int64_t frames_active = 0;   // frames led this iteration (test hook)
  std::int64_t frames_as_member = 0;  // payload frames sent this iteration
  bool alive = true;
  bool served_this_round = false;
};

// Neumaier-compensated running sum. The global debit ledger sees ~1e8 events
// per simulated lifetime; plain summation drifts past the 1e-9 conservation
// tolerance long before that.
struct EnergyLedger {
  double sum = 0;
  double comp = 0;

  void add(double v);
  double value() const { return sum + comp; }
};

// Per-iteration cluster layout. Rebuilt by each election; consumed by the
// transfer stage.
struct SimCluster {
  std::int64_t head = -1;              // elected head, always in headset
  std::vector<std::int32_t> headset;   // rotation order
  std::vector<std::int32_t> members;   // everyone else, ascending id
  std::vector<double> member_cost;     // [a * members.size() + j] short tx j -> headset[a]
  std::vector<double> member_dist;     // same layout, metres
  std::vector<double> long_cost;       // per headset slot: payload to the sink
  std::vector<double> long_dist;
};

struct SimState {
  std::vector<Node> nodes;
  std::vector<SimCluster> clusters;  // layout of the most recent election
  double bs_x = 0, bs_y = 0;
  std::int64_t round = 0;
  std::int64_t iteration = 0;
  std::uint64_t seed = 0;
  Rng rng{0};
  EnergyLedger ledger;          // every joule ever debited from any node
  double initial_total_j = 0;   // sum of starting residuals

  // Measured traffic statistics, accumulated over the state's whole life.
  double short_dist_sum = 0;
  std::int64_t short_dist_count = 0;
  double long_dist_sum = 0;
  std::int64_t long_dist_count = 0;
  double ch_elec_sum = 0;       // per elected head per election
  std::int64_t ch_elec_count = 0;
  double nonch_elec_sum = 0;    // per ordinary node per election
  std::int64_t nonch_elec_count = 0;
  double ch_frame_sum = 0;      // per active head per frame
  std::int64_t ch_frame_count = 0;
  double nonch_frame_sum = 0;   // per member payload sent
  std::int64_t nonch_frame_count = 0;

  std::int64_t eligibility_resets = 0;  // times a round ran out of unserved nodes
  std::ostream* trace = nullptr;        // optional per-debit audit stream

  std::int64_t live_count() const;
  double residual_total() const;
};

// Uniform node placement over the field square, sink at
// (field/2, field/2 + d_bs_offset). Same seed, same state, bit for bit.
SimState init_network(std::uint64_t seed, std::int64_t n, double field_side,
                      double d_bs_offset, double start_energy_j);

// Test hook: wraps externally built nodes (ids reassigned 0..n-1).
SimState make_state(std::vector<Node> nodes, double bs_x, double bs_y,
                    std::uint64_t seed);

enum class ElectionResult { kOk, kTooFewLive };

// One election: the sink draws k heads from live, not-yet-served nodes
// (resetting eligibility, counted, if fewer than k remain), heads broadcast,
// every live non-head hears all k broadcasts and joins the nearest head
// (ties toward the lower head id), each head banks one receive per join,
// then recruits its head-set (m highest-residual members, unserved
// preferred, ties toward lower id, head always included). Marks the
// head-set served and charges every cost through the ledger.
ElectionResult election_phase(SimState& s, const ClusterConfig& c,
                              const RadioParams& p);

// n_frames frames against the layout left by election_phase. Head-set slots
// lead frames round-robin (slot = frame % headset size, skipping dead
// slots); the active head banks every member payload and one long-range
// shot to the sink; sleeping head-set members spend nothing. A node that
// cannot cover a debit loses its residual, dies, and its remaining traffic
// is skipped.
void data_transfer_phase(SimState& s, const ClusterConfig& c,
                         const RadioParams& p);

struct RoundResult {
  double energy_j = 0;          // exactly ledger_after - ledger_before
  std::int64_t iterations = 0;
  bool completed = false;       // false if an election found too few nodes
};

// ceil(n/(k*m)) iterations of election + transfer. Clears served flags on
// entry so every live node serves exactly once per completed round.
RoundResult run_round(SimState& s, const ClusterConfig& c,
                      const RadioParams& p);

struct RoundRow {
  std::int64_t round = 0;
  std::int64_t iterations = 0;
  double energy_j = 0;
  std::int64_t alive_end = 0;
  std::int64_t deaths = 0;
};

struct SimMetrics {
  // Scenario echo, so analytic comparisons can refuse mismatched configs.
  std::int64_t n = 0, k = 0, m = 0, l = 0, n_frames = 0;
  std::uint64_t seed = 0;

  std::int64_t rounds_completed = 0;
  std::int64_t iterations_completed = 0;
  std::int64_t first_death_round = -1;  // -1: nobody died
  std::int64_t alive_end = 0;
  double total_energy_j = 0;
  double mean_node_round_j = 0;  // network round energy / n, mean over rounds
  double iteration_time_s = 0;   // (n + n_frames) * l / bit_rate
  double mean_ch_elec_j = 0;
  double mean_nonch_elec_j = 0;
  double mean_ch_frame_j = 0;
  double mean_nonch_frame_j = 0;
  double measured_d_intra_m = 0;  // mean short-range tx distance
  double measured_d_bs_m = 0;     // mean long-range tx distance
  std::vector<RoundRow> rounds;
};

// Runs rounds until max_rounds, an election failure, or (optionally) the
// round in which the first node died.
SimMetrics run_lifetime(SimState& s, const ClusterConfig& c,
                        const RadioParams& p, std::int64_t max_rounds,
                        bool stop_at_first_death = false);

struct AnalyticComparison {
  ClusterConfig measured;    // c with d_intra/d_bs replaced by measured means
  double predicted_ch_elec = 0;
  double predicted_nonch_elec = 0;
  double predicted_ch_frame = 0;
  double predicted_nonch_frame = 0;
  double predicted_node_round_j = 0;  // n * start_energy(measured): per-node round budget
  double err_ch_elec = 0;      // relative errors, simulated vs predicted
  double err_nonch_elec = 0;
  double err_ch_frame = 0;
  double err_nonch_frame = 0;
  double err_node_round = 0;
};

// Rechecks the measured role energies and the per-node round energy against
// the closed-form budget evaluated at the measured mean distances. Throws
// std::invalid_argument if metrics and c disagree on n/k/m/l/n_frames.
AnalyticComparison analytic_comparison(const SimMetrics& metrics,
                                       const ClusterConfig& c,
                                       const RadioParams& p);

}  // namespace eehc
