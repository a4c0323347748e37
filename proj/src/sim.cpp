#include "eehc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "eehc/csv.hpp"

namespace eehc {

void EnergyLedger::add(double v) {
  // Neumaier variant: the compensation also survives |v| > |sum|.
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v)) {
    comp += (sum - t) + v;
  } else {
    comp += (v - t) + sum;
  }
  sum = t;
}

std::int64_t SimState::live_count() const {
  std::int64_t live = 0;
  for (const auto& nd : nodes) live += nd.alive ? 1 : 0;
  return live;
}

double SimState::residual_total() const {
  double total = 0;
  for (const auto& nd : nodes) total += nd.residual_j;
  return total;
}

namespace {

double dist2(double ax, double ay, double bx, double by) {
  const double dx = ax - bx;
  const double dy = ay - by;
  return dx * dx + dy * dy;
}

double dist(double ax, double ay, double bx, double by) {
  return std::sqrt(dist2(ax, ay, bx, by));
}

// Per-message costs with the radio validated once up front; the frame loop
// sees ~1e8 debits per lifetime, so no per-event validation or pow calls.
struct CostModel {
  double msg_bits;
  double elec;        // msg_bits * elec_energy_per_bit
  double rx_unit;     // rx_energy(msg_bits)
  double short_coef;  // msg_bits * amplifier energy per bit at d = 1
  double alpha;
  double long_coef;   // msg_bits * long_range_amp

  double short_cost(double d) const {
    const double amp = alpha == 2.0 ? d * d : std::pow(d, alpha);
    return elec + short_coef * amp;
  }
  double long_cost(double d) const {
    const double d2 = d * d;
    return elec + long_coef * d2 * d2;
  }
};

CostModel make_cost_model(const RadioParams& p, std::int64_t l) {
  p.validate();
  CostModel cm;
  cm.msg_bits = static_cast<double>(l);
  cm.elec = cm.msg_bits * p.elec_energy_per_bit;
  cm.rx_unit = rx_energy(p, cm.msg_bits);
  cm.short_coef = cm.msg_bits * per_bit_energy(p, 1.0);
  cm.alpha = p.path_loss_exponent;
  cm.long_coef = cm.msg_bits * p.long_range_amp;
  return cm;
}

void check_scenario(const SimState& s, const ClusterConfig& c) {
  c.validate();
  if (c.n != static_cast<std::int64_t>(s.nodes.size())) {
    throw std::invalid_argument("sim: cluster.n does not match the node count");
  }
}

// Debits `amount` from nd, routing every joule through the ledger. A node
// that cannot cover the debit loses what it has and dies; the caller skips
// its remaining traffic for the event.
inline bool debit(SimState& s, Node& nd, double amount, const char* event) {
  if (amount <= nd.residual_j) {
    nd.residual_j -= amount;
    s.ledger.add(amount);
    if (s.trace) {
      *s.trace << event << ',' << nd.id << ',' << format_number(amount) << ','
               << format_number(nd.residual_j) << '\n';
    }
    return true;
  }
  s.ledger.add(nd.residual_j);
  if (s.trace) {
    *s.trace << "death," << nd.id << ',' << format_number(nd.residual_j)
             << ",0\n";
  }
  nd.residual_j = 0;
  nd.alive = false;
  return false;
}

}  // namespace

SimState init_network(std::uint64_t seed, std::int64_t n, double field_side,
                      double d_bs_offset, double start_energy_j) {
  if (n < 1) throw std::invalid_argument("sim: n must be >= 1");
  if (!(field_side > 0) || !std::isfinite(field_side)) {
    throw std::invalid_argument("sim: field_side must be > 0");
  }
  if (!(start_energy_j >= 0) || !std::isfinite(start_energy_j)) {
    throw std::invalid_argument("sim: start energy must be finite and >= 0");
  }
  if (!(d_bs_offset >= 0) || !std::isfinite(d_bs_offset)) {
    throw std::invalid_argument("sim: d_bs_offset must be finite and >= 0");
  }
  SimState s;
  s.seed = seed;
  s.rng = Rng(seed);
  s.nodes.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Node& nd = s.nodes[static_cast<std::size_t>(i)];
    nd.id = i;
    nd.x = s.rng.uniform(0.0, field_side);
    nd.y = s.rng.uniform(0.0, field_side);
    nd.residual_j = start_energy_j;
  }
  s.bs_x = field_side / 2.0;
  s.bs_y = field_side / 2.0 + d_bs_offset;
  s.initial_total_j = s.residual_total();
  return s;
}

SimState make_state(std::vector<Node> nodes, double bs_x, double bs_y,
                    std::uint64_t seed) {
  if (nodes.empty()) throw std::invalid_argument("sim: needs at least one node");
  SimState s;
  s.seed = seed;
  s.rng = Rng(seed);
  s.nodes = std::move(nodes);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    s.nodes[i].id = static_cast<std::int64_t>(i);
  }
  s.bs_x = bs_x;
  s.bs_y = bs_y;
  s.initial_total_j = s.residual_total();
  return s;
}

ElectionResult election_phase(SimState& s, const ClusterConfig& c,
                              const RadioParams& p) {
  check_scenario(s, c);
  if (s.live_count() < c.k * c.m) return ElectionResult::kTooFewLive;
  const CostModel cm = make_cost_model(p, c.l);

  // Candidate pool: live nodes that have not yet served this round. When
  // the remainder of n/(k*m) leaves fewer than k, eligibility resets early
  // (counted; some nodes then serve twice in the round).
  std::vector<std::int32_t> eligible;
  eligible.reserve(s.nodes.size());
  auto collect = [&] {
    eligible.clear();
    for (const auto& nd : s.nodes) {
      if (nd.alive && !nd.served_this_round) {
        eligible.push_back(static_cast<std::int32_t>(nd.id));
      }
    }
  };
  collect();
  if (static_cast<std::int64_t>(eligible.size()) < c.k) {
    for (auto& nd : s.nodes) {
      if (nd.alive) nd.served_this_round = false;
    }
    ++s.eligibility_resets;
    collect();
  }

  // The sink draws k heads uniformly (partial Fisher-Yates over the pool).
  for (std::int64_t i = 0; i < c.k; ++i) {
    const auto j = i + static_cast<std::int64_t>(
                           s.rng.below(eligible.size() - static_cast<std::size_t>(i)));
    std::swap(eligible[static_cast<std::size_t>(i)],
              eligible[static_cast<std::size_t>(j)]);
  }
  std::vector<std::int32_t> heads(eligible.begin(), eligible.begin() + c.k);
  std::sort(heads.begin(), heads.end());

  for (auto& nd : s.nodes) {
    nd.role = NodeRole::kMember;
    nd.cluster = -1;
    nd.frames_active = 0;
    nd.frames_as_member = 0;
  }

  s.clusters.assign(static_cast<std::size_t>(c.k), SimCluster{});
  for (std::size_t ci = 0; ci < heads.size(); ++ci) {
    s.clusters[ci].head = heads[ci];
    s.nodes[static_cast<std::size_t>(heads[ci])].cluster =
        static_cast<std::int64_t>(ci);
  }

  // Geometric assignment first: every live non-head picks the nearest head
  // (ties toward the lower head id). Broadcast reach is the farthest such
  // node, so it is needed before any energy moves.
  std::vector<double> reach(heads.size(), 0.0);
  std::vector<std::vector<std::int32_t>> joined(heads.size());
  for (const auto& nd : s.nodes) {
    if (!nd.alive || nd.cluster >= 0) continue;
    std::size_t best = 0;
    double best_d2 = dist2(nd.x, nd.y, s.nodes[static_cast<std::size_t>(heads[0])].x,
                           s.nodes[static_cast<std::size_t>(heads[0])].y);
    for (std::size_t ci = 1; ci < heads.size(); ++ci) {
      const Node& h = s.nodes[static_cast<std::size_t>(heads[ci])];
      const double d2 = dist2(nd.x, nd.y, h.x, h.y);
      if (d2 < best_d2) {
        best = ci;
        best_d2 = d2;
      }
    }
    joined[best].push_back(static_cast<std::int32_t>(nd.id));
    reach[best] = std::max(reach[best], std::sqrt(best_d2));
  }

  // Heads announce themselves across their reach.
  std::vector<double> head_spend(heads.size(), 0.0);
  for (std::size_t ci = 0; ci < heads.size(); ++ci) {
    Node& h = s.nodes[static_cast<std::size_t>(heads[ci])];
    const double cost = cm.short_cost(reach[ci]);
    if (debit(s, h, cost, "elect_broadcast_tx")) {
      head_spend[ci] += cost;
      s.short_dist_sum += reach[ci];
      ++s.short_dist_count;
    }
  }

  // Every live non-head hears all k announcements (one combined debit),
  // then sends one join request to its head, which banks one receive per
  // join it is still alive to take.
  const double hear_all = static_cast<double>(c.k) * cm.rx_unit;
  for (std::size_t ci = 0; ci < heads.size(); ++ci) {
    Node& h = s.nodes[static_cast<std::size_t>(heads[ci])];
    auto& cl = s.clusters[ci];
    for (const std::int32_t id : joined[ci]) {
      Node& nd = s.nodes[static_cast<std::size_t>(id)];
      if (!debit(s, nd, hear_all, "elect_rx_broadcasts")) continue;
      const double d = dist(nd.x, nd.y, h.x, h.y);
      const double join_cost = cm.short_cost(d);
      if (!debit(s, nd, join_cost, "elect_join_tx")) continue;
      s.short_dist_sum += d;
      ++s.short_dist_count;
      nd.cluster = static_cast<std::int64_t>(ci);
      cl.members.push_back(id);
      if (h.alive && debit(s, h, cm.rx_unit, "elect_join_rx")) {
        head_spend[ci] += cm.rx_unit;
      }
      s.nonch_elec_sum += hear_all + join_cost;
      ++s.nonch_elec_count;
    }
    if (h.alive) {
      s.ch_elec_sum += head_spend[ci];
      ++s.ch_elec_count;
    }
  }

  // Head-set recruitment honors the rotation contract: only nodes that have
  // not yet served this round may be recruited, so each completed round
  // serves every live node exactly once. Each head takes its strongest
  // unserved members (highest residual, lower id as the tiebreak); a cluster
  // that runs short borrows the strongest unserved nodes from the rest of
  // the field, and only when nobody unserved remains anywhere does
  // eligibility reset early (counted).
  auto by_strength = [&](std::int32_t a, std::int32_t b) {
    const Node& na = s.nodes[static_cast<std::size_t>(a)];
    const Node& nb = s.nodes[static_cast<std::size_t>(b)];
    if (na.residual_j != nb.residual_j) return na.residual_j > nb.residual_j;
    return a < b;
  };
  auto recruit = [&](std::size_t ci, std::int32_t id) {
    Node& nd = s.nodes[static_cast<std::size_t>(id)];
    nd.role = NodeRole::kHeadsetSleeping;
    nd.served_this_round = true;
    nd.cluster = static_cast<std::int64_t>(ci);
    ++nd.times_elected;
    s.clusters[ci].headset.push_back(id);
  };
  for (std::size_t ci = 0; ci < heads.size(); ++ci) {
    auto& cl = s.clusters[ci];
    const Node& h = s.nodes[static_cast<std::size_t>(heads[ci])];
    cl.headset.clear();
    if (h.alive) recruit(ci, heads[ci]);
    std::vector<std::int32_t> pool;
    for (const std::int32_t id : cl.members) {
      const Node& nd = s.nodes[static_cast<std::size_t>(id)];
      if (nd.alive && !nd.served_this_round) pool.push_back(id);
    }
    std::sort(pool.begin(), pool.end(), by_strength);
    for (const std::int32_t id : pool) {
      if (static_cast<std::int64_t>(cl.headset.size()) >= c.m) break;
      recruit(ci, id);
    }
  }
  auto unserved_pool = [&] {
    std::vector<std::int32_t> pool;
    for (const auto& nd : s.nodes) {
      if (nd.alive && nd.role == NodeRole::kMember && !nd.served_this_round) {
        pool.push_back(static_cast<std::int32_t>(nd.id));
      }
    }
    std::sort(pool.begin(), pool.end(), by_strength);
    return pool;
  };
  std::vector<std::int32_t> borrow = unserved_pool();
  std::size_t next = 0;
  bool reset_done = false;
  for (std::size_t ci = 0; ci < heads.size(); ++ci) {
    while (static_cast<std::int64_t>(s.clusters[ci].headset.size()) < c.m) {
      if (next == borrow.size()) {
        if (reset_done) break;
        for (auto& nd : s.nodes) {
          if (nd.alive && nd.role == NodeRole::kMember) {
            nd.served_this_round = false;
          }
        }
        ++s.eligibility_resets;
        reset_done = true;
        borrow = unserved_pool();
        next = 0;
        if (borrow.empty()) break;
        continue;
      }
      recruit(ci, borrow[next]);
      ++next;
    }
  }

  for (std::size_t ci = 0; ci < heads.size(); ++ci) {
    auto& cl = s.clusters[ci];
    // Members are whoever joined and did not get recruited anywhere.
    std::vector<std::int32_t> rest;
    rest.reserve(cl.members.size());
    for (const std::int32_t id : cl.members) {
      if (s.nodes[static_cast<std::size_t>(id)].role == NodeRole::kMember) {
        rest.push_back(id);
      }
    }
    cl.members = std::move(rest);

    // Frame-loop cost tables: member -> head-set slot, slot -> sink.
    const std::size_t nm = cl.members.size();
    cl.member_cost.resize(cl.headset.size() * nm);
    cl.member_dist.resize(cl.headset.size() * nm);
    cl.long_cost.resize(cl.headset.size());
    cl.long_dist.resize(cl.headset.size());
    for (std::size_t a = 0; a < cl.headset.size(); ++a) {
      const Node& ha = s.nodes[static_cast<std::size_t>(cl.headset[a])];
      for (std::size_t j = 0; j < nm; ++j) {
        const Node& nd = s.nodes[static_cast<std::size_t>(cl.members[j])];
        const double d = dist(nd.x, nd.y, ha.x, ha.y);
        cl.member_dist[a * nm + j] = d;
        cl.member_cost[a * nm + j] = cm.short_cost(d);
      }
      const double db = dist(ha.x, ha.y, s.bs_x, s.bs_y);
      cl.long_dist[a] = db;
      cl.long_cost[a] = cm.long_cost(db);
    }
  }

  ++s.iteration;
  return ElectionResult::kOk;
}

void data_transfer_phase(SimState& s, const ClusterConfig& c,
                         const RadioParams& p) {
  check_scenario(s, c);
  if (c.n_frames == 0 || s.clusters.empty()) return;
  const CostModel cm = make_cost_model(p, c.l);

  for (std::int64_t f = 0; f < c.n_frames; ++f) {
    for (auto& cl : s.clusters) {
      const std::size_t hs = cl.headset.size();
      if (hs == 0) continue;

      // Round-robin duty; dead slots are skipped, a fully dead head-set
      // leaves the cluster dark for the frame.
      std::size_t a = static_cast<std::size_t>(f) % hs;
      std::size_t tried = 0;
      while (tried < hs &&
             !s.nodes[static_cast<std::size_t>(cl.headset[a])].alive) {
        a = (a + 1) % hs;
        ++tried;
      }
      if (tried == hs) continue;
      Node& head = s.nodes[static_cast<std::size_t>(cl.headset[a])];
      head.role = NodeRole::kHeadsetActive;

      const std::size_t nm = cl.members.size();
      const double* cost = cl.member_cost.data() + a * nm;
      const double* dst = cl.member_dist.data() + a * nm;
      std::int64_t received = 0;
      for (std::size_t j = 0; j < nm; ++j) {
        Node& nd = s.nodes[static_cast<std::size_t>(cl.members[j])];
        if (!nd.alive) continue;
        if (debit(s, nd, cost[j], "frame_member_tx")) {
          ++received;
          ++nd.frames_as_member;
          s.nonch_frame_sum += cost[j];
          ++s.nonch_frame_count;
          s.short_dist_sum += dst[j];
          ++s.short_dist_count;
        }
      }

      double head_spend = 0;
      bool head_ok = true;
      if (received > 0) {
        const double rx_batch = static_cast<double>(received) * cm.rx_unit;
        head_ok = debit(s, head, rx_batch, "frame_head_rx");
        head_spend += rx_batch;
      }
      if (head_ok && debit(s, head, cl.long_cost[a], "frame_head_tx_long")) {
        head_spend += cl.long_cost[a];
        s.ch_frame_sum += head_spend;
        ++s.ch_frame_count;
        s.long_dist_sum += cl.long_dist[a];
        ++s.long_dist_count;
        ++head.frames_active;
      }
      if (head.alive) head.role = NodeRole::kHeadsetSleeping;
    }
  }
}

RoundResult run_round(SimState& s, const ClusterConfig& c,
                      const RadioParams& p) {
  check_scenario(s, c);
  for (auto& nd : s.nodes) {
    if (nd.alive) nd.served_this_round = false;
  }
  const std::int64_t iters = iterations_per_round(c).count;
  const double before = s.ledger.value();
  RoundResult r;
  r.completed = true;
  for (std::int64_t i = 0; i < iters; ++i) {
    if (election_phase(s, c, p) != ElectionResult::kOk) {
      r.completed = false;
      break;
    }
    data_transfer_phase(s, c, p);
    ++r.iterations;
  }
  ++s.round;
  r.energy_j = s.ledger.value() - before;
  return r;
}

SimMetrics run_lifetime(SimState& s, const ClusterConfig& c,
                        const RadioParams& p, std::int64_t max_rounds,
                        bool stop_at_first_death) {
  check_scenario(s, c);
  if (max_rounds < 0) {
    throw std::invalid_argument("sim: max_rounds must be >= 0");
  }
  SimMetrics m;
  m.n = c.n;
  m.k = c.k;
  m.m = c.m;
  m.l = c.l;
  m.n_frames = c.n_frames;
  m.seed = s.seed;

  double completed_energy = 0;
  std::int64_t completed_rounds = 0;
  for (std::int64_t r = 0; r < max_rounds; ++r) {
    const std::int64_t live_before = s.live_count();
    if (live_before < c.k * c.m) break;
    const RoundResult rr = run_round(s, c, p);
    const std::int64_t live_after = s.live_count();
    RoundRow row;
    row.round = s.round;
    row.iterations = rr.iterations;
    row.energy_j = rr.energy_j;
    row.alive_end = live_after;
    row.deaths = live_before - live_after;
    m.rounds.push_back(row);
    m.iterations_completed += rr.iterations;
    if (rr.completed) {
      ++completed_rounds;
      completed_energy += rr.energy_j;
    }
    if (m.first_death_round < 0 && row.deaths > 0) {
      m.first_death_round = s.round;
    }
    if (!rr.completed) break;
    if (stop_at_first_death && m.first_death_round >= 0) break;
  }

  m.rounds_completed = completed_rounds;
  m.alive_end = s.live_count();
  m.total_energy_j = s.ledger.value();
  if (completed_rounds > 0) {
    m.mean_node_round_j =
        completed_energy / static_cast<double>(completed_rounds) /
        static_cast<double>(c.n);
  }
  m.iteration_time_s = static_cast<double>(c.n + c.n_frames) *
                       static_cast<double>(c.l) / p.bit_rate;
  if (s.ch_elec_count) {
    m.mean_ch_elec_j = s.ch_elec_sum / static_cast<double>(s.ch_elec_count);
  }
  if (s.nonch_elec_count) {
    m.mean_nonch_elec_j =
        s.nonch_elec_sum / static_cast<double>(s.nonch_elec_count);
  }
  if (s.ch_frame_count) {
    m.mean_ch_frame_j = s.ch_frame_sum / static_cast<double>(s.ch_frame_count);
  }
  if (s.nonch_frame_count) {
    m.mean_nonch_frame_j =
        s.nonch_frame_sum / static_cast<double>(s.nonch_frame_count);
  }
  m.measured_d_intra_m =
      s.short_dist_count
          ? s.short_dist_sum / static_cast<double>(s.short_dist_count)
          : c.d_intra;
  m.measured_d_bs_m =
      s.long_dist_count
          ? s.long_dist_sum / static_cast<double>(s.long_dist_count)
          : c.d_bs;
  return m;
}

AnalyticComparison analytic_comparison(const SimMetrics& metrics,
                                       const ClusterConfig& c,
                                       const RadioParams& p) {
  if (metrics.n != c.n || metrics.k != c.k || metrics.m != c.m ||
      metrics.l != c.l || metrics.n_frames != c.n_frames) {
    throw std::invalid_argument(
        "analytic_comparison: metrics came from different parameters");
  }
  AnalyticComparison r;
  r.measured = c;
  r.measured.d_intra = metrics.measured_d_intra_m;
  r.measured.d_bs = metrics.measured_d_bs_m;

  const ElectionEnergies el = election_energies(r.measured, p);
  const FrameEnergies fe = frame_energies(r.measured, p);
  r.predicted_ch_elec = el.ch;
  r.predicted_nonch_elec = el.non_ch;
  r.predicted_ch_frame = fe.ch;
  r.predicted_nonch_frame = fe.non_ch;
  // start_energy budgets one node for a whole round, so the simulated
  // counterpart is the network round energy spread over the n nodes.
  r.predicted_node_round_j =
      static_cast<double>(c.n) * start_energy(r.measured, p);

  const auto rel = [](double simulated, double predicted) {
    if (predicted == 0) return simulated == 0 ? 0.0 : 1.0;
    return (simulated - predicted) / predicted;
  };
  r.err_ch_elec = rel(metrics.mean_ch_elec_j, r.predicted_ch_elec);
  r.err_nonch_elec = rel(metrics.mean_nonch_elec_j, r.predicted_nonch_elec);
  r.err_ch_frame = rel(metrics.mean_ch_frame_j, r.predicted_ch_frame);
  r.err_nonch_frame = rel(metrics.mean_nonch_frame_j, r.predicted_nonch_frame);
  r.err_node_round = rel(metrics.mean_node_round_j, r.predicted_node_round_j);
  return r;
}

}  // namespace eehc
