#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "eehc/sim.hpp"

using namespace eehc;

namespace {

ClusterConfig cfg(std::int64_t n, std::int64_t k, std::int64_t m,
                  std::int64_t nf, double d_bs = 150.0,
                  double d_intra = 25.0) {
  ClusterConfig c;
  c.n = n;
  c.k = k;
  c.m = m;
  c.l = 2000;
  c.n_frames = nf;
  c.d_bs = d_bs;
  c.d_intra = d_intra;
  return c;
}

double conservation_error(const SimState& s) {
  return (s.initial_total_j - s.residual_total() - s.ledger.value()) /
         s.initial_total_j;
}

std::vector<Node> colocated(std::int64_t n, double x, double y, double e) {
  std::vector<Node> nodes(static_cast<std::size_t>(n));
  for (auto& nd : nodes) {
    nd.x = x;
    nd.y = y;
    nd.residual_j = e;
  }
  return nodes;
}

}  // namespace

TEST_CASE("network initialization") {
  const SimState a = init_network(42, 500, 100.0, 150.0, 2.0);
  const SimState b = init_network(42, 500, 100.0, 150.0, 2.0);
  const SimState c = init_network(43, 500, 100.0, 150.0, 2.0);
  REQUIRE(a.nodes.size() == 500);
  CHECK(a.bs_x == 50.0);
  CHECK(a.bs_y == 200.0);
  CHECK(a.initial_total_j == 1000.0);
  bool same = true, diff = false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    same = same && a.nodes[i].x == b.nodes[i].x && a.nodes[i].y == b.nodes[i].y;
    diff = diff || a.nodes[i].x != c.nodes[i].x;
    CHECK(a.nodes[i].x >= 0.0);
    CHECK(a.nodes[i].x <= 100.0);
    CHECK(a.nodes[i].y >= 0.0);
    CHECK(a.nodes[i].y <= 100.0);
    CHECK(a.nodes[i].residual_j == 2.0);
    CHECK(a.nodes[i].id == static_cast<std::int64_t>(i));
    CHECK(a.nodes[i].alive);
  }
  CHECK(same);
  CHECK(diff);

  // Uniform placement: the empirical centroid of 10^4 draws stays within
  // three standard errors of the field centre.
  const SimState big = init_network(7, 10000, 100.0, 150.0, 1.0);
  double sx = 0, sy = 0;
  for (const auto& nd : big.nodes) {
    sx += nd.x;
    sy += nd.y;
  }
  const double bound = 3.0 * (100.0 / std::sqrt(12.0)) / 100.0;  // 3 sigma/sqrt(n)
  CHECK(std::abs(sx / 10000.0 - 50.0) < bound);
  CHECK(std::abs(sy / 10000.0 - 50.0) < bound);
}

TEST_CASE("single-cluster election") {
  RadioParams p;
  const ClusterConfig c = cfg(50, 1, 3, 0);
  SimState s = init_network(5, 50, 100.0, 150.0, 10.0);
  REQUIRE(election_phase(s, c, p) == ElectionResult::kOk);
  REQUIRE(s.clusters.size() == 1);
  const SimCluster& cl = s.clusters[0];
  CHECK(cl.headset.size() == 3);
  CHECK(cl.members.size() == 47);
  CHECK(cl.headset[0] == cl.head);
  std::int64_t served = 0, elected = 0;
  for (const auto& nd : s.nodes) {
    CHECK(nd.cluster == 0);
    served += nd.served_this_round ? 1 : 0;
    elected += nd.times_elected;
  }
  CHECK(served == 3);
  CHECK(elected == 3);
  CHECK(s.ledger.value() > 0.0);
  CHECK(std::abs(conservation_error(s)) < 1e-9);
  CHECK(s.iteration == 1);

  // Members are listed in ascending id and costed against every slot.
  for (std::size_t i = 1; i < cl.members.size(); ++i) {
    CHECK(cl.members[i] > cl.members[i - 1]);
  }
  CHECK(cl.member_cost.size() == cl.headset.size() * cl.members.size());
  CHECK(cl.long_cost.size() == 3);
}

TEST_CASE("join ties break toward the lower head id") {
  RadioParams p;
  SimState s = make_state(colocated(4, 50.0, 50.0, 5.0), 50.0, 200.0, 9);
  const ClusterConfig c = cfg(4, 2, 1, 0, 150.0, 0.0);
  REQUIRE(election_phase(s, c, p) == ElectionResult::kOk);
  REQUIRE(s.clusters.size() == 2);
  CHECK(s.clusters[0].head < s.clusters[1].head);
  CHECK(s.clusters[0].members.size() == 2);
  CHECK(s.clusters[1].members.empty());
}

TEST_CASE("election refuses an underpopulated network") {
  RadioParams p;
  SimState s = init_network(3, 5, 100.0, 150.0, 10.0);
  s.nodes[1].alive = false;
  s.nodes[4].alive = false;
  CHECK(election_phase(s, cfg(5, 2, 2, 0), p) == ElectionResult::kTooFewLive);
  CHECK(s.ledger.value() == 0.0);
}

TEST_CASE("transfer stage frame accounting") {
  RadioParams p;
  const ClusterConfig c = cfg(30, 2, 3, 10);
  SimState s = init_network(11, 30, 100.0, 150.0, 100.0);
  REQUIRE(election_phase(s, c, p) == ElectionResult::kOk);
  const double after_election = s.ledger.value();
  data_transfer_phase(s, c, p);
  CHECK(s.ledger.value() > after_election);

  for (const auto& cl : s.clusters) {
    std::int64_t led = 0;
    for (std::int32_t id : cl.headset) {
      const Node& nd = s.nodes[static_cast<std::size_t>(id)];
      CHECK(nd.frames_active >= 3);  // 10 frames over 3 slots
      CHECK(nd.frames_active <= 4);
      led += nd.frames_active;
    }
    CHECK(led == 10);
    for (std::int32_t id : cl.members) {
      CHECK(s.nodes[static_cast<std::size_t>(id)].frames_as_member == 10);
    }
  }

  // An empty schedule moves nothing.
  SimState idle = init_network(11, 30, 100.0, 150.0, 100.0);
  const ClusterConfig c0 = cfg(30, 2, 3, 0);
  REQUIRE(election_phase(idle, c0, p) == ElectionResult::kOk);
  const double before = idle.ledger.value();
  data_transfer_phase(idle, c0, p);
  CHECK(idle.ledger.value() == before);
}

TEST_CASE("a round serves every node exactly once") {
  RadioParams p;
  const ClusterConfig c = cfg(120, 4, 3, 5);
  SimState s = init_network(17, 120, 100.0, 150.0, 1000.0);
  const double before = s.ledger.value();
  const RoundResult r = run_round(s, c, p);
  CHECK(r.completed);
  CHECK(r.iterations == 10);  // 120 / (4 * 3)
  CHECK(r.energy_j == s.ledger.value() - before);
  CHECK(s.eligibility_resets == 0);
  for (const auto& nd : s.nodes) {
    CHECK(nd.times_elected == 1);
    CHECK(nd.served_this_round);
  }

  // Second round rotates service again.
  REQUIRE(run_round(s, c, p).completed);
  for (const auto& nd : s.nodes) {
    CHECK(nd.times_elected == 2);
  }
  CHECK(std::abs(conservation_error(s)) < 1e-9);
}

TEST_CASE("depletion, death and conservation") {
  RadioParams p;
  const ClusterConfig c = cfg(50, 5, 2, 200);
  SimState s = init_network(29, 50, 100.0, 150.0, 0.05);
  for (int r = 0; r < 6; ++r) {
    if (s.live_count() < c.k * c.m) break;
    run_round(s, c, p);
  }
  CHECK(s.live_count() < 50);
  for (const auto& nd : s.nodes) {
    CHECK(nd.residual_j >= 0.0);
    if (!nd.alive) CHECK(nd.residual_j == 0.0);
  }
  CHECK(std::abs(conservation_error(s)) < 1e-9);

  // Dead nodes never come back.
  std::vector<bool> dead;
  for (const auto& nd : s.nodes) dead.push_back(!nd.alive);
  if (s.live_count() >= c.k * c.m) run_round(s, c, p);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (dead[i]) CHECK(!s.nodes[i].alive);
  }
}

TEST_CASE("lifetime metrics") {
  RadioParams p;
  const ClusterConfig c = cfg(100, 5, 2, 100);
  SimState s = init_network(101, 100, 100.0, 150.0, 1e6);
  const SimMetrics m = run_lifetime(s, c, p, 3);
  CHECK(m.rounds_completed == 3);
  CHECK(m.iterations_completed == 30);
  CHECK(m.first_death_round == -1);
  CHECK(m.alive_end == 100);
  CHECK(m.rounds.size() == 3);
  CHECK(m.total_energy_j == s.ledger.value());
  CHECK(m.iteration_time_s == 200.0 * 2000.0 / 1e6);
  CHECK(m.mean_node_round_j > 0.0);
  CHECK(m.measured_d_intra_m > 0.0);
  CHECK(m.measured_d_bs_m > 100.0);
  CHECK(m.seed == 101);

  // Bit-for-bit repeatable.
  SimState s2 = init_network(101, 100, 100.0, 150.0, 1e6);
  const SimMetrics m2 = run_lifetime(s2, c, p, 3);
  CHECK(m.total_energy_j == m2.total_energy_j);
  CHECK(m.mean_node_round_j == m2.mean_node_round_j);
  CHECK(m.measured_d_intra_m == m2.measured_d_intra_m);
  CHECK(m.measured_d_bs_m == m2.measured_d_bs_m);

  // More frames, longer iterations.
  const ClusterConfig c2 = cfg(100, 5, 2, 400);
  SimState s3 = init_network(101, 100, 100.0, 150.0, 1e6);
  CHECK(run_lifetime(s3, c2, p, 1).iteration_time_s > m.iteration_time_s);
}

TEST_CASE("battery sized to the analytic budget dies on schedule") {
  RadioParams p;
  const ClusterConfig c = cfg(100, 5, 2, 500);
  const double e1 = start_energy(c, p);

  // One iteration's head-set budget cannot carry a full round of duty.
  SimState starved = init_network(3, 100, 100.0, 150.0, e1);
  const SimMetrics ms = run_lifetime(starved, c, p, 4);
  CHECK(ms.first_death_round == 1);
  CHECK(std::abs(conservation_error(starved)) < 1e-9);

  // The network-scaled budget survives about one round.
  SimState scaled = init_network(3, 100, 100.0, 150.0, 100.0 * e1);
  const SimMetrics mn = run_lifetime(scaled, c, p, 4);
  CHECK(mn.first_death_round >= 1);
  CHECK(mn.first_death_round <= 2);
  CHECK(std::abs(conservation_error(scaled)) < 1e-9);

  // stop_at_first_death halts the loop there.
  SimState stopped = init_network(3, 100, 100.0, 150.0, 100.0 * e1);
  const SimMetrics mh = run_lifetime(stopped, c, p, 4, true);
  CHECK(mh.rounds.size() == static_cast<std::size_t>(mh.first_death_round));
}

TEST_CASE("analytic comparison on a degenerate layout is exact") {
  RadioParams p;
  // Everyone at one point: measured distances are exactly 0 and 150.
  SimState s = make_state(colocated(20, 50.0, 50.0, 1e6), 50.0, 200.0, 1);
  const ClusterConfig c = cfg(20, 1, 2, 10, 150.0, 0.0);
  const SimMetrics m = run_lifetime(s, c, p, 1);
  REQUIRE(m.rounds_completed == 1);
  CHECK(m.measured_d_intra_m == 0.0);
  CHECK(m.measured_d_bs_m == 150.0);

  const AnalyticComparison a = analytic_comparison(m, c, p);
  CHECK(a.measured.d_intra == 0.0);
  CHECK(a.measured.d_bs == 150.0);
  CHECK(std::abs(a.err_ch_elec) < 1e-12);
  CHECK(std::abs(a.err_nonch_elec) < 1e-12);
  CHECK(std::abs(a.err_ch_frame) < 1e-12);
  CHECK(std::abs(a.err_nonch_frame) < 1e-12);
}

TEST_CASE("analytic comparison on a random layout") {
  RadioParams p;
  const ClusterConfig c = cfg(1000, 14, 6, 100);
  SimState s = init_network(77, 1000, 100.0, 150.0, 1e6);
  const SimMetrics m = run_lifetime(s, c, p, 1);
  REQUIRE(m.rounds_completed == 1);
  const AnalyticComparison a = analytic_comparison(m, c, p);
  CHECK(std::abs(a.err_ch_elec) < 0.15);
  CHECK(std::abs(a.err_nonch_elec) < 0.15);
  CHECK(std::abs(a.err_ch_frame) < 0.15);
  CHECK(std::abs(a.err_nonch_frame) < 0.15);

  ClusterConfig other = c;
  other.m = 5;
  CHECK_THROWS_AS(analytic_comparison(m, other, p), std::invalid_argument);
}

TEST_CASE("debit trace") {
  RadioParams p;
  std::ostringstream trace;
  SimState s = init_network(13, 20, 100.0, 150.0, 10.0);
  s.trace = &trace;
  run_round(s, cfg(20, 2, 2, 3), p);
  std::istringstream lines(trace.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
    ++count;
  }
  CHECK(count > 0);
}
