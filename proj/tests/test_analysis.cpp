#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "doctest.h"
#include "eehc/analysis.hpp"
#include "eehc/rng.hpp"

using namespace eehc;

namespace {

doctest::Approx near(double v, double rel = 1e-12) {
  return doctest::Approx(v).epsilon(rel);
}

ClusterConfig cfg(std::int64_t n, std::int64_t k, std::int64_t m,
                  std::int64_t l = 2000, std::int64_t nf = 10000,
                  double d_bs = 150.0, double d_intra = 25.0) {
  ClusterConfig c;
  c.n = n;
  c.k = k;
  c.m = m;
  c.l = l;
  c.n_frames = nf;
  c.d_bs = d_bs;
  c.d_intra = d_intra;
  return c;
}

ClusterConfig random_cfg(Rng& rng) {
  ClusterConfig c;
  c.n = 2 + static_cast<std::int64_t>(rng.below(4999));
  c.k = 1 + static_cast<std::int64_t>(
                rng.below(static_cast<std::uint64_t>(std::min<std::int64_t>(c.n, 100))));
  const auto max_m = static_cast<std::int64_t>(c.nodes_per_cluster());
  c.m = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_m)));
  c.l = 1 + static_cast<std::int64_t>(rng.below(10000));
  c.n_frames = 1 + static_cast<std::int64_t>(rng.below(1000000));
  c.d_bs = rng.uniform(1.0, 500.0);
  c.d_intra = rng.uniform(0.0, 100.0);
  return c;
}

}  // namespace

TEST_CASE("cluster config validation") {
  CHECK_NOTHROW(ClusterConfig{}.validate());
  CHECK_THROWS_AS(cfg(100, 5, 21).validate(), std::invalid_argument);  // m > n/k
  CHECK_THROWS_AS(cfg(10, 11, 1).validate(), std::invalid_argument);   // k > n
  CHECK_THROWS_AS(cfg(100, 5, 2, 0).validate(), std::invalid_argument);
  ClusterConfig c = cfg(100, 5, 2);
  c.d_bs = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = cfg(100, 5, 2);
  c.n_frames = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = cfg(100, 5, 2);
  c.field_side = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("election energies") {
  RadioParams p;
  const ElectionEnergies e = election_energies(cfg(100, 5, 1), p);
  CHECK(e.ch == near(0.0022381601812750764));
  CHECK(e.non_ch == near(0.00069816018127507673));

  // Single-node clusters: no joins to bank, broadcast cost only.
  const ClusterConfig tiny = cfg(5, 5, 1);
  const ElectionEnergies t = election_energies(tiny, p);
  CHECK(t.ch == tx_energy(p, 2000.0, 25.0, RangeClass::kShort));
  CHECK(t.non_ch ==
        tx_energy(p, 2000.0, 25.0, RangeClass::kShort) +
            5.0 * rx_energy(p, 2000.0));

  // Co-located cluster: the amplifier term vanishes, electronics stay.
  const ClusterConfig flat = cfg(100, 5, 1, 2000, 10000, 150.0, 0.0);
  const ElectionEnergies f = election_energies(flat, p);
  CHECK(f.ch == 2000.0 * p.elec_energy_per_bit + 19.0 * rx_energy(p, 2000.0));
}

TEST_CASE("frame energies") {
  RadioParams p;
  const FrameEnergies e = frame_energies(cfg(1000, 14, 6), p);
  CHECK(e.ch == near(0.0086133928571428577));
  CHECK(e.non_ch == near(0.00014816018127507675));

  // Head-set as big as the cluster: nobody left to receive from.
  const FrameEnergies whole = frame_energies(cfg(100, 10, 10), p);
  CHECK(whole.ch == tx_energy(p, 2000.0, 150.0, RangeClass::kLong));

  // One fewer receiver per extra head-set slot.
  CHECK(frame_energies(cfg(1000, 14, 1), p).ch == near(0.009163392857142858));
  CHECK(frame_energies(cfg(1000, 14, 2), p).ch == near(0.009053392857142857));
  CHECK(frame_energies(cfg(1000, 14, 3), p).ch == near(0.008943392857142856));
}

TEST_CASE("stage fractions") {
  const StageFractions f = stage_fractions(cfg(100, 5, 1));
  CHECK(f.f1 == near(0.01, 1e-15));
  CHECK(f.f2 == near(0.19, 1e-15));

  // m = n/k: the whole cluster is head-set, one slot each.
  const StageFractions whole = stage_fractions(cfg(100, 10, 10));
  CHECK(whole.f1 == 1.0 / 10.0);
  CHECK(whole.f2 == 0.0);

  Rng rng(7);
  for (int i = 0; i < 5000; ++i) {
    const ClusterConfig c = random_cfg(rng);
    const StageFractions sf = stage_fractions(c);
    const double q = 1.0 / static_cast<double>(c.k);
    const double ulp = std::nextafter(q, std::numeric_limits<double>::infinity()) - q;
    CHECK(std::abs(sf.f1 + sf.f2 - q) <= ulp);
    CHECK(sf.f1 > 0.0);
    CHECK(sf.f2 >= 0.0);
  }
}

TEST_CASE("stage energies") {
  RadioParams p;
  const StageEnergies s = stage_energies(cfg(100, 5, 1), p);
  CHECK(s.ch == near(0.35062500000000002));
  CHECK(s.non_ch == near(0.28150434442264582));

  const StageEnergies none = stage_energies(cfg(100, 5, 1, 2000, 0), p);
  CHECK(none.ch == 0.0);
  CHECK(none.non_ch == 0.0);

  const StageEnergies twice = stage_energies(cfg(100, 5, 1, 2000, 20000), p);
  CHECK(twice.ch == 2 * s.ch);
  CHECK(twice.non_ch == 2 * s.non_ch);
}

TEST_CASE("start energy") {
  RadioParams p;
  const ClusterConfig c = cfg(1000, 14, 6);
  CHECK(start_energy(c, p) == near(0.034406028566309602));

  // Composes from the exported pieces.
  const ElectionEnergies el = election_energies(c, p);
  const FrameEnergies fe = frame_energies(c, p);
  const StageFractions f = stage_fractions(c);
  CHECK(start_energy(c, p) ==
        near((el.ch + el.non_ch) / 6.0 +
                 (10000.0 / 6.0) * (f.f1 * fe.ch + f.f2 * fe.non_ch),
             1e-15));

  // No data stage: election cost split across the head-set, and doubling
  // the head-set halves it exactly.
  const ClusterConfig e1 = cfg(100, 5, 1, 2000, 0);
  const ClusterConfig e2 = cfg(100, 5, 2, 2000, 0);
  const ElectionEnergies el1 = election_energies(e1, p);
  CHECK(start_energy(e1, p) == el1.ch + el1.non_ch);
  CHECK(start_energy(e2, p) == start_energy(e1, p) / 2.0);

  // Monotone in the haul distance and the frame count.
  const ClusterConfig m1 = cfg(1000, 14, 1);
  CHECK(start_energy(m1, p) == near(0.20556449088913992));
  CHECK(start_energy(cfg(1000, 14, 1, 2000, 10000, 400.0), p) ==
        near(0.8580019908891401));
  CHECK(start_energy(cfg(1000, 14, 1, 2000, 25000), p) ==
        near(0.4995360323933103));
}

TEST_CASE("frames supported inverts the budget") {
  RadioParams p;
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const ClusterConfig c = random_cfg(rng);
    const double e = start_energy(c, p);
    const FramesSupported fs = frames_supported(e, c, p);
    CHECK(!fs.energy_deficit);
    CHECK(std::abs(fs.frames - static_cast<double>(c.n_frames)) /
              static_cast<double>(c.n_frames) <
          1e-12);
  }

  // Budget below the election bill: clamped, flagged.
  const ClusterConfig c = cfg(100, 5, 1);
  const FramesSupported broke = frames_supported(1e-9, c, p);
  CHECK(broke.frames == 0.0);
  CHECK(broke.energy_deficit);
  CHECK_THROWS_AS(frames_supported(-1.0, c, p), std::invalid_argument);
}

TEST_CASE("iterations per round") {
  CHECK(iterations_per_round(cfg(100, 5, 2)).count == 10);
  CHECK_FALSE(iterations_per_round(cfg(100, 5, 2)).remainder);
  CHECK(iterations_per_round(cfg(100, 10, 10)).count == 1);
  const IterationsPerRound r = iterations_per_round(cfg(100, 3, 2));
  CHECK(r.count == 17);
  CHECK(r.remainder);
}

TEST_CASE("energy report mirrors the operations") {
  RadioParams p;
  const ClusterConfig c = cfg(1000, 14, 6);
  const EnergyReport r = energy_report(c, p);
  CHECK(r.e_ch_elec == election_energies(c, p).ch);
  CHECK(r.e_nonch_elec == election_energies(c, p).non_ch);
  CHECK(r.e_ch_frame == frame_energies(c, p).ch);
  CHECK(r.e_nonch_frame == frame_energies(c, p).non_ch);
  CHECK(r.e_ch_data == stage_energies(c, p).ch);
  CHECK(r.e_nonch_data == stage_energies(c, p).non_ch);
  CHECK(r.e_start == start_energy(c, p));
  CHECK(r.f1 == stage_fractions(c).f1);
  CHECK(r.f2 == stage_fractions(c).f2);
  CHECK(r.iterations_per_round == 12);
}

TEST_CASE("closed-form cluster count") {
  RadioParams p;
  CHECK(optimal_clusters_raw(1000, p, 150.0, 100.0) ==
        near(1.1746010232514859));

  // sqrt(n) structure, exact under power-of-4 node scaling.
  CHECK(optimal_clusters_raw(4000, p, 150.0, 100.0) ==
        2 * optimal_clusters_raw(1000, p, 150.0, 100.0));
  CHECK(optimal_clusters_raw(1500, p, 150.0, 100.0) /
            optimal_clusters_raw(1000, p, 150.0, 100.0) ==
        near(1.2247448713915889));
  CHECK(optimal_clusters_raw(2000, p, 150.0, 100.0) /
            optimal_clusters_raw(1000, p, 150.0, 100.0) ==
        near(1.4142135623730949));

  // Efficiency calibration: pin eta = 0.6 to 9 clusters.
  RadioParams e6 = p, e4 = p, e2 = p;
  e6.pa_efficiency = 0.6;
  e4.pa_efficiency = 0.4;
  e2.pa_efficiency = 0.2;
  const double cal = 9.0 / optimal_clusters_raw(1000, e6, 150.0, 100.0);
  CHECK(cal * optimal_clusters_raw(1000, e4, 150.0, 100.0) ==
        near(11.022703842524303));
  CHECK(cal * optimal_clusters_raw(1000, e2, 150.0, 100.0) ==
        near(15.588457268119898));

  // S/N handling: compat mode reads the dB figure as a plain ratio.
  RadioParams s10 = p, s20 = p, s30 = p;
  s20.snr_min_db = 20.0;
  s30.snr_min_db = 30.0;
  const double cal_db =
      11.0 / optimal_clusters_raw(1000, s10, 150.0, 100.0,
                                  SnrMode::kPaperDbCompat);
  CHECK(cal_db * optimal_clusters_raw(1000, s20, 150.0, 100.0,
                                      SnrMode::kPaperDbCompat) ==
        near(15.556349186104045));
  CHECK(cal_db * optimal_clusters_raw(1000, s30, 150.0, 100.0,
                                      SnrMode::kPaperDbCompat) ==
        near(19.052558883257646));
  CHECK(optimal_clusters_raw(1000, s20, 150.0, 100.0) /
            optimal_clusters_raw(1000, s10, 150.0, 100.0) ==
        near(std::sqrt(10.0)));
  // At 10 dB the linear ratio is also 10, so the modes agree.
  CHECK(optimal_clusters_raw(1000, s10, 150.0, 100.0,
                             SnrMode::kPaperDbCompat) ==
        near(optimal_clusters_raw(1000, s10, 150.0, 100.0)));
  RadioParams neg = p;
  neg.snr_min_db = -3.0;
  CHECK_THROWS_AS(optimal_clusters_raw(1000, neg, 150.0, 100.0,
                                       SnrMode::kPaperDbCompat),
                  std::invalid_argument);

  // Rounding clamps into [1, n].
  CHECK(optimal_clusters_closed(1000, p, 150.0, 100.0) == 1);
  CHECK(optimal_clusters_closed(1000, p, 150.0, 10000.0) == 117);
  CHECK(optimal_clusters_closed(4, p, 150.0, 100000.0) == 4);
  CHECK_THROWS_AS(optimal_clusters_raw(0, p, 150.0, 100.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimal_clusters_raw(1000, p, 0.0, 100.0),
                  std::invalid_argument);
}

TEST_CASE("numeric cluster scan") {
  RadioParams p;
  const std::int64_t expect[][2] = {{1, 156}, {3, 133}, {6, 93}, {10, 63},
                                    {20, 35}};
  for (const auto& row : expect) {
    const OptimalScan s =
        optimal_clusters_numeric(cfg(1000, 1, row[0]), p, 1, 200);
    CHECK(s.k == row[1]);
  }
  CHECK(optimal_clusters_numeric(cfg(1000, 1, 6, 2000, 0), p, 1, 200).k == 32);

  // Single-point range and first-minimum tie policy.
  CHECK(optimal_clusters_numeric(cfg(1000, 1, 6), p, 14, 14).k == 14);
  CHECK(optimal_clusters_numeric(cfg(1000, 1, 6), p, 100, 150).k == 100);

  // Brute-force agreement over random scenarios.
  Rng rng(23);
  for (int i = 0; i < 30; ++i) {
    ClusterConfig base = random_cfg(rng);
    base.k = 1;
    const OptimalScan s = optimal_clusters_numeric(base, p, 1, 100);
    std::int64_t best_k = -1;
    double best_e = 0;
    for (std::int64_t k = 1; k <= std::min<std::int64_t>(100, base.n); ++k) {
      ClusterConfig c = base;
      c.k = k;
      if (static_cast<double>(c.m) > c.nodes_per_cluster()) continue;
      const double e = start_energy(c, p);
      if (best_k < 0 || e < best_e) {
        best_k = k;
        best_e = e;
      }
    }
    CHECK(s.k == best_k);
    CHECK(s.e_start == best_e);
  }

  // No feasible k in range.
  CHECK_THROWS_AS(optimal_clusters_numeric(cfg(100, 1, 50), p, 3, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimal_clusters_numeric(cfg(1000, 1, 6), p, 5, 4),
                  std::invalid_argument);
}

TEST_CASE("monotonicity in the shape parameters") {
  RadioParams p;
  // Bigger clusters mean more join traffic into the head.
  CHECK(election_energies(cfg(200, 5, 1), p).ch >
        election_energies(cfg(100, 5, 1), p).ch);
  // More clusters mean more overheard broadcasts per joiner.
  CHECK(election_energies(cfg(1000, 10, 1), p).non_ch >
        election_energies(cfg(1000, 5, 1), p).non_ch);

  // k scales with sqrt(1/eta) and, at alpha = 2, linearly with distance.
  RadioParams lo = p, hi = p;
  lo.pa_efficiency = 0.05;
  hi.pa_efficiency = 0.2;
  CHECK(optimal_clusters_raw(1000, lo, 150.0, 100.0) ==
        2 * optimal_clusters_raw(1000, hi, 150.0, 100.0));
  CHECK(optimal_clusters_raw(1000, p, 300.0, 100.0) ==
        2 * optimal_clusters_raw(1000, p, 150.0, 100.0));

  // The data stage only ever adds cost.
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    ClusterConfig c = random_cfg(rng);
    ClusterConfig idle = c;
    idle.n_frames = 0;
    CHECK(start_energy(c, p) >= start_energy(idle, p));
  }
}

TEST_CASE("scale invariance of the scan argmin") {
  RadioParams p;
  RadioParams scaled = p;
  scaled.thermal_noise_floor *= 7.5;
  scaled.elec_energy_per_bit *= 7.5;
  scaled.beamform_energy_per_bit *= 7.5;
  scaled.long_range_amp *= 7.5;
  CHECK(optimal_clusters_numeric(cfg(1000, 1, 6), p, 1, 200).k ==
        optimal_clusters_numeric(cfg(1000, 1, 6), scaled, 1, 200).k);
}
