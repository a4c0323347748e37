#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eehc/analysis.hpp"
#include "eehc/config.hpp"
#include "eehc/csv.hpp"
#include "eehc/sim.hpp"
#include "eehc/sweep.hpp"
#include "json.hpp"

namespace {

using eehc::RunConfig;

struct Shared {
  std::optional<std::string> config, out, preset, trace;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> rounds, n, k, m, nf;
  std::optional<double> eta, snr_db, d_bs, d_intra, field_side;
  bool compat = false;
};

void add_common(CLI::App* sub, Shared& sh) {
  sub->add_option("--config", sh.config,
                  "JSON config document, flat dotted keys");
  sub->add_option("--out", sh.out,
                  "output CSV path; sidecar .meta.json written next to it "
                  "(default: CSV to stdout, no sidecars)");
  sub->add_option("--preset", sh.preset, "figure preset name (sweep)");
  sub->add_option("--seed", sh.seed, "simulation seed");
  sub->add_option("--rounds", sh.rounds, "maximum simulated rounds");
  sub->add_flag("--paper-db-compat", sh.compat,
                "optimizer uses the S/N decibel figure as a plain ratio");
  sub->add_option("--trace", sh.trace,
                  "per-debit audit CSV path (simulate only)");
  sub->add_option("--n", sh.n, "node count");
  sub->add_option("--k", sh.k, "clusters per iteration");
  sub->add_option("--m", sh.m, "head-set size");
  sub->add_option("--nf", sh.nf, "frames per transfer stage");
  sub->add_option("--eta", sh.eta, "power amplifier efficiency");
  sub->add_option("--snr-db", sh.snr_db, "minimum S/N, dB");
  sub->add_option("--d-bs", sh.d_bs, "node-to-sink distance, m");
  sub->add_option("--d-intra", sh.d_intra, "intra-cluster distance, m");
  sub->add_option("--field-side", sh.field_side, "deployment square side, m");
}

void apply_overrides(const Shared& sh, eehc::RadioParams& radio,
                     eehc::ClusterConfig& cluster) {
  if (sh.n) cluster.n = *sh.n;
  if (sh.k) cluster.k = *sh.k;
  if (sh.m) cluster.m = *sh.m;
  if (sh.nf) cluster.n_frames = *sh.nf;
  if (sh.d_bs) cluster.d_bs = *sh.d_bs;
  if (sh.d_intra) cluster.d_intra = *sh.d_intra;
  if (sh.field_side) cluster.field_side = *sh.field_side;
  if (sh.eta) radio.pa_efficiency = *sh.eta;
  if (sh.snr_db) radio.snr_min_db = *sh.snr_db;
}

RunConfig resolve_config(const Shared& sh) {
  RunConfig cfg;
  if (sh.config) {
    cfg = eehc::parse_config_text(eehc::read_text_file(*sh.config));
  }
  if (sh.seed) cfg.seed = *sh.seed;
  if (sh.rounds) cfg.max_rounds = *sh.rounds;
  if (sh.compat) cfg.snr_mode = eehc::SnrMode::kPaperDbCompat;
  if (sh.preset) cfg.preset = *sh.preset;
  apply_overrides(sh, cfg.radio, cfg.cluster);
  cfg.radio.validate();
  return cfg;
}

// CSV to --out plus metadata sidecar, or CSV alone to stdout.
void emit(const std::optional<std::string>& out, const std::string& csv,
          const RunConfig& resolved, const std::string& command) {
  if (!out) {
    std::cout << csv;
    return;
  }
  eehc::write_text_file(*out, csv);
  eehc::write_text_file(*out + ".meta.json",
                        eehc::metadata_json(resolved, command));
}

int cmd_analyze(const Shared& sh) {
  RunConfig cfg = resolve_config(sh);
  cfg.cluster.validate();
  const eehc::EnergyReport r = eehc::energy_report(cfg.cluster, cfg.radio);
  const std::vector<std::string> header = {
      "e_ch_elec", "e_nonch_elec", "e_ch_frame",           "e_nonch_frame",
      "e_ch_data", "e_nonch_data", "e_start",              "f1",
      "f2",        "iterations_per_round"};
  const std::vector<std::vector<double>> rows = {
      {r.e_ch_elec, r.e_nonch_elec, r.e_ch_frame, r.e_nonch_frame, r.e_ch_data,
       r.e_nonch_data, r.e_start, r.f1, r.f2,
       static_cast<double>(r.iterations_per_round)}};
  emit(sh.out, eehc::csv_render_numeric(header, rows), cfg, "analyze");
  return 0;
}

int cmd_sweep(const Shared& sh) {
  RunConfig cfg = resolve_config(sh);
  eehc::SweepSpec spec;
  if (cfg.preset) {
    // Preset pins win over config-file scenario values; explicit flags win
    // over the pins.
    spec = eehc::figure_preset(*cfg.preset);
    apply_overrides(sh, spec.base_radio, spec.base_cluster);
    if (sh.compat) spec.snr_mode = eehc::SnrMode::kPaperDbCompat;
  } else {
    if (cfg.axes.empty()) {
      throw eehc::ConfigError(
          "sweep: needs --preset or sweep.axes in the config document");
    }
    spec.base_radio = cfg.radio;
    spec.base_cluster = cfg.cluster;
    spec.axes = cfg.axes;
    spec.outputs = cfg.outputs;
    spec.snr_mode = cfg.snr_mode;
  }
  const eehc::SweepTable table = eehc::run_sweep(spec);

  RunConfig resolved = cfg;
  resolved.radio = spec.base_radio;
  resolved.cluster = spec.base_cluster;
  resolved.snr_mode = spec.snr_mode;
  resolved.axes = spec.axes;
  resolved.outputs = spec.outputs;
  emit(sh.out, eehc::csv_render_numeric(table.header, table.rows), resolved,
       "sweep");
  return 0;
}

int cmd_simulate(const Shared& sh) {
  RunConfig cfg = resolve_config(sh);
  cfg.cluster.validate();
  if (!cfg.node_energy_j) {
    // Default battery: one node's share of a whole round, which is about
    // n * start_energy (see analytic_comparison); first deaths land in the
    // first rounds instead of a degenerate instant blackout.
    cfg.node_energy_j = static_cast<double>(cfg.cluster.n) *
                        eehc::start_energy(cfg.cluster, cfg.radio);
  }
  eehc::SimState state =
      eehc::init_network(cfg.seed, cfg.cluster.n, cfg.cluster.field_side,
                         cfg.cluster.d_bs, *cfg.node_energy_j);
  std::ofstream trace_file;
  if (sh.trace) {
    trace_file.open(*sh.trace, std::ios::binary);
    if (!trace_file) throw eehc::IoError("cannot open for writing: " + *sh.trace);
    trace_file << "event,node,amount_j,residual_j\n";
    state.trace = &trace_file;
  }
  const eehc::SimMetrics metrics = eehc::run_lifetime(
      state, cfg.cluster, cfg.radio, cfg.max_rounds, cfg.stop_at_first_death);
  const eehc::AnalyticComparison cmp =
      eehc::analytic_comparison(metrics, cfg.cluster, cfg.radio);

  const std::vector<std::string> header = {"round", "iterations", "energy_j",
                                           "alive_end", "deaths"};
  std::vector<std::vector<double>> rows;
  rows.reserve(metrics.rounds.size());
  for (const auto& row : metrics.rounds) {
    rows.push_back({static_cast<double>(row.round),
                    static_cast<double>(row.iterations), row.energy_j,
                    static_cast<double>(row.alive_end),
                    static_cast<double>(row.deaths)});
  }
  emit(sh.out, eehc::csv_render_numeric(header, rows), cfg, "simulate");

  if (sh.out) {
    nlohmann::ordered_json j;
    j["seed"] = metrics.seed;
    j["rounds_completed"] = metrics.rounds_completed;
    j["iterations_completed"] = metrics.iterations_completed;
    j["first_death_round"] = metrics.first_death_round;
    j["alive_end"] = metrics.alive_end;
    j["total_energy_j"] = metrics.total_energy_j;
    j["mean_node_round_j"] = metrics.mean_node_round_j;
    j["iteration_time_s"] = metrics.iteration_time_s;
    j["mean_ch_elec_j"] = metrics.mean_ch_elec_j;
    j["mean_nonch_elec_j"] = metrics.mean_nonch_elec_j;
    j["mean_ch_frame_j"] = metrics.mean_ch_frame_j;
    j["mean_nonch_frame_j"] = metrics.mean_nonch_frame_j;
    j["measured_d_intra_m"] = metrics.measured_d_intra_m;
    j["measured_d_bs_m"] = metrics.measured_d_bs_m;
    j["eligibility_resets"] = state.eligibility_resets;
    nlohmann::ordered_json a;
    a["predicted_ch_elec_j"] = cmp.predicted_ch_elec;
    a["predicted_nonch_elec_j"] = cmp.predicted_nonch_elec;
    a["predicted_ch_frame_j"] = cmp.predicted_ch_frame;
    a["predicted_nonch_frame_j"] = cmp.predicted_nonch_frame;
    a["predicted_node_round_j"] = cmp.predicted_node_round_j;
    a["err_ch_elec"] = cmp.err_ch_elec;
    a["err_nonch_elec"] = cmp.err_nonch_elec;
    a["err_ch_frame"] = cmp.err_ch_frame;
    a["err_nonch_frame"] = cmp.err_nonch_frame;
    a["err_node_round"] = cmp.err_node_round;
    j["analytic"] = a;
    nlohmann::ordered_json cons;
    const double initial = state.initial_total_j;
    const double residual = state.residual_total();
    const double ledger = state.ledger.value();
    cons["initial_total_j"] = initial;
    cons["residual_total_j"] = residual;
    cons["ledger_j"] = ledger;
    cons["rel_error"] =
        initial > 0 ? (initial - residual - ledger) / initial : 0.0;
    j["conservation"] = cons;
    eehc::write_text_file(*sh.out + ".summary.json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_optimal_k(const Shared& sh) {
  RunConfig cfg = resolve_config(sh);
  cfg.cluster.validate();
  const double raw =
      eehc::optimal_clusters_raw(cfg.cluster.n, cfg.radio, cfg.cluster.d_bs,
                                 cfg.cluster.field_side, cfg.snr_mode);
  const std::int64_t rounded =
      eehc::optimal_clusters_closed(cfg.cluster.n, cfg.radio, cfg.cluster.d_bs,
                                    cfg.cluster.field_side, cfg.snr_mode);
  const eehc::OptimalScan scan = eehc::optimal_clusters_numeric(
      cfg.cluster, cfg.radio, cfg.optimal_k_lo,
      std::min(cfg.optimal_k_hi, cfg.cluster.n));
  const std::vector<std::string> header = {
      "n",       "d_bs",      "field_side",        "k_raw",
      "k_rounded", "k_numeric", "e_start_at_k_numeric"};
  const std::vector<std::vector<double>> rows = {
      {static_cast<double>(cfg.cluster.n), cfg.cluster.d_bs,
       cfg.cluster.field_side, raw, static_cast<double>(rounded),
       static_cast<double>(scan.k), scan.e_start}};
  emit(sh.out, eehc::csv_render_numeric(header, rows), cfg, "optimal-k");
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Head-set cluster routing energy lab: transceiver energy "
               "model, cluster analysis, network simulator, figure sweeps"};
  app.require_subcommand(1);
  Shared sh;
  CLI::App* analyze =
      app.add_subcommand("analyze", "energy report row for one scenario");
  CLI::App* sweep =
      app.add_subcommand("sweep", "grid evaluation to CSV (presets available)");
  CLI::App* simulate =
      app.add_subcommand("simulate", "seeded round-based network simulation");
  CLI::App* optimal_k =
      app.add_subcommand("optimal-k", "closed-form and scanned cluster count");
  for (CLI::App* sub : {analyze, sweep, simulate, optimal_k}) {
    add_common(sub, sh);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (analyze->parsed()) return cmd_analyze(sh);
  if (sweep->parsed()) return cmd_sweep(sh);
  if (simulate->parsed()) return cmd_simulate(sh);
  return cmd_optimal_k(sh);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const eehc::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
