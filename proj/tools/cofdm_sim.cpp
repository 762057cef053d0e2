// Command-line front end for the CO-OFDM link simulator.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cofdm/config.hpp"
#include "cofdm/fiber.hpp"
#include "cofdm/harness.hpp"
#include "cofdm/metrics.hpp"
#include "cofdm/waveform_io.hpp"

namespace {

using namespace cofdm;

LinkConfig load_and_warn(const std::string& path) {
  LinkConfig cfg = load_config(path);
  for (const auto& w : validate(cfg)) std::cerr << "warning: " << w << "\n";
  return cfg;
}

SweepSpec load_spec_or_default(const std::string& path) {
  if (path.empty()) return SweepSpec::defaults();
  return load_sweep_spec(path);
}

int cmd_trial(const std::string& config_path, std::optional<std::uint64_t> seed_opt,
              const std::string& out_csv, const std::string& dump_path) {
  const LinkConfig cfg = load_and_warn(config_path);
  const std::uint64_t seed = seed_opt.value_or(cfg.rng_seed);

  if (!dump_path.empty()) {
    // Transmitted (post-DAC) waveform; deterministic replay of the trial's
    // transmitter stages.
    RngStream rng(seed, "bit-source");
    const BitBlock bits = generate_bits(cfg.ofdm, rng);
    const Waveform dac = frontend_quantize(ofdm_modulate(dqpsk_encode(bits, cfg.ofdm), cfg.ofdm),
                                           cfg.frontend);
    save_waveform(dump_path, dac);
    std::cout << "waveform: " << dump_path << " (" << dac.samples.size() << " samples)\n";
  }

  const TrialResult r = run_trial(cfg, seed);
  std::printf("lop_dbm     %.6g\n", cfg.launch_power_dbm);
  std::printf("equalizer   %s\n", to_string(cfg.equalizer.kind));
  std::printf("seed        %llu\n", static_cast<unsigned long long>(seed));
  std::printf("n_bits      %zu\n", r.n_bits);
  std::printf("n_errors    %zu\n", r.n_errors);
  std::printf("ber         %.6g\n", r.ber);
  std::printf("q_db        %.6g\n", r.q_db);
  if (cfg.equalizer.kind != EqualizerKind::Linear)
    std::printf("n_clusters_mode %d (fallback subcarriers: %d)\n", r.n_clusters_mode(),
                r.n_fallback_subcarriers);
  std::printf("raw_bit_rate_gbps %.6g\n", raw_bit_rate_bps(cfg.ofdm) / 1e9);
  std::printf("net_bit_rate_gbps %.6g\n", net_bit_rate_bps(cfg.ofdm) / 1e9);
  std::printf("elapsed_s   %.3f\n", r.elapsed_s);

  if (!out_csv.empty()) {
    SweepResult sr;
    sr.provenance = config_hash(cfg);
    SweepRow row;
    row.lop_dbm = cfg.launch_power_dbm;
    row.equalizer = cfg.equalizer.kind;
    row.epsilon = cfg.equalizer.epsilon;
    row.min_points = cfg.equalizer.min_points;
    row.seed = seed;
    row.result = r;
    sr.rows.push_back(row);
    write_results_csv(out_csv, sr);
    std::cout << "results: " << out_csv << "\n";
  }
  return 0;
}

int cmd_sweep_lop(const std::string& config_path, const std::string& spec_path,
                  const std::string& out_csv) {
  const LinkConfig cfg = load_and_warn(config_path);
  const SweepSpec spec = load_spec_or_default(spec_path);
  const SweepResult r = sweep_lop(cfg, spec);
  write_results_csv(out_csv, r);
  std::cout << "rows: " << r.rows.size() << "\nprovenance: " << r.provenance
            << "\nresults: " << out_csv << "\n";
  return 0;
}

int cmd_sweep_dbscan(const std::string& config_path, const std::string& spec_path,
                     const std::string& out_csv, const std::string& results_csv) {
  const LinkConfig cfg = load_and_warn(config_path);
  const SweepSpec spec = load_spec_or_default(spec_path);
  const SweepResult r = sweep_dbscan_params(cfg, spec);
  write_surface_csv(out_csv, r);
  std::cout << "rows: " << r.rows.size() << "\nprovenance: " << r.provenance
            << "\nsurface: " << out_csv << "\n";
  if (!results_csv.empty()) {
    write_results_csv(results_csv, r);
    std::cout << "results: " << results_csv << "\n";
  }
  return 0;
}

int cmd_dump_constellation(const std::string& config_path, const std::string& stage_name,
                           std::optional<std::uint64_t> seed_opt, const std::string& out_csv) {
  const LinkConfig cfg = load_and_warn(config_path);
  const ConstellationStage stage = stage_name == "linear" ? ConstellationStage::Linear
                                                          : ConstellationStage::Clustered;
  write_constellation_csv(out_csv, cfg, seed_opt.value_or(cfg.rng_seed), stage);
  std::cout << "constellation: " << out_csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent optical OFDM link simulator with clustering equalizers"};
  app.require_subcommand(1);

  std::string config_path, spec_path, out_path, results_path, dump_path, stage_name;
  std::optional<std::uint64_t> seed;

  auto* trial = app.add_subcommand("trial", "Run one end-to-end trial");
  trial->add_option("--config", config_path, "Link config JSON")->required()
      ->check(CLI::ExistingFile);
  trial->add_option("--seed", seed, "RNG seed (default: config rng_seed)");
  trial->add_option("--out", out_path, "Write a one-row results CSV");
  trial->add_option("--dump-waveform", dump_path, "Write the transmitted waveform (binary)");

  auto* slop = app.add_subcommand("sweep-lop", "Launch-power sweep across equalizers");
  slop->add_option("--config", config_path, "Link config JSON")->required()
      ->check(CLI::ExistingFile);
  slop->add_option("--spec", spec_path, "Sweep spec JSON (default: built-in grids)")
      ->check(CLI::ExistingFile);
  slop->add_option("--out", out_path, "Results CSV path")->required();

  auto* sdb = app.add_subcommand("sweep-dbscan", "(epsilon, min_points) surface sweep");
  sdb->add_option("--config", config_path, "Link config JSON")->required()
      ->check(CLI::ExistingFile);
  sdb->add_option("--spec", spec_path, "Sweep spec JSON (default: built-in grids)")
      ->check(CLI::ExistingFile);
  sdb->add_option("--out", out_path, "Surface CSV path")->required();
  sdb->add_option("--results", results_path, "Also write per-seed results CSV");

  auto* dump = app.add_subcommand("dump-constellation", "Export equalized constellations");
  dump->add_option("--config", config_path, "Link config JSON")->required()
      ->check(CLI::ExistingFile);
  dump->add_option("--stage", stage_name, "linear or clustered")->required()
      ->check(CLI::IsMember({"linear", "clustered"}));
  dump->add_option("--seed", seed, "RNG seed (default: config rng_seed)");
  dump->add_option("--out", out_path, "Constellation CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (trial->parsed()) return cmd_trial(config_path, seed, out_path, dump_path);
    if (slop->parsed()) return cmd_sweep_lop(config_path, spec_path, out_path);
    if (sdb->parsed()) return cmd_sweep_dbscan(config_path, spec_path, out_path, results_path);
    if (dump->parsed())
      return cmd_dump_constellation(config_path, stage_name, seed, out_path);
  } catch (const cofdm::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
