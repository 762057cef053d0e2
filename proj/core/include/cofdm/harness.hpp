#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cofdm/clustering.hpp"
#include "cofdm/config.hpp"
#include "cofdm/modem.hpp"

namespace cofdm {

// Thrown when a pipeline stage fails inside run_trial; names the stage.
class stage_error : public std::runtime_error {
 public:
  stage_error(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "': " + what), stage(stage) {}
  std::string stage;
};

struct TrialResult {
  std::size_t n_bits = 0;
  std::size_t n_errors = 0;
  double ber = 0.0;
  double q_db = 0.0;  // +inf when ber == 0
  std::map<int, int> cluster_count_histogram;  // per-subcarrier density cluster counts
  int n_fallback_subcarriers = 0;              // modified-DBSCAN K-means fallbacks
  double elapsed_s = 0.0;

  // Most frequent per-subcarrier cluster count (lowest count wins ties);
  // -1 when no clustering ran (linear equalizer).
  int n_clusters_mode() const;
};

// Deterministic per-(lop, seed) front of the chain: bits through linear
// equalization. Everything after it (clustering, decode) is a pure function
// of this state, so sweeps cache it across equalizer settings.
struct FrontChain {
  BitBlock tx_bits;
  SubcarrierGrid equalized;
  double elapsed_s = 0.0;
};

// Receiver DFT window advance used by the harness: half the CP. Keeps the
// two-sided dispersion spread circular; the resulting phase ramp is absorbed
// by the one-tap equalizer.
int harness_window_advance(const OfdmParams& ofdm);

// Runs bits -> DQPSK -> OFDM -> DAC -> fiber link -> ADC -> demod -> channel
// estimate -> linear equalizer. The RNG streams are "bit-source" and
// "ase-span-*", both derived from (seed), so the front chain is independent
// of equalizer settings.
FrontChain run_front_chain(const LinkConfig& cfg, std::uint64_t seed);

// Optional per-trial artifacts for constellation export.
struct TrialArtifacts {
  SubcarrierGrid equalized;
  SubcarrierGrid decided;
  std::vector<int> labels;  // [k * n_symbols + t]; kPilotLabel on pilot slots
};

// Clustering + decision + decode, given a completed front chain.
TrialResult finish_trial(const FrontChain& fc, const LinkConfig& cfg,
                         TrialArtifacts* artifacts = nullptr);

// Full single trial (front chain + finish) with the config's equalizer.
TrialResult run_trial(const LinkConfig& cfg, std::uint64_t seed,
                      TrialArtifacts* artifacts = nullptr);

struct SweepSpec {
  std::vector<double> lop_dbm;        // default -20..8 step 2
  std::vector<double> epsilon_grid;   // default 0.02..0.20 step 0.01
  std::vector<int> min_points_grid;   // default 10..150 step 10
  std::vector<EqualizerKind> equalizers;  // default: all kinds
  int n_seeds = 5;                    // seeds rng_seed .. rng_seed + n_seeds - 1

  static SweepSpec defaults();
};

// Missing keys take defaults; unknown keys are an error.
SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);

struct SweepRow {
  double lop_dbm = 0.0;
  EqualizerKind equalizer = EqualizerKind::Linear;
  double epsilon = 0.0;
  int min_points = 0;
  std::uint64_t seed = 0;
  TrialResult result;
  std::string error;  // non-empty when the cell failed; result fields are NaN
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string provenance;  // config hash + seed list
};

// Launch-power sweep across equalizer kinds. Rows are sorted by
// (lop, equalizer, epsilon, min_points, seed). Failed cells stay in the
// output with an error tag. Worker count: COFDM_WORKERS or hardware threads.
SweepResult sweep_lop(const LinkConfig& base, const SweepSpec& spec);

// (epsilon, min_points) surface for the config's DBSCAN-family equalizer at
// the config's launch power.
SweepResult sweep_dbscan_params(const LinkConfig& base, const SweepSpec& spec);

// results.csv: one row per (cell, seed):
// lop_dbm,equalizer,epsilon,min_points,n_bits,n_errors,ber,q_db,n_clusters_mode,seed,elapsed_s,error
void write_results_csv(const std::string& path, const SweepResult& r);

// surface.csv: seed-averaged BER per (epsilon, min_points) cell plus pooled
// modal cluster count: epsilon,min_points,ber,modal_clusters
void write_surface_csv(const std::string& path, const SweepResult& r);

// constellation.csv: subcarrier_index,time_index,re,im,cluster_label
// (-1 noise/unclustered, -2 pilot).
enum class ConstellationStage { Linear, Clustered };
void write_constellation_csv(const std::string& path, const LinkConfig& cfg,
                             std::uint64_t seed, ConstellationStage stage);

int worker_count();  // COFDM_WORKERS override, else hardware concurrency

// FNV-1a hash of the serialized config, for sweep provenance.
std::string config_hash(const LinkConfig& cfg);

}  // namespace cofdm
