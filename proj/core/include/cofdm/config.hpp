#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cofdm {

// Thrown for malformed or out-of-range configuration. The message names the
// offending field.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OfdmParams {
  int n_subcarriers = 128;
  int n_symbols_per_subcarrier = 400;
  double cp_fraction = 0.10;       // cyclic prefix length as a fraction of n_subcarriers
  int n_pilot_symbols = 4;         // leading OFDM symbols carrying known pilots
  double sample_rate_hz = 12.5e9;

  int cp_len() const;                                       // ceil(cp_fraction * n_subcarriers)
  int symbol_len() const { return n_subcarriers + cp_len(); }
  int n_data_symbols() const { return n_symbols_per_subcarrier - n_pilot_symbols; }
  std::size_t n_waveform_samples() const {
    return static_cast<std::size_t>(n_symbols_per_subcarrier) * symbol_len();
  }
  // Two bits per DQPSK data symbol over all subcarriers.
  std::size_t n_data_bits() const {
    return 2u * static_cast<std::size_t>(n_subcarriers) * n_data_symbols();
  }

  friend bool operator==(const OfdmParams&, const OfdmParams&) = default;
};

struct FrontendParams {
  double clipping_ratio_db = 13.0;  // clip level over per-quadrature RMS, in dB
  int quantizer_bits = 10;

  friend bool operator==(const FrontendParams&, const FrontendParams&) = default;
};

struct FiberParams {
  double gamma_per_w_km = 1.1;            // Kerr nonlinearity, 1/(W km)
  double dispersion_ps_nm_km = 16.0;      // D
  double dispersion_slope_ps_nm2_km = 0.06;  // S
  double loss_db_per_km = 0.2;
  double pmd_coeff_ps_sqrt_km = 0.1;      // recorded only; scalar model does not propagate PMD
  double span_length_km = 100.0;
  int n_spans = 5;
  double center_wavelength_nm = 1550.0;

  friend bool operator==(const FiberParams&, const FiberParams&) = default;
};

struct AmplifierParams {
  // gain_db < 0 means "derive from span loss" (exactly inverts loss_db_per_km * span_length_km).
  double gain_db = -1.0;
  double noise_figure_db = 5.5;

  friend bool operator==(const AmplifierParams&, const AmplifierParams&) = default;
};

enum class EqualizerKind {
  Linear,
  DbscanConventional,
  DbscanModified,
  KMeans,
  FuzzyCMeans,
  Hierarchical,
};

enum class Linkage { Average, Complete, Ward };

struct EqualizerConfig {
  EqualizerKind kind = EqualizerKind::Linear;
  double epsilon = 0.09;      // DBSCAN neighborhood radius (normalized constellation units)
  int min_points = 90;        // DBSCAN core-point threshold (self-inclusive)
  int k_clusters = 4;         // K-means / FCM / hierarchical target cluster count
  double fcm_fuzzifier = 2.0;
  double fcm_tolerance = 1e-5;
  Linkage linkage = Linkage::Average;
  int max_iterations = 300;

  friend bool operator==(const EqualizerConfig&, const EqualizerConfig&) = default;
};

struct LinkConfig {
  OfdmParams ofdm;
  FrontendParams frontend;
  FiberParams fiber;
  AmplifierParams amplifier;
  EqualizerConfig equalizer;
  double launch_power_dbm = 4.0;
  std::uint64_t rng_seed = 1;
  double ssfm_step_km = 0.1;

  // Amplifier gain actually applied: explicit gain_db if >= 0, else span loss.
  double effective_gain_db() const;

  friend bool operator==(const LinkConfig&, const LinkConfig&) = default;
};

// Serial bit rate before pilot/CP overhead is removed, in bit/s.
double raw_bit_rate_bps(const OfdmParams& p);

// Net rate after CP and pilot overhead, in bit/s.
double net_bit_rate_bps(const OfdmParams& p);

const char* to_string(EqualizerKind k);
const char* to_string(Linkage l);
EqualizerKind equalizer_kind_from_string(const std::string& s);
Linkage linkage_from_string(const std::string& s);

// Range/consistency checks. Throws config_error naming the field; returns
// human-readable warnings for suspicious but legal values.
std::vector<std::string> validate(const LinkConfig& cfg);

// JSON <-> LinkConfig. Missing keys take defaults; unknown keys are an error.
LinkConfig parse_config(const std::string& json_text);
LinkConfig load_config(const std::string& path);
std::string serialize_config(const LinkConfig& cfg);

}  // namespace cofdm
