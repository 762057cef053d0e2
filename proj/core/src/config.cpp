#include "cofdm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cofdm {

using nlohmann::json;

int OfdmParams::cp_len() const {
  // Guard against products like 0.07*100 = 7.000000000000001 rounding up.
  return static_cast<int>(std::ceil(cp_fraction * n_subcarriers - 1e-9));
}

double LinkConfig::effective_gain_db() const {
  if (amplifier.gain_db >= 0.0) return amplifier.gain_db;
  return fiber.loss_db_per_km * fiber.span_length_km;
}

double raw_bit_rate_bps(const OfdmParams& p) {
  // 2 bits per subcarrier per OFDM symbol; one symbol spans (N+cp)/fs seconds.
  return 2.0 * p.n_subcarriers * p.sample_rate_hz / p.symbol_len();
}

double net_bit_rate_bps(const OfdmParams& p) {
  return raw_bit_rate_bps(p) * p.n_data_symbols() / p.n_symbols_per_subcarrier;
}

const char* to_string(EqualizerKind k) {
  switch (k) {
    case EqualizerKind::Linear: return "linear";
    case EqualizerKind::DbscanConventional: return "dbscan_conventional";
    case EqualizerKind::DbscanModified: return "dbscan_modified";
    case EqualizerKind::KMeans: return "kmeans";
    case EqualizerKind::FuzzyCMeans: return "fuzzy_cmeans";
    case EqualizerKind::Hierarchical: return "hierarchical";
  }
  return "?";
}

const char* to_string(Linkage l) {
  switch (l) {
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Ward: return "ward";
  }
  return "?";
}

EqualizerKind equalizer_kind_from_string(const std::string& s) {
  if (s == "linear") return EqualizerKind::Linear;
  if (s == "dbscan_conventional") return EqualizerKind::DbscanConventional;
  if (s == "dbscan_modified") return EqualizerKind::DbscanModified;
  if (s == "kmeans") return EqualizerKind::KMeans;
  if (s == "fuzzy_cmeans") return EqualizerKind::FuzzyCMeans;
  if (s == "hierarchical") return EqualizerKind::Hierarchical;
  throw config_error("equalizer.kind: unknown value '" + s + "'");
}

Linkage linkage_from_string(const std::string& s) {
  if (s == "average") return Linkage::Average;
  if (s == "complete") return Linkage::Complete;
  if (s == "ward") return Linkage::Ward;
  throw config_error("equalizer.linkage: unknown value '" + s + "'");
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw config_error(field + ": " + why);
}

void check(bool ok, const std::string& field, const std::string& why) {
  if (!ok) fail(field, why);
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<std::string> validate(const LinkConfig& cfg) {
  std::vector<std::string> warnings;
  const auto& o = cfg.ofdm;
  check(o.n_subcarriers >= 2, "ofdm.n_subcarriers", "must be >= 2 (got " + num(o.n_subcarriers) + ")");
  check(o.n_symbols_per_subcarrier >= 1, "ofdm.n_symbols_per_subcarrier",
        "must be >= 1 (got " + num(o.n_symbols_per_subcarrier) + ")");
  check(o.cp_fraction >= 0.0 && o.cp_fraction < 1.0, "ofdm.cp_fraction",
        "must satisfy 0 <= cp_fraction < 1 (got " + num(o.cp_fraction) + ")");
  check(o.n_pilot_symbols >= 1, "ofdm.n_pilot_symbols",
        "must be >= 1 (got " + num(o.n_pilot_symbols) + ")");
  check(o.n_pilot_symbols < o.n_symbols_per_subcarrier, "ofdm.n_pilot_symbols",
        "must leave at least one data symbol (got " + num(o.n_pilot_symbols) + " of " +
            num(o.n_symbols_per_subcarrier) + ")");
  check(o.sample_rate_hz > 0.0, "ofdm.sample_rate", "must be positive");

  const auto& fe = cfg.frontend;
  check(fe.clipping_ratio_db > 0.0, "frontend.clipping_ratio_db", "must be positive");
  check(fe.quantizer_bits >= 1 && fe.quantizer_bits <= 24, "frontend.quantizer_bits",
        "must be in [1, 24] (got " + num(fe.quantizer_bits) + ")");

  const auto& f = cfg.fiber;
  check(f.gamma_per_w_km >= 0.0, "fiber.gamma", "must be >= 0");
  check(f.loss_db_per_km >= 0.0, "fiber.loss_db_per_km", "must be >= 0");
  check(f.span_length_km > 0.0, "fiber.span_length_km", "must be positive");
  check(f.n_spans >= 0, "fiber.n_spans", "must be >= 0");
  check(f.center_wavelength_nm > 0.0, "fiber.center_wavelength_nm", "must be positive");

  const auto& a = cfg.amplifier;
  if (a.gain_db >= 0.0 && a.gain_db == 0.0 && cfg.fiber.n_spans > 0)
    warnings.push_back("amplifier.gain_db: 0 dB gain leaves span loss uncompensated");
  check(a.noise_figure_db >= 0.0, "amplifier.noise_figure_db", "must be >= 0");
  if (a.noise_figure_db < 3.0)
    warnings.push_back("amplifier.noise_figure_db: " + num(a.noise_figure_db) +
                       " dB is below the 3 dB quantum limit for a high-gain EDFA");

  const auto& e = cfg.equalizer;
  check(e.epsilon > 0.0, "equalizer.epsilon", "must be positive");
  check(e.min_points >= 1, "equalizer.min_points", "must be >= 1");
  check(e.k_clusters >= 1, "equalizer.k_clusters", "must be >= 1");
  check(e.fcm_fuzzifier > 1.0, "equalizer.fcm_fuzzifier", "must be > 1");
  check(e.fcm_tolerance > 0.0, "equalizer.fcm_tolerance", "must be positive");
  check(e.max_iterations >= 1, "equalizer.max_iterations", "must be >= 1");

  check(cfg.ssfm_step_km > 0.0, "ssfm_step_km", "must be positive");
  check(cfg.ssfm_step_km <= cfg.fiber.span_length_km, "ssfm_step_km",
        "must not exceed span_length_km");
  return warnings;
}

namespace {

// Reject misspelled keys instead of silently ignoring them.
void check_keys(const json& j, const std::string& scope,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) { ok = true; break; }
    if (!ok)
      fail(scope.empty() ? item.key() : scope + "." + item.key(), "unknown key");
  }
}

template <typename T>
void get_to(const json& j, const char* key, const std::string& scope, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    fail(scope.empty() ? key : scope + "." + std::string(key), e.what());
  }
}

}  // namespace

LinkConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("top level: expected a JSON object");

  LinkConfig cfg;
  check_keys(j, "", {"ofdm", "frontend", "fiber", "amplifier", "equalizer",
                     "launch_power_dbm", "rng_seed", "ssfm_step_km"});

  if (j.contains("ofdm")) {
    const auto& o = j.at("ofdm");
    check_keys(o, "ofdm", {"n_subcarriers", "n_symbols_per_subcarrier", "cp_fraction",
                           "n_pilot_symbols", "sample_rate"});
    get_to(o, "n_subcarriers", "ofdm", cfg.ofdm.n_subcarriers);
    get_to(o, "n_symbols_per_subcarrier", "ofdm", cfg.ofdm.n_symbols_per_subcarrier);
    get_to(o, "cp_fraction", "ofdm", cfg.ofdm.cp_fraction);
    get_to(o, "n_pilot_symbols", "ofdm", cfg.ofdm.n_pilot_symbols);
    get_to(o, "sample_rate", "ofdm", cfg.ofdm.sample_rate_hz);
  }
  if (j.contains("frontend")) {
    const auto& o = j.at("frontend");
    check_keys(o, "frontend", {"clipping_ratio_db", "quantizer_bits"});
    get_to(o, "clipping_ratio_db", "frontend", cfg.frontend.clipping_ratio_db);
    get_to(o, "quantizer_bits", "frontend", cfg.frontend.quantizer_bits);
  }
  if (j.contains("fiber")) {
    const auto& o = j.at("fiber");
    check_keys(o, "fiber", {"gamma", "dispersion_D", "dispersion_slope", "loss_db_per_km",
                            "pmd_coeff", "span_length_km", "n_spans", "center_wavelength_nm"});
    get_to(o, "gamma", "fiber", cfg.fiber.gamma_per_w_km);
    get_to(o, "dispersion_D", "fiber", cfg.fiber.dispersion_ps_nm_km);
    get_to(o, "dispersion_slope", "fiber", cfg.fiber.dispersion_slope_ps_nm2_km);
    get_to(o, "loss_db_per_km", "fiber", cfg.fiber.loss_db_per_km);
    get_to(o, "pmd_coeff", "fiber", cfg.fiber.pmd_coeff_ps_sqrt_km);
    get_to(o, "span_length_km", "fiber", cfg.fiber.span_length_km);
    get_to(o, "n_spans", "fiber", cfg.fiber.n_spans);
    get_to(o, "center_wavelength_nm", "fiber", cfg.fiber.center_wavelength_nm);
  }
  if (j.contains("amplifier")) {
    const auto& o = j.at("amplifier");
    check_keys(o, "amplifier", {"gain_db", "noise_figure_db"});
    get_to(o, "gain_db", "amplifier", cfg.amplifier.gain_db);
    get_to(o, "noise_figure_db", "amplifier", cfg.amplifier.noise_figure_db);
  }
  if (j.contains("equalizer")) {
    const auto& o = j.at("equalizer");
    check_keys(o, "equalizer", {"kind", "epsilon", "min_points", "k_clusters", "fcm_fuzzifier",
                                "fcm_tolerance", "linkage", "max_iterations"});
    if (o.contains("kind")) {
      std::string s;
      get_to(o, "kind", "equalizer", s);
      cfg.equalizer.kind = equalizer_kind_from_string(s);
    }
    get_to(o, "epsilon", "equalizer", cfg.equalizer.epsilon);
    get_to(o, "min_points", "equalizer", cfg.equalizer.min_points);
    get_to(o, "k_clusters", "equalizer", cfg.equalizer.k_clusters);
    get_to(o, "fcm_fuzzifier", "equalizer", cfg.equalizer.fcm_fuzzifier);
    get_to(o, "fcm_tolerance", "equalizer", cfg.equalizer.fcm_tolerance);
    if (o.contains("linkage")) {
      std::string s;
      get_to(o, "linkage", "equalizer", s);
      cfg.equalizer.linkage = linkage_from_string(s);
    }
    get_to(o, "max_iterations", "equalizer", cfg.equalizer.max_iterations);
  }
  get_to(j, "launch_power_dbm", "", cfg.launch_power_dbm);
  get_to(j, "rng_seed", "", cfg.rng_seed);
  get_to(j, "ssfm_step_km", "", cfg.ssfm_step_km);

  validate(cfg);  // throw on range errors; warnings are the caller's business
  return cfg;
}

LinkConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const LinkConfig& cfg) {
  json j;
  j["ofdm"] = {{"n_subcarriers", cfg.ofdm.n_subcarriers},
               {"n_symbols_per_subcarrier", cfg.ofdm.n_symbols_per_subcarrier},
               {"cp_fraction", cfg.ofdm.cp_fraction},
               {"n_pilot_symbols", cfg.ofdm.n_pilot_symbols},
               {"sample_rate", cfg.ofdm.sample_rate_hz}};
  j["frontend"] = {{"clipping_ratio_db", cfg.frontend.clipping_ratio_db},
                   {"quantizer_bits", cfg.frontend.quantizer_bits}};
  j["fiber"] = {{"gamma", cfg.fiber.gamma_per_w_km},
                {"dispersion_D", cfg.fiber.dispersion_ps_nm_km},
                {"dispersion_slope", cfg.fiber.dispersion_slope_ps_nm2_km},
                {"loss_db_per_km", cfg.fiber.loss_db_per_km},
                {"pmd_coeff", cfg.fiber.pmd_coeff_ps_sqrt_km},
                {"span_length_km", cfg.fiber.span_length_km},
                {"n_spans", cfg.fiber.n_spans},
                {"center_wavelength_nm", cfg.fiber.center_wavelength_nm}};
  j["amplifier"] = {{"gain_db", cfg.amplifier.gain_db},
                    {"noise_figure_db", cfg.amplifier.noise_figure_db}};
  j["equalizer"] = {{"kind", to_string(cfg.equalizer.kind)},
                    {"epsilon", cfg.equalizer.epsilon},
                    {"min_points", cfg.equalizer.min_points},
                    {"k_clusters", cfg.equalizer.k_clusters},
                    {"fcm_fuzzifier", cfg.equalizer.fcm_fuzzifier},
                    {"fcm_tolerance", cfg.equalizer.fcm_tolerance},
                    {"linkage", to_string(cfg.equalizer.linkage)},
                    {"max_iterations", cfg.equalizer.max_iterations}};
  j["launch_power_dbm"] = cfg.launch_power_dbm;
  j["rng_seed"] = cfg.rng_seed;
  j["ssfm_step_km"] = cfg.ssfm_step_km;
  return j.dump(2);
}

}  // namespace cofdm
