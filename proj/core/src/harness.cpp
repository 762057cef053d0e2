#include "cofdm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "cofdm/fiber.hpp"
#include "cofdm/metrics.hpp"
#include "cofdm/waveform_io.hpp"

namespace cofdm {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Run fn(0..n-1) on up to `workers` threads. The first exception wins and is
// rethrown on the calling thread.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr eptr;
  std::mutex emu;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(emu);
        if (!eptr) eptr = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  pool.reserve(nt);
  for (int w = 0; w < nt; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (eptr) std::rethrow_exception(eptr);
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("COFDM_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int TrialResult::n_clusters_mode() const {
  if (cluster_count_histogram.empty()) return -1;
  int mode = -1, best = 0;
  for (const auto& [count, freq] : cluster_count_histogram) {
    if (freq > best) {  // map iterates ascending, so ties keep the lowest count
      best = freq;
      mode = count;
    }
  }
  return mode;
}

int harness_window_advance(const OfdmParams& ofdm) { return ofdm.cp_len() / 2; }

FrontChain run_front_chain(const LinkConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::string stage = "generate_bits";
  try {
    FrontChain fc;
    RngStream bit_rng(seed, "bit-source");
    fc.tx_bits = generate_bits(cfg.ofdm, bit_rng);

    stage = "dqpsk_encode";
    const SubcarrierGrid tx = dqpsk_encode(fc.tx_bits, cfg.ofdm);

    stage = "ofdm_modulate";
    const Waveform analog = ofdm_modulate(tx, cfg.ofdm);

    stage = "frontend_quantize(dac)";
    const Waveform dac = frontend_quantize(analog, cfg.frontend);

    stage = "propagate_link";
    const Waveform rx = propagate_link(dac, cfg.fiber, cfg.amplifier, cfg.launch_power_dbm,
                                       cfg.ssfm_step_km, seed);

    stage = "frontend_quantize(adc)";
    const Waveform adc = frontend_quantize(rx, cfg.frontend);

    stage = "ofdm_demodulate";
    const SubcarrierGrid raw = ofdm_demodulate(adc, cfg.ofdm, harness_window_advance(cfg.ofdm));

    stage = "estimate_channel";
    const ChannelEstimate est = estimate_channel(raw, cfg.ofdm);

    stage = "linear_equalize";
    fc.equalized = linear_equalize(raw, est);

    fc.elapsed_s = seconds_since(t0);
    return fc;
  } catch (const stage_error&) {
    throw;
  } catch (const std::exception& e) {
    throw stage_error(stage, e.what());
  }
}

namespace {

ClusterAssignment run_equalizer(const PointSet& ps, const EqualizerConfig& eq) {
  switch (eq.kind) {
    case EqualizerKind::DbscanConventional:
      return dbscan(ps, eq.epsilon, eq.min_points);
    case EqualizerKind::DbscanModified:
      return modified_dbscan(ps, eq.epsilon, eq.min_points, eq.k_clusters, eq.max_iterations);
    case EqualizerKind::KMeans:
      return kmeans_cluster(ps, eq.k_clusters, eq.max_iterations);
    case EqualizerKind::FuzzyCMeans:
      return fuzzy_cmeans(ps, eq.k_clusters, eq.fcm_fuzzifier, eq.fcm_tolerance,
                          eq.max_iterations)
          .assignment;
    case EqualizerKind::Hierarchical:
      return hierarchical_cluster(ps, eq.k_clusters, eq.linkage);
    case EqualizerKind::Linear:
      break;
  }
  throw config_error("equalizer.kind: not a clustering equalizer");
}

}  // namespace

TrialResult finish_trial(const FrontChain& fc, const LinkConfig& cfg, TrialArtifacts* artifacts) {
  const auto t0 = Clock::now();
  const OfdmParams& ofdm = cfg.ofdm;
  std::string stage = "clustering";
  try {
    SubcarrierGrid decided = fc.equalized;
    std::vector<int> labels(decided.symbols.size(), kNoiseLabel);
    for (int k = 0; k < ofdm.n_subcarriers; ++k)
      for (int t = 0; t < ofdm.n_pilot_symbols; ++t)
        labels[static_cast<std::size_t>(k) * ofdm.n_symbols_per_subcarrier + t] = kPilotLabel;

    TrialResult res;
    if (cfg.equalizer.kind != EqualizerKind::Linear) {
      for (int k = 0; k < ofdm.n_subcarriers; ++k) {
        const PointSet ps = make_point_set(fc.equalized, k, ofdm);
        const ClusterAssignment a = run_equalizer(ps, cfg.equalizer);
        const DecisionSet ds = clusters_to_decisions(a, ps);
        for (std::size_t i = 0; i < ds.decided.size(); ++i) {
          const std::size_t flat =
              static_cast<std::size_t>(k) * ofdm.n_symbols_per_subcarrier + ps.time_index[i];
          decided.symbols[flat] = ds.decided[i];
          labels[flat] = ds.labels[i];
        }
        res.cluster_count_histogram[ds.cluster_count_report]++;
        if (a.kmeans_fallback) ++res.n_fallback_subcarriers;
      }
    }

    stage = "dqpsk_decode";
    const BitBlock rx_bits = dqpsk_decode(decided, ofdm);

    stage = "count_ber";
    const BerCount bc = count_ber(fc.tx_bits, rx_bits);
    res.n_bits = bc.n_bits;
    res.n_errors = bc.n_errors;
    res.ber = bc.ber;
    // BER at or beyond 0.5 has no Q; keep the trial, mark the metric.
    res.q_db = bc.ber < 0.5 ? q_factor_db(bc.ber) : std::nan("");
    res.elapsed_s = fc.elapsed_s + seconds_since(t0);

    if (artifacts) {
      artifacts->equalized = fc.equalized;
      artifacts->decided = std::move(decided);
      artifacts->labels = std::move(labels);
    }
    return res;
  } catch (const stage_error&) {
    throw;
  } catch (const std::exception& e) {
    throw stage_error(stage, e.what());
  }
}

TrialResult run_trial(const LinkConfig& cfg, std::uint64_t seed, TrialArtifacts* artifacts) {
  const FrontChain fc = run_front_chain(cfg, seed);
  return finish_trial(fc, cfg, artifacts);
}

SweepSpec SweepSpec::defaults() {
  SweepSpec s;
  for (int p = -20; p <= 8; p += 2) s.lop_dbm.push_back(p);
  for (int e = 2; e <= 20; ++e) s.epsilon_grid.push_back(e / 100.0);
  for (int m = 10; m <= 150; m += 10) s.min_points_grid.push_back(m);
  s.equalizers = {EqualizerKind::Linear,       EqualizerKind::DbscanConventional,
                  EqualizerKind::DbscanModified, EqualizerKind::KMeans,
                  EqualizerKind::FuzzyCMeans,  EqualizerKind::Hierarchical};
  s.n_seeds = 5;
  return s;
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("invalid sweep spec JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("sweep spec: expected a JSON object");

  SweepSpec s = SweepSpec::defaults();
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key == "lop_dbm") {
      s.lop_dbm = item.value().get<std::vector<double>>();
    } else if (key == "epsilon_grid") {
      s.epsilon_grid = item.value().get<std::vector<double>>();
    } else if (key == "min_points_grid") {
      s.min_points_grid = item.value().get<std::vector<int>>();
    } else if (key == "equalizers") {
      s.equalizers.clear();
      for (const auto& name : item.value())
        s.equalizers.push_back(equalizer_kind_from_string(name.get<std::string>()));
    } else if (key == "n_seeds") {
      s.n_seeds = item.value().get<int>();
    } else {
      throw config_error("sweep spec: unknown key '" + key + "'");
    }
  }
  if (s.n_seeds < 1) throw config_error("sweep spec: n_seeds must be >= 1");
  return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open sweep spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sweep_spec(ss.str());
}

std::string config_hash(const LinkConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Front chains shared across sweep cells, keyed by (launch power, seed).
struct ChainKey {
  long long lop_milli;
  std::uint64_t seed;
  bool operator==(const ChainKey&) const = default;
};
struct ChainKeyHash {
  std::size_t operator()(const ChainKey& k) const {
    return std::hash<long long>()(k.lop_milli) ^ (std::hash<std::uint64_t>()(k.seed) * 31);
  }
};
ChainKey chain_key(double lop_dbm, std::uint64_t seed) {
  return {static_cast<long long>(std::llround(lop_dbm * 1000.0)), seed};
}

struct ChainSlot {
  FrontChain chain;
  std::string error;
};

using ChainMap = std::unordered_map<ChainKey, ChainSlot, ChainKeyHash>;

ChainMap build_chains(const LinkConfig& base, const std::vector<double>& lops,
                      const std::vector<std::uint64_t>& seeds) {
  std::vector<ChainKey> keys;
  for (double lop : lops)
    for (std::uint64_t seed : seeds) keys.push_back(chain_key(lop, seed));

  std::vector<ChainSlot> slots(keys.size());
  parallel_for(keys.size(), worker_count(), [&](std::size_t i) {
    LinkConfig cfg = base;
    cfg.launch_power_dbm = static_cast<double>(keys[i].lop_milli) / 1000.0;
    try {
      slots[i].chain = run_front_chain(cfg, keys[i].seed);
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  ChainMap map;
  for (std::size_t i = 0; i < keys.size(); ++i) map.emplace(keys[i], std::move(slots[i]));
  return map;
}

std::vector<std::uint64_t> seed_list(const LinkConfig& base, int n_seeds) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n_seeds; ++i) seeds.push_back(base.rng_seed + static_cast<std::uint64_t>(i));
  return seeds;
}

std::string provenance_string(const LinkConfig& base, const std::vector<std::uint64_t>& seeds) {
  std::ostringstream os;
  os << "config_hash=" << config_hash(base) << " seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
  return os.str();
}

// Failed cells keep NaN numerics so they can never be mistaken for data.
void mark_failed(TrialResult& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r = TrialResult{};
  r.ber = nan;
  r.q_db = nan;
  r.elapsed_s = nan;
}

void run_cells(std::vector<SweepRow>& rows, const LinkConfig& base, const ChainMap& chains) {
  parallel_for(rows.size(), worker_count(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    const auto it = chains.find(chain_key(row.lop_dbm, row.seed));
    if (it == chains.end()) {
      row.error = "internal: missing front chain";
      mark_failed(row.result);
      return;
    }
    if (!it->second.error.empty()) {
      row.error = it->second.error;
      mark_failed(row.result);
      return;
    }
    LinkConfig cfg = base;
    cfg.launch_power_dbm = row.lop_dbm;
    cfg.equalizer.kind = row.equalizer;
    cfg.equalizer.epsilon = row.epsilon;
    cfg.equalizer.min_points = row.min_points;
    try {
      row.result = finish_trial(it->second.chain, cfg);
    } catch (const std::exception& e) {
      row.error = e.what();
      mark_failed(row.result);
    }
  });
}

}  // namespace

SweepResult sweep_lop(const LinkConfig& base, const SweepSpec& spec) {
  const auto seeds = seed_list(base, spec.n_seeds);
  SweepResult out;
  out.provenance = provenance_string(base, seeds);

  // Canonical row order: (lop, equalizer, epsilon, min_points, seed).
  for (double lop : spec.lop_dbm)
    for (EqualizerKind kind : spec.equalizers)
      for (std::uint64_t seed : seeds) {
        SweepRow row;
        row.lop_dbm = lop;
        row.equalizer = kind;
        row.epsilon = base.equalizer.epsilon;
        row.min_points = base.equalizer.min_points;
        row.seed = seed;
        out.rows.push_back(row);
      }

  const ChainMap chains = build_chains(base, spec.lop_dbm, seeds);
  run_cells(out.rows, base, chains);
  return out;
}

SweepResult sweep_dbscan_params(const LinkConfig& base, const SweepSpec& spec) {
  if (base.equalizer.kind != EqualizerKind::DbscanConventional &&
      base.equalizer.kind != EqualizerKind::DbscanModified)
    throw config_error(
        "equalizer.kind: sweep_dbscan_params needs dbscan_conventional or dbscan_modified");

  const auto seeds = seed_list(base, spec.n_seeds);
  SweepResult out;
  out.provenance = provenance_string(base, seeds);

  for (double eps : spec.epsilon_grid)
    for (int mp : spec.min_points_grid)
      for (std::uint64_t seed : seeds) {
        SweepRow row;
        row.lop_dbm = base.launch_power_dbm;
        row.equalizer = base.equalizer.kind;
        row.epsilon = eps;
        row.min_points = mp;
        row.seed = seed;
        out.rows.push_back(row);
      }

  const ChainMap chains = build_chains(base, {base.launch_power_dbm}, seeds);
  run_cells(out.rows, base, chains);
  return out;
}

namespace {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void write_results_csv(const std::string& path, const SweepResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_results_csv: cannot open '" + path + "'");
  out << "lop_dbm,equalizer,epsilon,min_points,n_bits,n_errors,ber,q_db,"
         "n_clusters_mode,seed,elapsed_s,error\n";
  for (const auto& row : r.rows) {
    out << fmt_double(row.lop_dbm) << ',' << to_string(row.equalizer) << ','
        << fmt_double(row.epsilon) << ',' << row.min_points << ',';
    if (row.error.empty()) {
      out << row.result.n_bits << ',' << row.result.n_errors << ',' << fmt_double(row.result.ber)
          << ',' << fmt_double(row.result.q_db) << ',' << row.result.n_clusters_mode() << ','
          << row.seed << ',' << fmt_double(row.result.elapsed_s) << ",\n";
    } else {
      std::string msg = row.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out << "nan,nan,nan,nan,nan," << row.seed << ",nan," << msg << "\n";
    }
  }
  if (!out) throw io_error("write_results_csv: write failed for '" + path + "'");
}

void write_surface_csv(const std::string& path, const SweepResult& r) {
  // Seed-average BER per (epsilon, min_points); pool cluster-count histograms
  // across seeds for the modal count. Row order follows first appearance,
  // which is already canonical.
  struct Cell {
    double ber_sum = 0.0;
    int n_ok = 0;
    std::map<int, int> histogram;
  };
  std::vector<std::pair<std::pair<double, int>, Cell>> cells;
  auto cell_for = [&](double eps, int mp) -> Cell& {
    for (auto& c : cells)
      if (c.first.first == eps && c.first.second == mp) return c.second;
    cells.push_back({{eps, mp}, {}});
    return cells.back().second;
  };
  for (const auto& row : r.rows) {
    Cell& c = cell_for(row.epsilon, row.min_points);
    if (!row.error.empty()) continue;
    c.ber_sum += row.result.ber;
    c.n_ok += 1;
    for (const auto& [count, freq] : row.result.cluster_count_histogram)
      c.histogram[count] += freq;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_surface_csv: cannot open '" + path + "'");
  out << "epsilon,min_points,ber,modal_clusters\n";
  for (const auto& [key, c] : cells) {
    int mode = -1, best = 0;
    for (const auto& [count, freq] : c.histogram)
      if (freq > best) {
        best = freq;
        mode = count;
      }
    const double ber = c.n_ok > 0 ? c.ber_sum / c.n_ok : std::nan("");
    out << fmt_double(key.first) << ',' << key.second << ',' << fmt_double(ber) << ',' << mode
        << "\n";
  }
  if (!out) throw io_error("write_surface_csv: write failed for '" + path + "'");
}

void write_constellation_csv(const std::string& path, const LinkConfig& cfg, std::uint64_t seed,
                             ConstellationStage stage) {
  if (stage == ConstellationStage::Clustered && cfg.equalizer.kind == EqualizerKind::Linear)
    throw config_error("equalizer.kind: clustered-stage export needs a clustering equalizer");

  LinkConfig c = cfg;
  if (stage == ConstellationStage::Linear) c.equalizer.kind = EqualizerKind::Linear;
  TrialArtifacts art;
  run_trial(c, seed, &art);

  const SubcarrierGrid& grid =
      stage == ConstellationStage::Linear ? art.equalized : art.decided;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_constellation_csv: cannot open '" + path + "'");
  out << "subcarrier_index,time_index,re,im,cluster_label\n";
  for (int k = 0; k < grid.n_subcarriers; ++k)
    for (int t = 0; t < grid.n_symbols; ++t) {
      const cdouble v = grid.at(k, t);
      out << k << ',' << t << ',' << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << ','
          << art.labels[static_cast<std::size_t>(k) * grid.n_symbols + t] << "\n";
    }
  if (!out) throw io_error("write_constellation_csv: write failed for '" + path + "'");
}

}  // namespace cofdm
