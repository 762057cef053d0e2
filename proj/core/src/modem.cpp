#include "cofdm/modem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cofdm/fft.hpp"
#include "cofdm/rng.hpp"

namespace cofdm {

double Waveform::mean_power_w() const {
  if (samples.empty()) return 0.0;
  return energy() / static_cast<double>(samples.size());
}

double Waveform::energy() const {
  double e = 0.0;
  for (const auto& s : samples) e += std::norm(s);
  return e;
}

BitBlock random_bits(std::size_t n, RngStream& rng) {
  BitBlock b;
  b.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i) b.bits[i] = static_cast<std::uint8_t>(rng.bit());
  return b;
}

BitBlock generate_bits(const OfdmParams& ofdm, RngStream& rng) {
  return random_bits(ofdm.n_data_bits(), rng);
}

namespace {

// Gray map (first bit, second bit) -> number of +90 degree steps.
inline int gray_steps(int b0, int b1) {
  return b0 == 0 ? (b1 == 0 ? 0 : 1) : (b1 == 0 ? 3 : 2);
}

// Inverse of gray_steps.
inline void gray_bits(int m, std::uint8_t& b0, std::uint8_t& b1) {
  static constexpr std::uint8_t kB0[4] = {0, 0, 1, 1};
  static constexpr std::uint8_t kB1[4] = {0, 1, 1, 0};
  b0 = kB0[m];
  b1 = kB1[m];
}

// Multiply by i^m exactly (no trig round-off in the phase steps).
inline cdouble rotate_quarter(const cdouble& z, int m) {
  switch (m & 3) {
    case 0: return z;
    case 1: return {-z.imag(), z.real()};
    case 2: return {-z.real(), -z.imag()};
    default: return {z.imag(), -z.real()};
  }
}

}  // namespace

SubcarrierGrid dqpsk_encode(const BitBlock& bits, const OfdmParams& ofdm) {
  if (bits.size() != ofdm.n_data_bits())
    throw dsp_error("dqpsk_encode: expected " + std::to_string(ofdm.n_data_bits()) +
                    " bits, got " + std::to_string(bits.size()));

  SubcarrierGrid g(ofdm.n_subcarriers, ofdm.n_symbols_per_subcarrier);
  for (int t = 0; t < ofdm.n_pilot_symbols; ++t)
    for (int k = 0; k < ofdm.n_subcarriers; ++k) g.at(k, t) = kPilotSymbol;

  std::size_t i = 0;
  for (int t = ofdm.n_pilot_symbols; t < ofdm.n_symbols_per_subcarrier; ++t) {
    for (int k = 0; k < ofdm.n_subcarriers; ++k) {
      const int m = gray_steps(bits.bits[i], bits.bits[i + 1]);
      i += 2;
      g.at(k, t) = rotate_quarter(g.at(k, t - 1), m);
    }
  }
  return g;
}

BitBlock dqpsk_decode(const SubcarrierGrid& grid, const OfdmParams& ofdm) {
  if (grid.n_subcarriers != ofdm.n_subcarriers ||
      grid.n_symbols != ofdm.n_symbols_per_subcarrier)
    throw dsp_error("dqpsk_decode: grid shape mismatch");

  BitBlock out;
  out.bits.resize(ofdm.n_data_bits());
  std::size_t i = 0;
  constexpr double kHalfPi = 1.57079632679489662;
  for (int t = ofdm.n_pilot_symbols; t < ofdm.n_symbols_per_subcarrier; ++t) {
    for (int k = 0; k < ofdm.n_subcarriers; ++k) {
      // The first data symbol references the last pilot slot, so every
      // decision rides on the differential product of adjacent grid entries
      // and a global phase rotation cancels out.
      const cdouble p = grid.at(k, t) * std::conj(grid.at(k, t - 1));
      int m = static_cast<int>(std::lround(std::atan2(p.imag(), p.real()) / kHalfPi));
      m = ((m % 4) + 4) % 4;
      gray_bits(m, out.bits[i], out.bits[i + 1]);
      i += 2;
    }
  }
  return out;
}

namespace {

// Identical pilot values on every subcarrier would modulate into a per-symbol
// time-domain impulse (peak-to-average of n), which the fiber nonlinearity
// then distorts much harder than any data symbol. Pilot bins are therefore
// phase-scrambled by a fixed table on the way into the waveform and
// unscrambled on the way back, so grid-level pilot values are untouched while
// the transmitted pilot symbols stay statistically data-like.
std::vector<cdouble> pilot_scramble_table(int n, int n_pilots) {
  RngStream rng(0, "pilot-scramble");
  std::vector<cdouble> tab(static_cast<std::size_t>(n) * std::max(n_pilots, 0));
  for (auto& v : tab) v = std::polar(1.0, 2.0 * M_PI * rng.uniform());
  return tab;
}

}  // namespace

Waveform ofdm_modulate(const SubcarrierGrid& grid, const OfdmParams& ofdm) {
  if (grid.n_subcarriers != ofdm.n_subcarriers ||
      grid.n_symbols != ofdm.n_symbols_per_subcarrier)
    throw dsp_error("ofdm_modulate: grid shape mismatch");

  const int n = ofdm.n_subcarriers;
  const int cp = ofdm.cp_len();
  Waveform w;
  w.sample_rate_hz = ofdm.sample_rate_hz;
  w.samples.resize(ofdm.n_waveform_samples());

  const auto scramble = pilot_scramble_table(n, ofdm.n_pilot_symbols);
  std::vector<cdouble> col(n);
  for (int t = 0; t < ofdm.n_symbols_per_subcarrier; ++t) {
    for (int k = 0; k < n; ++k) col[k] = grid.at(k, t);
    if (t < ofdm.n_pilot_symbols) {
      const cdouble* row = scramble.data() + static_cast<std::size_t>(t) * n;
      for (int k = 0; k < n; ++k) col[k] *= row[k];
    }
    fft::backward_unitary(col.data(), n);
    cdouble* dst = w.samples.data() + static_cast<std::size_t>(t) * (n + cp);
    std::copy(col.end() - cp, col.end(), dst);  // cyclic prefix
    std::copy(col.begin(), col.end(), dst + cp);
  }
  return w;
}

SubcarrierGrid ofdm_demodulate(const Waveform& w, const OfdmParams& ofdm, int window_advance) {
  const int n = ofdm.n_subcarriers;
  const int cp = ofdm.cp_len();
  if (w.samples.size() != ofdm.n_waveform_samples())
    throw dsp_error("ofdm_demodulate: expected " + std::to_string(ofdm.n_waveform_samples()) +
                    " samples, got " + std::to_string(w.samples.size()));
  if (window_advance < 0 || window_advance > cp)
    throw dsp_error("ofdm_demodulate: window_advance must be in [0, cp_len]");

  const auto scramble = pilot_scramble_table(n, ofdm.n_pilot_symbols);
  SubcarrierGrid g(n, ofdm.n_symbols_per_subcarrier);
  std::vector<cdouble> col(n);
  for (int t = 0; t < ofdm.n_symbols_per_subcarrier; ++t) {
    const cdouble* src =
        w.samples.data() + static_cast<std::size_t>(t) * (n + cp) + cp - window_advance;
    std::copy(src, src + n, col.begin());
    fft::forward_unitary(col.data(), n);
    if (t < ofdm.n_pilot_symbols) {
      const cdouble* row = scramble.data() + static_cast<std::size_t>(t) * n;
      for (int k = 0; k < n; ++k) col[k] *= std::conj(row[k]);
    }
    for (int k = 0; k < n; ++k) g.at(k, t) = col[k];
  }
  return g;
}

namespace {

double quadrature_rms(const std::vector<cdouble>& xs, bool imag_part) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& x : xs) {
    const double v = imag_part ? x.imag() : x.real();
    acc += v * v;
  }
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

// Saturating mid-rise uniform quantizer on [-level, level].
inline double quantize_sample(double x, double level, double step) {
  const double y = step * (std::floor(x / step) + 0.5);
  return std::clamp(y, -level, level);
}

}  // namespace

Waveform frontend_quantize(const Waveform& w, const FrontendParams& fe) {
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(w.samples.size());
  if (w.samples.empty()) return out;

  const double ratio = std::pow(10.0, fe.clipping_ratio_db / 20.0);
  const double level_i = quadrature_rms(w.samples, false) * ratio;
  const double level_q = quadrature_rms(w.samples, true) * ratio;
  const double n_levels = std::pow(2.0, fe.quantizer_bits);
  const double step_i = 2.0 * level_i / n_levels;
  const double step_q = 2.0 * level_q / n_levels;

  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double re =
        level_i > 0.0 ? quantize_sample(w.samples[i].real(), level_i, step_i) : 0.0;
    const double im =
        level_q > 0.0 ? quantize_sample(w.samples[i].imag(), level_q, step_q) : 0.0;
    out.samples[i] = {re, im};
  }
  return out;
}

ChannelEstimate estimate_channel(const SubcarrierGrid& rx, const OfdmParams& ofdm) {
  if (ofdm.n_pilot_symbols < 1)
    throw config_error("n_pilot_symbols: channel estimation needs at least one pilot symbol");
  if (rx.n_subcarriers != ofdm.n_subcarriers || rx.n_symbols != ofdm.n_symbols_per_subcarrier)
    throw dsp_error("estimate_channel: grid shape mismatch");

  ChannelEstimate est;
  est.response.resize(rx.n_subcarriers);
  for (int k = 0; k < rx.n_subcarriers; ++k) {
    cdouble acc{0.0, 0.0};
    for (int t = 0; t < ofdm.n_pilot_symbols; ++t) acc += rx.at(k, t) / kPilotSymbol;
    est.response[k] = acc / static_cast<double>(ofdm.n_pilot_symbols);
  }
  return est;
}

SubcarrierGrid linear_equalize(const SubcarrierGrid& rx, const ChannelEstimate& est) {
  if (est.response.size() != static_cast<std::size_t>(rx.n_subcarriers))
    throw dsp_error("linear_equalize: estimate has " + std::to_string(est.response.size()) +
                    " taps for " + std::to_string(rx.n_subcarriers) + " subcarriers");

  SubcarrierGrid out(rx.n_subcarriers, rx.n_symbols);
  for (int k = 0; k < rx.n_subcarriers; ++k) {
    const cdouble h = est.response[k];
    if (std::abs(h) < 1e-12)
      throw dsp_error("linear_equalize: dead subcarrier k=" + std::to_string(k));
    for (int t = 0; t < rx.n_symbols; ++t) out.at(k, t) = rx.at(k, t) / h;
  }
  return out;
}

BerCount count_ber(const BitBlock& tx, const BitBlock& rx) {
  if (tx.size() != rx.size())
    throw dsp_error("count_ber: block sizes differ (" + std::to_string(tx.size()) + " vs " +
                    std::to_string(rx.size()) + ")");
  BerCount c;
  c.n_bits = tx.size();
  for (std::size_t i = 0; i < tx.size(); ++i)
    if (tx.bits[i] != rx.bits[i]) ++c.n_errors;
  c.ber = c.n_bits == 0 ? 0.0 : static_cast<double>(c.n_errors) / static_cast<double>(c.n_bits);
  return c;
}

}  // namespace cofdm
