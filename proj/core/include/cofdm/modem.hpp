#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cofdm/config.hpp"
#include "cofdm/rng.hpp"

namespace cofdm {

// Thrown for contract violations in the signal chain (length mismatches,
// dead subcarriers, ...). The message names the stage.
class dsp_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using cdouble = std::complex<double>;

// Pilot value carried on every subcarrier during the pilot symbols.
inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline const cdouble kPilotSymbol{kInvSqrt2, kInvSqrt2};

struct BitBlock {
  std::vector<std::uint8_t> bits;  // each element 0 or 1

  std::size_t size() const { return bits.size(); }
  friend bool operator==(const BitBlock&, const BitBlock&) = default;
};

// Frequency-domain symbol grid, indexed [subcarrier][ofdm symbol].
// Storage is row-major with time contiguous per subcarrier.
struct SubcarrierGrid {
  int n_subcarriers = 0;
  int n_symbols = 0;
  std::vector<cdouble> symbols;

  SubcarrierGrid() = default;
  SubcarrierGrid(int n_sc, int n_sym)
      : n_subcarriers(n_sc), n_symbols(n_sym),
        symbols(static_cast<std::size_t>(n_sc) * n_sym) {}

  cdouble& at(int k, int t) { return symbols[static_cast<std::size_t>(k) * n_symbols + t]; }
  const cdouble& at(int k, int t) const {
    return symbols[static_cast<std::size_t>(k) * n_symbols + t];
  }

  friend bool operator==(const SubcarrierGrid&, const SubcarrierGrid&) = default;
};

struct Waveform {
  std::vector<cdouble> samples;  // complex baseband field, sqrt(W)
  double sample_rate_hz = 0.0;

  double mean_power_w() const;
  double energy() const;  // sum |x|^2

  friend bool operator==(const Waveform&, const Waveform&) = default;
};

// One-tap frequency-domain channel estimate, one coefficient per subcarrier.
struct ChannelEstimate {
  std::vector<cdouble> response;

  friend bool operator==(const ChannelEstimate&, const ChannelEstimate&) = default;
};

// n random fair bits from the stream.
BitBlock random_bits(std::size_t n, RngStream& rng);

// Exactly ofdm.n_data_bits() bits.
BitBlock generate_bits(const OfdmParams& ofdm, RngStream& rng);

// Differential QPSK across time on each subcarrier. Pilot symbols occupy the
// first n_pilot_symbols slots of every subcarrier; data starts from the last
// pilot as phase reference. Gray map (first bit, second bit) -> phase step:
//   00 -> 0, 01 -> pi/2, 11 -> pi, 10 -> 3*pi/2
// applied as exact multiplications by {1, i, -1, -i}.
// Bit order is time-major: consecutive bit pairs walk subcarriers within one
// OFDM symbol before advancing to the next symbol.
SubcarrierGrid dqpsk_encode(const BitBlock& bits, const OfdmParams& ofdm);

// Inverse of dqpsk_encode's differential step: hard decision on
// s[t] * conj(s[t-1]) per subcarrier. The first data symbol references the
// received last pilot slot, so decisions survive any global phase rotation.
BitBlock dqpsk_decode(const SubcarrierGrid& grid, const OfdmParams& ofdm);

// Unitary-IDFT OFDM with cyclic prefix. Output length n_symbols * (N + cp).
// Pilot-slot bins (t < n_pilot_symbols) are multiplied by a fixed
// unit-magnitude phase table before the IDFT — identical pilot values on all
// subcarriers would otherwise transmit as a time-domain impulse — and
// ofdm_demodulate removes the same table, so the scrambling is invisible at
// the grid interface.
Waveform ofdm_modulate(const SubcarrierGrid& grid, const OfdmParams& ofdm);

// Unitary-DFT demodulation. window_advance moves the DFT window start up to
// window_advance samples into the CP (0 = exactly after the CP). A nonzero
// advance keeps channels with two-sided impulse response spread circular and
// shows up only as a per-subcarrier linear phase ramp, which the one-tap
// equalizer absorbs.
SubcarrierGrid ofdm_demodulate(const Waveform& w, const OfdmParams& ofdm,
                               int window_advance = 0);

// Clip-and-quantize transmitter/receiver frontend. The clip level is
// A = rms * 10^(clipping_ratio_db/20) with rms computed per quadrature over
// the whole waveform; each quadrature is quantized by a saturating mid-rise
// uniform quantizer with 2^bits levels across [-A, A].
Waveform frontend_quantize(const Waveform& w, const FrontendParams& fe);

// Per-subcarrier average of rx_pilot / known_pilot over the pilot slots.
ChannelEstimate estimate_channel(const SubcarrierGrid& rx, const OfdmParams& ofdm);

// One-tap equalization: out[k][t] = rx[k][t] / response[k].
SubcarrierGrid linear_equalize(const SubcarrierGrid& rx, const ChannelEstimate& est);

// Errors and error rate between two equal-length blocks.
struct BerCount {
  std::size_t n_bits = 0;
  std::size_t n_errors = 0;
  double ber = 0.0;
};
BerCount count_ber(const BitBlock& tx, const BitBlock& rx);

}  // namespace cofdm
