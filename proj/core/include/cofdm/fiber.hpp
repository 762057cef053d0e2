#pragma once

#include <cstdint>
#include <vector>

#include "cofdm/config.hpp"
#include "cofdm/modem.hpp"
#include "cofdm/rng.hpp"

namespace cofdm {

// Thrown when the split-step field develops non-finite values.
class propagation_error : public dsp_error {
 public:
  propagation_error(const std::string& msg, double distance_km)
      : dsp_error(msg), distance_km(distance_km) {}
  double distance_km;
};

// Taylor coefficients of the propagation constant derived from (D, S, loss)
// at the carrier wavelength:
//   beta2 = -D lambda^2 / (2 pi c)
//   beta3 = (lambda^2 / (2 pi c))^2 * (S + 2 D / lambda)
//   alpha = loss_db_per_km * ln(10) / 10
struct FiberCoefficients {
  double beta2_ps2_per_km = 0.0;
  double beta3_ps3_per_km = 0.0;
  double alpha_per_km = 0.0;
};
FiberCoefficients derive_coefficients(const FiberParams& f);

// Scale the waveform so mean power equals the launch power.
Waveform set_launch_power(const Waveform& w, double launch_power_dbm);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// ASE statistics for one amplifier: per-complex-sample noise variance (W)
// for noise bandwidth equal to the simulation sample rate.
//   n_sp = F G / (2 (G - 1)), floored at 1
//   S_ase = (G - 1) h nu n_sp        (single polarization PSD, W/Hz)
//   sigma2 = S_ase * sample_rate
struct AseModel {
  double sigma2_watts = 0.0;
  double n_sp = 0.0;
  bool floored = false;  // true when the raw n_sp fell below 1 and was clamped
};
AseModel derive_ase(double gain_db, double noise_figure_db, double sample_rate_hz,
                    double center_wavelength_nm);

struct PropagationState {
  std::vector<cdouble> field;
  double sample_rate_hz = 0.0;
  double distance_km = 0.0;
  int span_index = 0;
};

// Symmetric split-step Fourier over one span: half linear step, then
// alternating full nonlinear / full linear steps with adjacent half steps
// merged, closing with a final linear half step. The last step covers the
// fractional remainder when step_km does not divide span_length_km.
// Linear operator (frequency domain, per km):
//   L(w) = -alpha/2 + i (beta2/2) w^2 + i (beta3/6) w^3
// Nonlinear operator (time domain): A *= exp(i gamma |A|^2 h).
void propagate_span(PropagationState& state, const FiberParams& f, double step_km);

// Flat gain followed by additive circular complex Gaussian ASE.
void edfa_amplify(PropagationState& state, double gain_db, double noise_figure_db,
                  double center_wavelength_nm, RngStream& rng);

// Full link: launch-power scaling, then n_spans x (span + EDFA). Per-span ASE
// uses independent streams "ase-span-1" ... "ase-span-N" derived from seed.
Waveform propagate_link(const Waveform& w, const FiberParams& f, const AmplifierParams& amp,
                        double launch_power_dbm, double ssfm_step_km, std::uint64_t seed);

}  // namespace cofdm
