#include "cofdm/fiber.hpp"

#include <cmath>
#include <string>

#include "cofdm/fft.hpp"

namespace cofdm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPlanck = 6.62607015e-34;       // J s
constexpr double kLightSpeed = 2.99792458e8;     // m/s

}  // namespace

FiberCoefficients derive_coefficients(const FiberParams& f) {
  // Work in ps/nm/km units: lambda^2/(2 pi c) in nm*ps converts D and S
  // directly to Taylor coefficients.
  const double c_nm_per_ps = kLightSpeed * 1e-3;  // 2.9979e5 nm/ps
  const double lam = f.center_wavelength_nm;
  const double L = lam * lam / (2.0 * kPi * c_nm_per_ps);  // nm ps

  FiberCoefficients out;
  out.beta2_ps2_per_km = -f.dispersion_ps_nm_km * L;
  out.beta3_ps3_per_km =
      L * L * (f.dispersion_slope_ps_nm2_km + 2.0 * f.dispersion_ps_nm_km / lam);
  out.alpha_per_km = f.loss_db_per_km * std::log(10.0) / 10.0;
  return out;
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

Waveform set_launch_power(const Waveform& w, double launch_power_dbm) {
  const double p = w.mean_power_w();
  if (p <= 0.0) throw dsp_error("set_launch_power: zero-power waveform");
  const double scale = std::sqrt(dbm_to_watts(launch_power_dbm) / p);
  Waveform out = w;
  for (auto& s : out.samples) s *= scale;
  return out;
}

AseModel derive_ase(double gain_db, double noise_figure_db, double sample_rate_hz,
                    double center_wavelength_nm) {
  AseModel m;
  const double g = std::pow(10.0, gain_db / 10.0);
  if (g <= 1.0) return m;  // unity gain adds no ASE
  const double f_lin = std::pow(10.0, noise_figure_db / 10.0);
  const double raw_nsp = f_lin * g / (2.0 * (g - 1.0));
  m.floored = raw_nsp < 1.0;
  m.n_sp = m.floored ? 1.0 : raw_nsp;
  const double nu = kLightSpeed / (center_wavelength_nm * 1e-9);
  const double psd = (g - 1.0) * kPlanck * nu * m.n_sp;  // W/Hz, single polarization
  m.sigma2_watts = psd * sample_rate_hz;
  return m;
}

namespace {

// Frequency-domain linear factors for one step length, with the inverse-FFT
// 1/N normalization folded in (each factor sits between one forward/backward
// pair). Exponent per km, bin frequency w under the e^{+jwt} convention:
//   L(w) = -alpha/2 + i (beta2/2) w^2 + i (beta3/6) w^3
std::vector<cdouble> linear_factors(std::size_t n, double sample_rate_hz,
                                    const FiberCoefficients& c, double h_km) {
  std::vector<cdouble> out(n);
  const double beta2 = c.beta2_ps2_per_km * 1e-24;  // s^2/km
  const double beta3 = c.beta3_ps3_per_km * 1e-36;  // s^3/km
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = (k < (n + 1) / 2) ? static_cast<double>(k)
                                        : static_cast<double>(k) - static_cast<double>(n);
    const double w = 2.0 * kPi * kk * sample_rate_hz / static_cast<double>(n);
    const double w2 = w * w;
    const double attn = std::exp(-0.5 * c.alpha_per_km * h_km) * scale;
    const double phase = (0.5 * beta2 * w2 + beta3 * w2 * w / 6.0) * h_km;
    out[k] = std::polar(attn, phase);
  }
  return out;
}

void apply_factors(std::vector<cdouble>& field, const std::vector<cdouble>& f) {
  for (std::size_t i = 0; i < field.size(); ++i) field[i] *= f[i];
}

}  // namespace

void propagate_span(PropagationState& state, const FiberParams& f, double step_km) {
  if (state.sample_rate_hz <= 0.0) throw dsp_error("propagate_span: sample rate not set");
  if (step_km <= 0.0) throw dsp_error("propagate_span: step_km must be positive");
  const std::size_t n = state.field.size();
  if (n == 0) return;

  // Uniform steps plus a final fractional remainder.
  const double span = f.span_length_km;
  if (span < 0.0) throw dsp_error("propagate_span: negative span length");
  if (span == 0.0) return;
  int n_full = static_cast<int>(std::floor(span / step_km + 1e-9));
  double rem = span - n_full * step_km;
  if (rem < 1e-9 * span) rem = 0.0;
  std::vector<double> steps(static_cast<std::size_t>(n_full), step_km);
  if (rem > 0.0) steps.push_back(rem);
  if (steps.empty()) steps.push_back(span);

  const FiberCoefficients coef = derive_coefficients(f);

  // Symmetric split-step with adjacent half steps merged:
  //   Lin(h0/2) N(h0) Lin((h0+h1)/2) N(h1) ... N(hM) Lin(hM/2)
  // Distinct linear distances are few, so factor vectors are cached.
  std::vector<std::pair<double, std::vector<cdouble>>> factor_cache;
  auto factors_for = [&](double d) -> const std::vector<cdouble>& {
    for (auto& entry : factor_cache)
      if (std::abs(entry.first - d) < 1e-15) return entry.second;
    factor_cache.emplace_back(d, linear_factors(n, state.sample_rate_hz, coef, d));
    return factor_cache.back().second;
  };

  const double span_start_km = state.distance_km;
  double advanced = 0.0;

  fft::forward(state.field.data(), n);
  apply_factors(state.field, factors_for(steps.front() / 2.0));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    fft::backward(state.field.data(), n);

    const double h = steps[i];
    double power_sum = 0.0;
    for (auto& a : state.field) {
      const double p = std::norm(a);
      power_sum += p;
      a *= std::polar(1.0, f.gamma_per_w_km * p * h);
    }
    advanced += h;
    state.distance_km = span_start_km + advanced;
    if (!std::isfinite(power_sum))
      throw propagation_error(
          "propagate_span: non-finite field at " + std::to_string(state.distance_km) + " km",
          state.distance_km);

    fft::forward(state.field.data(), n);
    const double d = (i + 1 < steps.size()) ? (h + steps[i + 1]) / 2.0 : h / 2.0;
    apply_factors(state.field, factors_for(d));
  }
  fft::backward(state.field.data(), n);
}

void edfa_amplify(PropagationState& state, double gain_db, double noise_figure_db,
                  double center_wavelength_nm, RngStream& rng) {
  const double sqrt_g = std::pow(10.0, gain_db / 20.0);
  const AseModel ase =
      derive_ase(gain_db, noise_figure_db, state.sample_rate_hz, center_wavelength_nm);
  const double s = std::sqrt(ase.sigma2_watts / 2.0);  // per-quadrature std dev
  for (auto& a : state.field) {
    a *= sqrt_g;
    if (s > 0.0) a += cdouble{s * rng.normal(), s * rng.normal()};
  }
  ++state.span_index;
}

Waveform propagate_link(const Waveform& w, const FiberParams& f, const AmplifierParams& amp,
                        double launch_power_dbm, double ssfm_step_km, std::uint64_t seed) {
  const Waveform launched = set_launch_power(w, launch_power_dbm);

  PropagationState state;
  state.field = launched.samples;
  state.sample_rate_hz = launched.sample_rate_hz;

  const double gain_db =
      amp.gain_db >= 0.0 ? amp.gain_db : f.loss_db_per_km * f.span_length_km;

  for (int span = 1; span <= f.n_spans; ++span) {
    propagate_span(state, f, ssfm_step_km);
    RngStream rng(seed, "ase-span-" + std::to_string(span));
    edfa_amplify(state, gain_db, amp.noise_figure_db, f.center_wavelength_nm, rng);
  }

  Waveform out;
  out.samples = std::move(state.field);
  out.sample_rate_hz = state.sample_rate_hz;
  return out;
}

}  // namespace cofdm
