#include <cmath>
#include <complex>
#include <vector>

#include "cofdm/fiber.hpp"
#include "cofdm/rng.hpp"
#include "doctest.h"

using namespace cofdm;

namespace {

PropagationState make_state(std::vector<cdouble> field, double fs) {
  return PropagationState{std::move(field), fs, 0.0, 0};
}

double energy(const std::vector<cdouble>& xs) {
  double e = 0.0;
  for (const auto& x : xs) e += std::norm(x);
  return e;
}

}  // namespace

TEST_SUITE_BEGIN("fiber");

TEST_CASE("Taylor coefficients from D, S and loss") {
  FiberParams f;
  auto c = derive_coefficients(f);
  // lambda^2/(2 pi c) = 1.275448 nm ps at 1550 nm.
  CHECK(c.beta2_ps2_per_km == doctest::Approx(-20.4072).epsilon(1e-4));
  CHECK(c.beta2_ps2_per_km < 0.0);
  CHECK(c.beta3_ps3_per_km == doctest::Approx(0.131191).epsilon(1e-4));
  CHECK(c.alpha_per_km == doctest::Approx(0.2 * std::log(10.0) / 10.0).epsilon(1e-12));

  // Slope chosen to cancel 2D/lambda zeroes beta3.
  f.dispersion_slope_ps_nm2_km = -2.0 * f.dispersion_ps_nm_km / f.center_wavelength_nm;
  CHECK(derive_coefficients(f).beta3_ps3_per_km == doctest::Approx(0.0).scale(1e-9));
}

TEST_CASE("launch power scaling") {
  RngStream rng(3, "wave");
  Waveform w;
  w.sample_rate_hz = 12.5e9;
  w.samples.resize(4096);
  for (auto& s : w.samples) s = cdouble(rng.normal(), rng.normal());

  auto scaled = set_launch_power(w, 0.0);
  CHECK(scaled.mean_power_w() == doctest::Approx(1e-3).epsilon(1e-12));
  scaled = set_launch_power(w, 4.0);
  CHECK(scaled.mean_power_w() == doctest::Approx(2.51189e-3).epsilon(1e-5));

  auto twice = set_launch_power(scaled, 4.0);
  for (std::size_t i = 0; i < scaled.samples.size(); ++i)
    CHECK(std::abs(twice.samples[i] - scaled.samples[i]) < 1e-12 * std::abs(scaled.samples[i]) + 1e-300);

  Waveform zero;
  zero.samples.assign(16, {0.0, 0.0});
  CHECK_THROWS_AS(set_launch_power(zero, 0.0), dsp_error);

  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0).scale(1.0));
  CHECK(watts_to_dbm(dbm_to_watts(7.3)) == doctest::Approx(7.3));
}

TEST_CASE("ASE statistics") {
  // G = 20 dB, NF 5.5 dB, 12.5 GHz at 1550 nm.
  auto m = derive_ase(20.0, 5.5, 12.5e9, 1550.0);
  CHECK(m.n_sp == doctest::Approx(1.79199).epsilon(1e-4));
  CHECK(!m.floored);
  CHECK(m.sigma2_watts == doctest::Approx(2.84201e-7).epsilon(1e-4));

  // NF below the 3 dB limit floors n_sp at 1.
  auto floored = derive_ase(20.0, 1.0, 12.5e9, 1550.0);
  CHECK(floored.floored);
  CHECK(floored.n_sp == 1.0);

  // Unity gain adds nothing.
  auto unity = derive_ase(0.0, 5.5, 12.5e9, 1550.0);
  CHECK(unity.sigma2_watts == 0.0);
}

TEST_CASE("EDFA amplification and measured noise variance") {
  const std::size_t n = 1'000'000;
  auto st = make_state(std::vector<cdouble>(n, {0.0, 0.0}), 12.5e9);
  RngStream rng(21, "ase-span-1");
  edfa_amplify(st, 20.0, 5.5, 1550.0, rng);
  const double measured = energy(st.field) / static_cast<double>(n);
  CHECK(measured == doctest::Approx(2.84201e-7).epsilon(0.01));

  // G = 1: field passes through untouched.
  auto quiet = make_state({{1.0, 2.0}, {-0.5, 0.25}}, 12.5e9);
  RngStream rng2(21, "ase-span-1");
  edfa_amplify(quiet, 0.0, 5.5, 1550.0, rng2);
  CHECK(quiet.field[0] == cdouble{1.0, 2.0});
  CHECK(quiet.field[1] == cdouble{-0.5, 0.25});
}

TEST_CASE("zero-length span is the identity") {
  FiberParams f;
  f.span_length_km = 0.0;
  auto st = make_state({{1.0, 0.5}, {0.0, -1.0}, {0.25, 0.25}}, 12.5e9);
  auto before = st.field;
  propagate_span(st, f, 0.1);
  CHECK(st.field == before);
  CHECK(st.distance_km == 0.0);
}

TEST_CASE("Gaussian pulse broadens by sqrt(5) after two dispersion lengths") {
  // 1 ps sampling so the pulse is resolved; slope cancelled so only beta2 acts.
  const double fs = 1e12;
  const int n = 8192;
  const double t0_ps = 71.42;  // L_D = t0^2/|beta2| ~ 250 km

  FiberParams f;
  f.loss_db_per_km = 0.0;
  f.gamma_per_w_km = 0.0;
  f.dispersion_slope_ps_nm2_km = -2.0 * f.dispersion_ps_nm_km / f.center_wavelength_nm;
  const double beta2 = std::fabs(derive_coefficients(f).beta2_ps2_per_km);
  const double ld_km = t0_ps * t0_ps / beta2;
  f.span_length_km = 2.0 * ld_km;

  std::vector<cdouble> field(n);
  auto width = [&](const std::vector<cdouble>& a) {
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = i - n / 2.0;
      const double w = std::norm(a[i]);
      p += w;
      m1 += w * t;
      m2 += w * t * t;
    }
    m1 /= p;
    return std::sqrt(m2 / p - m1 * m1);
  };
  for (int i = 0; i < n; ++i) {
    const double t = (i - n / 2.0);  // ps at 1 ps per sample
    field[i] = std::exp(-t * t / (2.0 * t0_ps * t0_ps));
  }
  auto st = make_state(field, fs);
  const double w0 = width(st.field);
  propagate_span(st, f, 50.0);
  CHECK(st.distance_km == doctest::Approx(2.0 * ld_km));
  CHECK(width(st.field) / w0 == doctest::Approx(std::sqrt(5.0)).epsilon(0.01));
}

TEST_CASE("CW self-phase modulation rotates by gamma P z") {
  FiberParams f;
  f.loss_db_per_km = 0.0;
  f.dispersion_ps_nm_km = 0.0;
  f.dispersion_slope_ps_nm2_km = 0.0;
  const double power = 2e-3;
  auto st = make_state(std::vector<cdouble>(1024, {std::sqrt(power), 0.0}), 12.5e9);
  propagate_span(st, f, 0.1);  // 100 km at 2 mW: 1.1 * 0.002 * 100 = 0.22 rad
  const double want = f.gamma_per_w_km * power * 100.0;
  for (const auto& x : st.field) {
    CHECK(std::fabs(std::arg(x) - want) < 1e-6);
    CHECK(std::abs(x) == doctest::Approx(std::sqrt(power)).epsilon(1e-9));
  }
}

TEST_CASE("lossless dispersion-only propagation conserves energy") {
  FiberParams f;
  f.loss_db_per_km = 0.0;
  f.gamma_per_w_km = 0.0;
  RngStream rng(22, "wave");
  std::vector<cdouble> field(4096);
  for (auto& s : field) s = cdouble(rng.normal(), rng.normal());
  auto st = make_state(field, 12.5e9);
  const double e0 = energy(st.field);
  for (int span = 0; span < 5; ++span) propagate_span(st, f, 1.0);
  CHECK(st.distance_km == doctest::Approx(500.0));
  CHECK(std::fabs(energy(st.field) - e0) / e0 < 1e-6);
}

TEST_CASE("nonlinear-only propagation preserves magnitudes pointwise") {
  FiberParams f;
  f.loss_db_per_km = 0.0;
  f.dispersion_ps_nm_km = 0.0;
  f.dispersion_slope_ps_nm2_km = 0.0;
  RngStream rng(23, "wave");
  std::vector<cdouble> field(512);
  for (auto& s : field) s = cdouble(0.02 * rng.normal(), 0.02 * rng.normal());
  auto st = make_state(field, 12.5e9);
  propagate_span(st, f, 0.5);
  for (std::size_t i = 0; i < field.size(); ++i)
    CHECK(std::abs(st.field[i]) == doctest::Approx(std::abs(field[i])).epsilon(1e-12));
}

TEST_CASE("fractional final step covers the span exactly") {
  FiberParams f;
  f.loss_db_per_km = 0.0;
  f.gamma_per_w_km = 0.0;
  RngStream rng(24, "wave");
  std::vector<cdouble> field(1024);
  for (auto& s : field) s = cdouble(rng.normal(), rng.normal());

  auto a = make_state(field, 12.5e9);
  propagate_span(a, f, 0.3);  // 333 steps + 0.1 km remainder
  auto b = make_state(field, 12.5e9);
  propagate_span(b, f, 100.0);  // single step; exact for a linear span
  CHECK(a.distance_km == doctest::Approx(100.0));
  for (std::size_t i = 0; i < field.size(); ++i)
    CHECK(std::abs(a.field[i] - b.field[i]) < 1e-9);
}

TEST_CASE("runaway field raises a propagation error with a distance stamp") {
  FiberParams f;
  f.loss_db_per_km = -1000.0;  // gain medium, blows up mid-span
  auto st = make_state(std::vector<cdouble>(256, {1.0, 0.0}), 12.5e9);
  try {
    propagate_span(st, f, 1.0);
    FAIL("expected propagation_error");
  } catch (const propagation_error& e) {
    CHECK(e.distance_km > 0.0);
    CHECK(e.distance_km <= 100.0);
  }
}

TEST_CASE("zero-span link only scales the power") {
  FiberParams f;
  f.n_spans = 0;
  RngStream rng(25, "wave");
  Waveform w;
  w.sample_rate_hz = 12.5e9;
  w.samples.resize(256);
  for (auto& s : w.samples) s = cdouble(rng.normal(), rng.normal());

  auto out = propagate_link(w, f, AmplifierParams{}, -2.0, 0.1, 1);
  CHECK(out.mean_power_w() == doctest::Approx(dbm_to_watts(-2.0)).epsilon(1e-12));
  const double ratio = out.samples[0].real() / w.samples[0].real();
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(std::abs(out.samples[i] - w.samples[i] * ratio) < 1e-12);
}

TEST_CASE("link output is deterministic per seed") {
  FiberParams f;
  f.n_spans = 2;
  f.span_length_km = 10.0;
  RngStream rng(26, "wave");
  Waveform w;
  w.sample_rate_hz = 12.5e9;
  w.samples.resize(512);
  for (auto& s : w.samples) s = cdouble(rng.normal(), rng.normal());

  auto a = propagate_link(w, f, AmplifierParams{}, 0.0, 1.0, 5);
  auto b = propagate_link(w, f, AmplifierParams{}, 0.0, 1.0, 5);
  CHECK(a == b);
  auto c = propagate_link(w, f, AmplifierParams{}, 0.0, 1.0, 6);
  bool differs = false;
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    if (a.samples[i] != c.samples[i]) differs = true;
  CHECK(differs);
}

TEST_CASE("ASE accumulates linearly with span count") {
  // CW carrier through gamma = 0 spans; gain exactly restores launch power,
  // so output - input isolates the accumulated ASE.
  FiberParams f;
  f.gamma_per_w_km = 0.0;
  const std::size_t n = 65536;
  Waveform w;
  w.sample_rate_hz = 12.5e9;
  w.samples.assign(n, {1.0, 0.0});

  auto noise_power = [&](int spans, std::uint64_t seed) {
    FiberParams fs = f;
    fs.n_spans = spans;
    auto out = propagate_link(w, fs, AmplifierParams{}, 0.0, 100.0, seed);
    const cdouble carrier{std::sqrt(1e-3), 0.0};
    double acc = 0.0;
    for (const auto& s : out.samples) acc += std::norm(s - carrier);
    return acc / static_cast<double>(n);
  };

  const double one = noise_power(1, 31);
  const double five = noise_power(5, 32);
  CHECK(one == doctest::Approx(2.84201e-7).epsilon(0.02));
  CHECK(five / one == doctest::Approx(5.0).epsilon(0.05));
}

TEST_SUITE_END();
