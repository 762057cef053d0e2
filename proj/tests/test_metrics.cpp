#include <cmath>
#include <vector>

#include "cofdm/metrics.hpp"
#include "cofdm/modem.hpp"
#include "cofdm/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cofdm;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("erfcinv matches the bisection oracle") {
  for (double y : {1.9, 1.5, 1.0, 0.7, 0.31, 0.29, 0.1, 2e-3, 1e-4, 1e-7, 1e-11}) {
    const double ref = oracles::erfcinv_bisect(y);
    CHECK(erfcinv(y) == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK_THROWS_AS(erfcinv(0.0), std::domain_error);
  CHECK_THROWS_AS(erfcinv(2.0), std::domain_error);
}

TEST_CASE("Q-factor reference points") {
  // BER 1e-3 <-> Q_linear ~ 3.0902, 9.80 dB.
  CHECK(q_factor_db(1e-3) == doctest::Approx(9.80).epsilon(0.0011));
  CHECK(q_factor_db(1e-3) == doctest::Approx(oracles::q_db_bisect(1e-3)).epsilon(1e-10));
  // BER 0.02275 <-> Q_linear ~ 2.0, 6.02 dB.
  CHECK(q_factor_db(0.0228) == doctest::Approx(oracles::q_db_bisect(0.0228)).epsilon(1e-10));
  CHECK(q_factor_db(0.5 * std::erfc(std::sqrt(2.0))) == doctest::Approx(6.0206).epsilon(1e-4));
}

TEST_CASE("Q-factor edge behaviour") {
  CHECK(q_factor_db(0.0) == kQFactorInf);
  CHECK_THROWS_AS(q_factor_db(0.5), std::domain_error);
  CHECK_THROWS_AS(q_factor_db(0.7), std::domain_error);
  CHECK_THROWS_AS(q_factor_db(-1e-3), std::domain_error);
  CHECK(q_factor_db(0.4999) < -60.0);  // Q_linear -> 0 as ber -> 0.5
}

TEST_CASE("ber -> Q -> ber round-trip") {
  for (double lb = std::log(1e-6); lb <= std::log(0.4) + 1e-12; lb += 0.25) {
    const double ber = std::exp(lb);
    const double back = ber_from_q_db(q_factor_db(ber));
    CHECK(std::fabs(back - ber) / ber < 1e-9);
  }
}

TEST_CASE("Q-factor is strictly decreasing in ber") {
  double prev = q_factor_db(1e-9);
  for (double lb = std::log(1e-8); lb <= std::log(0.49); lb += 0.1) {
    const double q = q_factor_db(std::exp(lb));
    CHECK(q < prev);
    prev = q;
  }
}

TEST_CASE("count_ber") {
  BitBlock tx, rx;
  tx.bits = {0, 1, 1, 0, 1, 0, 0, 1};
  rx = tx;
  auto r = count_ber(tx, rx);
  CHECK(r.n_errors == 0u);
  CHECK(r.ber == 0.0);

  for (auto& b : rx.bits) b ^= 1;
  r = count_ber(tx, rx);
  CHECK(r.ber == 1.0);

  // 5 wrong bits out of 50688.
  tx.bits.assign(50688, 0);
  rx.bits.assign(50688, 0);
  for (int i : {3, 100, 999, 20000, 50687}) rx.bits[i] = 1;
  r = count_ber(tx, rx);
  CHECK(r.n_errors == 5u);
  CHECK(r.ber == doctest::Approx(5.0 / 50688.0).epsilon(1e-15));
  CHECK(count_ber(rx, tx).n_errors == 5u);  // symmetric

  rx.bits.pop_back();
  CHECK_THROWS_AS(count_ber(tx, rx), dsp_error);
}

TEST_CASE("evm") {
  SubcarrierGrid ref(4, 50);
  RngStream rng(5, "evm");
  for (auto& s : ref.symbols)
    s = cdouble(rng.bit() ? kInvSqrt2 : -kInvSqrt2, rng.bit() ? kInvSqrt2 : -kInvSqrt2);

  CHECK(evm(ref, ref) == 0.0);

  SubcarrierGrid scaled = ref;
  for (auto& s : scaled.symbols) s *= 1.1;
  CHECK(evm(scaled, ref) == doctest::Approx(0.1).epsilon(1e-12));

  // Circular Gaussian noise, sigma per quadrature, on a unit-power grid.
  SubcarrierGrid big(128, 400);
  for (auto& s : big.symbols)
    s = cdouble(rng.bit() ? kInvSqrt2 : -kInvSqrt2, rng.bit() ? kInvSqrt2 : -kInvSqrt2);
  const double sigma = 0.1;
  SubcarrierGrid noisy = big;
  for (auto& s : noisy.symbols) s += cdouble(sigma * rng.normal(), sigma * rng.normal());
  CHECK(evm(noisy, big) ==
        doctest::Approx(std::sqrt(2.0 * sigma * sigma)).epsilon(0.02));

  SubcarrierGrid wrong(4, 49);
  CHECK_THROWS_AS(evm(wrong, ref), dsp_error);
}

TEST_SUITE_END();
