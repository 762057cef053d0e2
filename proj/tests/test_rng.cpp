#include <cmath>
#include <vector>

#include "cofdm/rng.hpp"
#include "doctest.h"

using namespace cofdm;

TEST_SUITE_BEGIN("rng");

TEST_CASE("same (seed, stream) reproduces the sequence") {
  RngStream a(42, "bit-source");
  RngStream b(42, "bit-source");
  for (int i = 0; i < 256; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, "bit-source");
  RngStream d(42, "bit-source");
  for (int i = 0; i < 64; ++i) {
    CHECK(c.uniform() == d.uniform());
    CHECK(c.normal() == d.normal());
    CHECK(c.bit() == d.bit());
  }
}

TEST_CASE("seeds and stream ids separate the streams") {
  RngStream a(42, "bit-source");
  RngStream b(43, "bit-source");
  RngStream c(42, "ase-span-1");
  RngStream d(42, "ase-span-2");
  bool ab = false, ac = false, cd = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a.next_u64();
    if (x != b.next_u64()) ab = true;
    const auto y = c.next_u64();
    if (x != y) ac = true;
    if (y != d.next_u64()) cd = true;
  }
  CHECK(ab);
  CHECK(ac);
  CHECK(cd);
  CHECK(RngStream::derive_seed(42, "ase-span-1") != RngStream::derive_seed(42, "ase-span-2"));
  CHECK(RngStream::derive_seed(42, "bit-source") != RngStream::derive_seed(43, "bit-source"));
}

TEST_CASE("bits are fair") {
  RngStream rng(7, "bit-source");
  const int n = 1'000'000;
  long ones = 0;
  for (int i = 0; i < n; ++i) ones += rng.bit();
  CHECK(static_cast<double>(ones) / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("uniform covers [0, 1) with the right moments") {
  RngStream rng(11, "u");
  const int n = 200'000;
  double sum = 0.0, sum2 = 0.0, lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
    sum2 += x * x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum2 / n - 0.25 == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("normal has zero mean and unit variance") {
  RngStream rng(12, "n");
  const int n = 500'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(sum2 / n - mean * mean == doctest::Approx(1.0).epsilon(0.01));
}

TEST_SUITE_END();
