#include <benchmark/benchmark.h>

#include <array>
#include <vector>

#include "cofdm/clustering.hpp"
#include "cofdm/config.hpp"
#include "cofdm/fiber.hpp"
#include "cofdm/modem.hpp"
#include "cofdm/rng.hpp"

using namespace cofdm;

namespace {

// One subcarrier's worth of noisy constellation points.
PointSet constellation_points(int n, double sigma, std::uint64_t seed) {
  RngStream rng(seed, "bench-points");
  const auto corners = ideal_corner_init(4);
  PointSet ps;
  ps.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& c = corners[i % 4];
    ps.points.push_back({c[0] + sigma * rng.normal(), c[1] + sigma * rng.normal()});
    ps.raw.emplace_back(ps.points.back()[0], ps.points.back()[1]);
    ps.time_index.push_back(i);
  }
  return ps;
}

void BM_dbscan(benchmark::State& state) {
  auto ps = constellation_points(396, 0.15, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(dbscan(ps, 0.09, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_dbscan)->Arg(10)->Arg(90)->Arg(150);

void BM_modified_dbscan(benchmark::State& state) {
  auto ps = constellation_points(396, 0.15, 1);
  for (auto _ : state) benchmark::DoNotOptimize(modified_dbscan(ps, 0.09, 90, 4, 300));
}
BENCHMARK(BM_modified_dbscan);

void BM_kmeans(benchmark::State& state) {
  auto ps = constellation_points(396, 0.15, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_cluster(ps, 4, 300));
}
BENCHMARK(BM_kmeans);

void BM_fuzzy_cmeans(benchmark::State& state) {
  auto ps = constellation_points(396, 0.15, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fuzzy_cmeans(ps, 4, 2.0, 1e-5, 300));
}
BENCHMARK(BM_fuzzy_cmeans);

void BM_hierarchical(benchmark::State& state) {
  auto ps = constellation_points(396, 0.15, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(hierarchical_cluster(ps, 4, Linkage::Average));
}
BENCHMARK(BM_hierarchical);

void BM_ofdm_modulate(benchmark::State& state) {
  OfdmParams p;
  RngStream rng(2, "bench-bits");
  auto grid = dqpsk_encode(generate_bits(p, rng), p);
  for (auto _ : state) benchmark::DoNotOptimize(ofdm_modulate(grid, p));
}
BENCHMARK(BM_ofdm_modulate);

void BM_ssfm_km(benchmark::State& state) {
  OfdmParams p;
  RngStream rng(3, "bench-bits");
  auto wave = set_launch_power(ofdm_modulate(dqpsk_encode(generate_bits(p, rng), p), p), 4.0);
  FiberParams f;
  f.span_length_km = 1.0;
  for (auto _ : state) {
    PropagationState st;
    st.sample_rate_hz = wave.sample_rate_hz;
    st.field = wave.samples;
    propagate_span(st, f, 0.1);
    benchmark::DoNotOptimize(st.field.data());
  }
}
BENCHMARK(BM_ssfm_km)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
