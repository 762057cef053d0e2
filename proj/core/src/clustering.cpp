#include "cofdm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace cofdm {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline double dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

std::array<double, 2> centroid_of(const std::vector<std::array<double, 2>>& pts,
                                  const std::vector<int>& labels, int cluster) {
  std::array<double, 2> c{0.0, 0.0};
  std::size_t n = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (labels[i] != cluster) continue;
    c[0] += pts[i][0];
    c[1] += pts[i][1];
    ++n;
  }
  if (n > 0) {
    c[0] /= static_cast<double>(n);
    c[1] /= static_cast<double>(n);
  }
  return c;
}

void fill_centroids(ClusterAssignment& a, const std::vector<std::array<double, 2>>& pts) {
  a.centroids.resize(a.n_clusters);
  for (int c = 0; c < a.n_clusters; ++c) a.centroids[c] = centroid_of(pts, a.labels, c);
}

}  // namespace

PointSet make_point_set(const SubcarrierGrid& equalized, int k, const OfdmParams& ofdm) {
  if (k < 0 || k >= equalized.n_subcarriers)
    throw dsp_error("make_point_set: subcarrier index out of range");

  PointSet ps;
  ps.subcarrier = k;
  const int n = ofdm.n_data_symbols();
  ps.points.reserve(n);
  ps.raw.reserve(n);
  ps.time_index.reserve(n);

  double acc = 0.0;
  for (int t = ofdm.n_pilot_symbols; t < ofdm.n_symbols_per_subcarrier; ++t) {
    const cdouble v = equalized.at(k, t);
    ps.raw.push_back(v);
    ps.time_index.push_back(t);
    acc += std::norm(v);
  }
  const double rms = ps.raw.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(ps.raw.size()));
  ps.scale = rms > 0.0 ? rms : 1.0;
  for (const cdouble& v : ps.raw)
    ps.points.push_back({v.real() / ps.scale, v.imag() / ps.scale});
  return ps;
}

std::vector<std::size_t> region_query(const PointSet& ps, std::size_t i, double eps) {
  std::vector<std::size_t> out;
  const double e2 = eps * eps;
  const auto& p = ps.points[i];
  for (std::size_t j = 0; j < ps.points.size(); ++j)
    if (dist2(p, ps.points[j]) <= e2) out.push_back(j);
  return out;
}

ClusterAssignment dbscan(const PointSet& ps, double eps, int min_points) {
  if (eps <= 0.0) throw config_error("epsilon: must be positive");
  if (min_points < 1) throw config_error("min_points: must be >= 1");

  const std::size_t n = ps.points.size();
  constexpr int kUnvisited = -3;
  ClusterAssignment a;
  a.labels.assign(n, kUnvisited);
  a.roles.assign(n, PointRole::Noise);

  int cid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.labels[i] != kUnvisited) continue;
    auto neighbors = region_query(ps, i, eps);
    if (neighbors.size() < static_cast<std::size_t>(min_points)) {
      a.labels[i] = kNoiseLabel;  // provisional; may later join a cluster as border
      continue;
    }
    a.labels[i] = cid;
    a.roles[i] = PointRole::Core;
    std::deque<std::size_t> seeds(neighbors.begin(), neighbors.end());
    while (!seeds.empty()) {
      const std::size_t j = seeds.front();
      seeds.pop_front();
      if (a.labels[j] == kNoiseLabel) {
        a.labels[j] = cid;  // density-reachable but not core: border point
        a.roles[j] = PointRole::Border;
        continue;
      }
      if (a.labels[j] != kUnvisited) continue;
      a.labels[j] = cid;
      auto nj = region_query(ps, j, eps);
      if (nj.size() >= static_cast<std::size_t>(min_points)) {
        a.roles[j] = PointRole::Core;
        seeds.insert(seeds.end(), nj.begin(), nj.end());
      } else {
        a.roles[j] = PointRole::Border;
      }
    }
    ++cid;
  }

  a.n_clusters = cid;
  fill_centroids(a, ps.points);
  return a;
}

std::vector<std::array<double, 2>> ideal_corner_init(int k) {
  std::vector<std::array<double, 2>> init(k);
  for (int i = 0; i < k; ++i) {
    const double ang = kPi / 4.0 + 2.0 * kPi * i / k;
    init[i] = {std::cos(ang), std::sin(ang)};
  }
  return init;
}

ClusterAssignment kmeans(const PointSet& ps, const std::vector<std::array<double, 2>>& init,
                         int max_iterations) {
  const std::size_t n = ps.points.size();
  const int k = static_cast<int>(init.size());
  if (k < 1) throw config_error("k_clusters: must be >= 1");
  if (static_cast<std::size_t>(k) > n)
    throw config_error("k_clusters: more clusters than points (" + std::to_string(k) + " > " +
                       std::to_string(n) + ")");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (init[i] == init[j])
        throw config_error("k_clusters: initial centroids must be distinct");

  ClusterAssignment a;
  a.labels.assign(n, 0);
  a.centroids = init;
  a.roles.assign(n, PointRole::Core);
  a.n_clusters = k;

  std::vector<int> prev(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Assignment; ties to the lowest centroid index.
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = dist2(ps.points[i], a.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(ps.points[i], a.centroids[c]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      a.labels[i] = best;
      wcss += bd;
    }

    // Empty-cluster repair: reseed at the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (std::count(a.labels.begin(), a.labels.end(), c) > 0) continue;
      std::size_t far_i = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = dist2(ps.points[i], a.centroids[a.labels[i]]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      a.centroids[c] = ps.points[far_i];
      a.labels[far_i] = c;
      wcss -= far_d;  // that point's contribution is now zero
    }
    a.wcss_trace.push_back(wcss);
    a.n_iterations = iter + 1;

    if (a.labels == prev) break;
    prev = a.labels;

    for (int c = 0; c < k; ++c) a.centroids[c] = centroid_of(ps.points, a.labels, c);
  }
  return a;
}

ClusterAssignment kmeans_cluster(const PointSet& ps, int k, int max_iterations) {
  return kmeans(ps, ideal_corner_init(k), max_iterations);
}

ClusterAssignment modified_dbscan(const PointSet& ps, double eps, int min_points, int k,
                                  int max_iterations) {
  ClusterAssignment base = dbscan(ps, eps, min_points);

  // Degenerate density scan: hand the whole set to K-means and flag it.
  if (base.n_clusters == 0) {
    ClusterAssignment a = kmeans_cluster(ps, std::min<int>(k, ps.points.size()), max_iterations);
    a.kmeans_fallback = true;
    return a;
  }

  std::vector<std::size_t> noise_idx;
  for (std::size_t i = 0; i < base.labels.size(); ++i)
    if (base.labels[i] == kNoiseLabel) noise_idx.push_back(i);
  if (noise_idx.empty()) return base;

  // Second stage: K-means over the noise points only.
  PointSet noise;
  noise.subcarrier = ps.subcarrier;
  noise.scale = ps.scale;
  for (std::size_t i : noise_idx) {
    noise.points.push_back(ps.points[i]);
    noise.raw.push_back(ps.raw[i]);
    noise.time_index.push_back(ps.time_index[i]);
  }

  const int k_eff = std::min<int>(k, noise_idx.size());
  std::vector<std::array<double, 2>> init;
  if (base.n_clusters == k_eff) {
    init = base.centroids;
  } else {
    init = ideal_corner_init(k_eff);
  }
  init.resize(k_eff);
  ClusterAssignment stage2 = kmeans(noise, init, max_iterations);

  // Each noise group joins the density cluster whose centroid is nearest to
  // the group centroid.
  std::vector<int> adopt(k_eff, 0);
  for (int c = 0; c < k_eff; ++c) {
    int best = 0;
    double bd = dist2(stage2.centroids[c], base.centroids[0]);
    for (int d = 1; d < base.n_clusters; ++d) {
      const double dd = dist2(stage2.centroids[c], base.centroids[d]);
      if (dd < bd) {
        bd = dd;
        best = d;
      }
    }
    adopt[c] = best;
  }
  for (std::size_t m = 0; m < noise_idx.size(); ++m) {
    base.labels[noise_idx[m]] = adopt[stage2.labels[m]];
    base.roles[noise_idx[m]] = PointRole::Border;
  }
  fill_centroids(base, ps.points);
  base.wcss_trace = std::move(stage2.wcss_trace);
  base.n_iterations = stage2.n_iterations;
  return base;
}

FcmResult fuzzy_cmeans(const PointSet& ps, int c, double fuzzifier, double tol,
                       int max_iterations) {
  const std::size_t n = ps.points.size();
  if (c < 1) throw config_error("k_clusters: must be >= 1");
  if (static_cast<std::size_t>(c) > n)
    throw config_error("k_clusters: more clusters than points");
  if (fuzzifier <= 1.0) throw config_error("fcm_fuzzifier: must be > 1");

  FcmResult r;
  auto& a = r.assignment;
  a.n_clusters = c;
  a.centroids = ideal_corner_init(c);
  a.labels.assign(n, 0);
  a.roles.assign(n, PointRole::Core);
  r.memberships.assign(n * c, 0.0);

  const double expo = 2.0 / (fuzzifier - 1.0);
  std::vector<double> d2(c);

  for (int iter = 0; iter < max_iterations; ++iter) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int zero_count = 0;
      for (int j = 0; j < c; ++j) {
        d2[j] = dist2(ps.points[i], a.centroids[j]);
        if (d2[j] == 0.0) ++zero_count;
      }
      for (int j = 0; j < c; ++j) {
        double u;
        if (zero_count > 0) {
          // Point coincides with >= 1 centroid: all membership goes there.
          u = d2[j] == 0.0 ? 1.0 / zero_count : 0.0;
        } else {
          double acc = 0.0;
          for (int l = 0; l < c; ++l) acc += std::pow(d2[j] / d2[l], expo / 2.0);
          u = 1.0 / acc;
        }
        max_change = std::max(max_change, std::abs(u - r.memberships[i * c + j]));
        r.memberships[i * c + j] = u;
      }
    }

    for (int j = 0; j < c; ++j) {
      double sx = 0.0, sy = 0.0, sw = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = std::pow(r.memberships[i * c + j], fuzzifier);
        sx += w * ps.points[i][0];
        sy += w * ps.points[i][1];
        sw += w;
      }
      if (sw > 0.0) a.centroids[j] = {sx / sw, sy / sw};
    }
    a.n_iterations = iter + 1;
    if (max_change < tol) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double bu = r.memberships[i * c];
    for (int j = 1; j < c; ++j) {
      if (r.memberships[i * c + j] > bu) {
        bu = r.memberships[i * c + j];
        best = j;
      }
    }
    a.labels[i] = best;
  }
  return r;
}

ClusterAssignment hierarchical_cluster(const PointSet& ps, int k, Linkage linkage) {
  const std::size_t n = ps.points.size();
  if (k < 1) throw config_error("k_clusters: must be >= 1");
  if (static_cast<std::size_t>(k) > n)
    throw config_error("k_clusters: more clusters than points");

  // Agglomerative merging on a cached distance matrix with Lance-Williams
  // updates. Ward distances are kept squared; average/complete are Euclidean.
  const bool squared = linkage == Linkage::Ward;
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = dist2(ps.points[i], ps.points[j]);
      if (!squared) v = std::sqrt(v);
      d[i * n + j] = d[j * n + i] = v;
    }

  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  // Cluster membership tracked directly; n is small enough that the O(n)
  // relabel per merge is irrelevant next to the distance updates.
  std::vector<int> member(n);
  for (std::size_t i = 0; i < n; ++i) member[i] = static_cast<int>(i);

  // Cached nearest active neighbor per active cluster (lowest index on ties)
  // turns the min search from O(n^2) per merge into O(n).
  std::vector<std::size_t> nn(n, 0);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());
  auto recompute_nn = [&](std::size_t i) {
    nnd[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      if (d[i * n + j] < nnd[i]) {
        nnd[i] = d[i * n + j];
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) recompute_nn(i);

  std::size_t n_active = n;
  while (n_active > static_cast<std::size_t>(k)) {
    // Global minimum over cached neighbors; ties resolve to the
    // lexicographically lowest active pair because the scan is ascending and
    // recompute_nn keeps the lowest minimizer index.
    std::size_t best_i = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      double cand = nnd[i];
      std::size_t ci = i, cj = nn[i];
      if (cj < ci) std::swap(ci, cj);  // normalize for the lexicographic rule
      if (cand < best || (cand == best && ci < best_i)) {
        best = cand;
        best_i = ci;
      }
    }
    std::size_t bi = best_i;
    // Lowest partner index achieving the minimum from bi.
    std::size_t bj = 0;
    double bjd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == bi || !active[j]) continue;
      if (d[bi * n + j] < bjd) {
        bjd = d[bi * n + j];
        bj = j;
      }
    }

    // Merge bj into bi.
    const double ni = size[bi], nj = size[bj];
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == bi || x == bj) continue;
      const double dix = d[bi * n + x], djx = d[bj * n + x];
      double v = 0.0;
      switch (linkage) {
        case Linkage::Average:
          v = (ni * dix + nj * djx) / (ni + nj);
          break;
        case Linkage::Complete:
          v = std::max(dix, djx);
          break;
        case Linkage::Ward: {
          const double nx = size[x];
          const double t = ni + nj + nx;
          v = ((ni + nx) * dix + (nj + nx) * djx - nx * d[bi * n + bj]) / t;
          break;
        }
      }
      d[bi * n + x] = d[x * n + bi] = v;
    }
    size[bi] += size[bj];
    active[bj] = false;
    for (std::size_t i = 0; i < n; ++i)
      if (member[i] == static_cast<int>(bj)) member[i] = static_cast<int>(bi);
    --n_active;

    // Repair invalidated neighbor caches: anything that pointed at the merged
    // pair, plus clusters whose distance to bi just shrank below their cache.
    recompute_nn(bi);
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == bi) continue;
      if (nn[x] == bi || nn[x] == bj) {
        recompute_nn(x);
      } else if (d[x * n + bi] < nnd[x]) {
        nnd[x] = d[x * n + bi];
        nn[x] = bi;
      }
    }
  }

  // Compact labels in order of first appearance.
  ClusterAssignment a;
  a.labels.assign(n, -1);
  a.roles.assign(n, PointRole::Core);
  std::vector<int> remap(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (remap[member[i]] < 0) remap[member[i]] = next++;
    a.labels[i] = remap[member[i]];
  }
  a.n_clusters = next;
  fill_centroids(a, ps.points);
  return a;
}

DecisionSet clusters_to_decisions(const ClusterAssignment& a, const PointSet& ps) {
  DecisionSet out;
  const std::size_t n = ps.points.size();
  if (a.labels.size() != n)
    throw dsp_error("clusters_to_decisions: assignment/point-set size mismatch");
  out.decided.resize(n);
  out.labels = a.labels;
  out.cluster_count_report = a.kmeans_fallback ? 0 : a.n_clusters;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = a.labels[i];
    if (label == kNoiseLabel) {
      out.decided[i] = ps.raw[i];  // pass noise through untouched
    } else {
      const auto& c = a.centroids[label];
      out.decided[i] = cdouble{c[0] * ps.scale, c[1] * ps.scale};
    }
  }
  return out;
}

}  // namespace cofdm
