// Independent reference implementations used to freeze expected test values.
// Everything here is deliberately written against the definitions, not the
// production code paths.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace oracles {

// erfcinv by bisection on std::erfc: slow, dependency-free, and correct to
// the width of the final bracket.
inline double erfcinv_bisect(double y) {
  double lo = -10.0, hi = 10.0;  // erfc: 2 -> 0 decreasing
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid) > y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double q_db_bisect(double ber) {
  return 20.0 * std::log10(std::sqrt(2.0) * erfcinv_bisect(2.0 * ber));
}

// Brute-force DBSCAN reference: classify cores by counting self-inclusive
// eps-neighbors, form clusters as connected components of the core-core
// reachability graph (union-find), then attach border points to every core
// cluster that reaches them. Noise = reached by no core.
struct DbscanRef {
  std::vector<bool> core;
  std::vector<int> component;                 // per point: core component id, -1 otherwise
  std::vector<std::vector<int>> border_links; // per point: sorted core components in reach
};

inline DbscanRef dbscan_reference(const std::vector<std::array<double, 2>>& pts, double eps,
                                  int min_points) {
  const std::size_t n = pts.size();
  const double e2 = eps * eps;
  auto close = [&](std::size_t a, std::size_t b) {
    const double dx = pts[a][0] - pts[b][0];
    const double dy = pts[a][1] - pts[b][1];
    return dx * dx + dy * dy <= e2;
  };

  DbscanRef r;
  r.core.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    int cnt = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (close(i, j)) ++cnt;
    r.core[i] = cnt >= min_points;
  }

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.core[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j)
      if (r.core[j] && close(i, j)) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
  }

  r.component.assign(n, -1);
  std::vector<int> remap;
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.core[i]) continue;
    const int root = find(static_cast<int>(i));
    auto it = std::find(remap.begin(), remap.end(), root);
    if (it == remap.end()) {
      remap.push_back(root);
      r.component[i] = static_cast<int>(remap.size()) - 1;
    } else {
      r.component[i] = static_cast<int>(it - remap.begin());
    }
  }

  r.border_links.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    if (r.core[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!r.core[j] || !close(i, j)) continue;
      const int comp = r.component[j];
      auto& links = r.border_links[i];
      if (std::find(links.begin(), links.end(), comp) == links.end()) links.push_back(comp);
    }
    std::sort(r.border_links[i].begin(), r.border_links[i].end());
  }
  return r;
}

}  // namespace oracles
