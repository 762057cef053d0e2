#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cofdm/config.hpp"
#include "cofdm/modem.hpp"

namespace cofdm {

inline constexpr int kNoiseLabel = -1;   // DBSCAN noise
inline constexpr int kPilotLabel = -2;   // pilot slots in exported grids

// Constellation points of one subcarrier's data symbols, RMS-normalized to 1.
// `raw` keeps the unnormalized values so downstream decisions can pass noise
// points through bit-exactly.
struct PointSet {
  std::vector<std::array<double, 2>> points;  // normalized (re, im)
  std::vector<cdouble> raw;                   // original equalized symbols
  std::vector<int> time_index;                // source OFDM symbol index per point
  int subcarrier = -1;
  double scale = 1.0;                         // RMS used for normalization
};

// Data-slot points (pilots excluded) of subcarrier k.
PointSet make_point_set(const SubcarrierGrid& equalized, int k, const OfdmParams& ofdm);

enum class PointRole : std::uint8_t { Core, Border, Noise };

struct ClusterAssignment {
  std::vector<int> labels;                       // >= 0, or kNoiseLabel
  std::vector<std::array<double, 2>> centroids;  // per cluster, normalized units
  std::vector<PointRole> roles;
  int n_clusters = 0;
  bool kmeans_fallback = false;     // modified DBSCAN degraded to plain K-means
  std::vector<double> wcss_trace;   // K-means objective per iteration (K-means paths only)
  int n_iterations = 0;
};

// Indices with ||p_i - p_j|| <= eps, ascending, including i itself.
std::vector<std::size_t> region_query(const PointSet& ps, std::size_t i, double eps);

// Density clustering. Deterministic: points are visited in ascending index
// order, seed lists expand FIFO in region_query order, so a border point
// reachable from several clusters joins the one discovered first (lowest id).
// A point is core when its self-inclusive eps-neighborhood has >= min_points
// members.
ClusterAssignment dbscan(const PointSet& ps, double eps, int min_points);

// Lloyd iteration from explicit initial centroids. Assignment ties go to the
// lowest centroid index. An empty cluster is reseeded at the point farthest
// from its assigned centroid. Records WCSS after every assignment pass.
ClusterAssignment kmeans(const PointSet& ps, const std::vector<std::array<double, 2>>& init,
                         int max_iterations);

// k initial positions on the unit circle at angles pi/4 + 2*pi*i/k; for k = 4
// these are the ideal QPSK corners of an RMS-1 constellation.
std::vector<std::array<double, 2>> ideal_corner_init(int k);

// Two-stage equalizer: conventional DBSCAN, then K-means over its noise
// points (initialized at the DBSCAN centroids when the stage found exactly k
// clusters, at ideal corners otherwise). Every K-means noise group is merged
// into the DBSCAN cluster whose centroid lies nearest to the group centroid.
// With zero DBSCAN clusters the whole set degrades to plain K-means and the
// result is flagged (kmeans_fallback).
ClusterAssignment modified_dbscan(const PointSet& ps, double eps, int min_points, int k,
                                  int max_iterations);

// Plain K-means equalizer entry point (ideal-corner init).
ClusterAssignment kmeans_cluster(const PointSet& ps, int k, int max_iterations);

struct FcmResult {
  ClusterAssignment assignment;      // hard labels = argmax membership
  std::vector<double> memberships;   // row-major [point][cluster]
};

// Fuzzy C-means with fuzzifier m, stopping when the largest membership change
// drops below tol. A point coincident with a centroid gets full membership
// there (split evenly if several centroids coincide).
FcmResult fuzzy_cmeans(const PointSet& ps, int c, double fuzzifier, double tol,
                       int max_iterations);

// Agglomerative clustering cut at k clusters. Merge ties are broken toward
// the lexicographically lowest active pair, making the dendrogram
// deterministic.
ClusterAssignment hierarchical_cluster(const PointSet& ps, int k, Linkage linkage);

// Cluster decisions back in constellation units: clustered points snap to
// their de-normalized centroid; noise points pass through unchanged.
struct DecisionSet {
  std::vector<cdouble> decided;   // per point, original (unnormalized) units
  std::vector<int> labels;        // copied from the assignment
  int cluster_count_report = 0;   // density-stage count (0 on K-means fallback)
};
DecisionSet clusters_to_decisions(const ClusterAssignment& a, const PointSet& ps);

}  // namespace cofdm
