// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pnembed/matrix.hpp"

namespace pnembed {

// 1 - cos(u, v), in [0, 2]. Throws DegenerateVector on a zero vector.
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Symmetric n x n cosine-distance matrix with zero diagonal. The parallel
// version shards rows across OpenMP threads and returns bit-identical
// results; the serial version is the reference kept for testing.
Matrix pairwise_distances(const Matrix& x);
Matrix pairwise_distances_serial(const Matrix& x);

// HDBSCAN labels over cosine distance: core distances (distance to the
// min_samples-th nearest other point), mutual reachability, a canonical
// minimum spanning tree (edge ties broken by (min index, max index)), the
// single-linkage hierarchy, condensation at min_cluster_size, and stability
// (excess-of-mass) cluster selection. The root cluster is never selected;
// points outside every selected cluster get label -1. Cluster ids are
// assigned 0..C-1 ordered by each cluster's smallest point index.
//
// min_samples <= 0 defaults it to min_cluster_size; values above n-1 are
// clamped. Throws TooFewPoints when n < min_cluster_size and
// DegenerateVector on zero rows.
std::vector<int> hdbscan_labels(const Matrix& x, int min_cluster_size, int min_samples = 0);

// Per-point silhouette under cosine distance. Noise points (-1) are
// excluded (nullopt); singleton clusters score 0; zero denominators score 0.
// Throws UndefinedSilhouette with fewer than 2 non-noise clusters.
struct SilhouetteResult {
    std::vector<std::optional<double>> per_point;
    double mean = 0.0;
};
SilhouetteResult silhouette(const Matrix& x, const std::vector<int>& labels);

struct ClusterResult {
    std::vector<int> labels;
    std::vector<std::optional<double>> per_point_silhouette;
    double mean_silhouette = 0.0;
    bool silhouette_defined = false;
};

// hdbscan_labels + silhouette in one call; silhouette_defined is false when
// fewer than two clusters were found (mean left at 0).
ClusterResult cluster_embeddings(const Matrix& x, int min_cluster_size, int min_samples = 0);

// CSV export "model_id,label,silhouette" (silhouette empty for noise).
void write_cluster_csv(const std::vector<std::string>& ids, const ClusterResult& result,
                       const std::string& path);

}  // namespace pnembed
