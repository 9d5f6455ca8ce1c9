#pragma once

#include <cstdint>
#include <vector>

#include "tropnnc/linalg.hpp"

namespace tropnnc {

// Partition of item indices into K clusters.
struct Clustering {
    std::vector<int> assignment; // item index -> cluster id in [0, K)
    int k = 0;
    std::vector<Vec> centers;    // per-cluster center (means), when known
    std::vector<int> sign_class; // per-cluster +1/-1 tag (single-output algorithm)

    std::vector<std::vector<std::size_t>> groups() const {
        std::vector<std::vector<std::size_t>> g(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < assignment.size(); ++i)
            g[static_cast<std::size_t>(assignment[i])].push_back(i);
        return g;
    }
};

// Lloyd's algorithm with k-means++ seeding; deterministic given seed. Empty
// clusters are repaired by stealing the farthest point from the largest
// cluster. Ties in assignment go to the lowest center index.
Clustering kmeans(const std::vector<Vec>& vectors, std::size_t k, std::uint64_t seed);

// Agglomerative clustering, Euclidean metric, average linkage. Merging stops
// when the minimum inter-cluster linkage exceeds the threshold. Ties broken
// by the lowest index pair.
Clustering hierarchical_cluster(const std::vector<Vec>& vectors, double distance_threshold);

// Per-layer distance threshold for non-uniform compression.
// Variant 1: c * sqrt(dim of the clustering vectors).
// Variant 2: c * mean norm of the clustering vectors.
double layer_threshold(double c, int variant, const std::vector<Vec>& clustering_vectors);

// Within-cluster sum of squared distances to the centers.
double within_cluster_ss(const std::vector<Vec>& vectors, const Clustering& clustering);

} // namespace tropnnc
