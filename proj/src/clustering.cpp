#include "tropnnc/clustering.hpp"

#include <algorithm>
#include <limits>

#include "tropnnc/rng.hpp"

namespace tropnnc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vec> recompute_centers(const std::vector<Vec>& vectors,
                                   const std::vector<int>& assignment, std::size_t k) {
    const std::size_t d = vectors.front().size();
    std::vector<Vec> centers(k, Vec(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        add_scaled(centers[static_cast<std::size_t>(assignment[i])], vectors[i], 1.0);
        ++counts[static_cast<std::size_t>(assignment[i])];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] > 0)
            for (auto& v : centers[c]) v /= static_cast<double>(counts[c]);
    return centers;
}

void assign_nearest(const std::vector<Vec>& vectors, const std::vector<Vec>& centers,
                    std::vector<int>& assignment) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        double best = kInf;
        int best_c = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const double d = dist2(vectors[i], centers[c]);
            if (d < best - 1e-15) { // strict improvement; ties keep lowest index
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        assignment[i] = best_c;
    }
}

// move the farthest member of the largest cluster into each empty cluster
void repair_empty(const std::vector<Vec>& vectors, std::vector<int>& assignment,
                  std::vector<Vec>& centers) {
    const std::size_t k = centers.size();
    while (true) {
        std::vector<std::size_t> counts(k, 0);
        for (int a : assignment) ++counts[static_cast<std::size_t>(a)];
        std::size_t empty = k;
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] == 0) {
                empty = c;
                break;
            }
        if (empty == k) return;
        std::size_t largest = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (counts[c] > counts[largest]) largest = c;
        double far_d = -1.0;
        std::size_t far_i = 0;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (static_cast<std::size_t>(assignment[i]) != largest) continue;
            const double d = dist2(vectors[i], centers[largest]);
            if (d > far_d) {
                far_d = d;
                far_i = i;
            }
        }
        assignment[far_i] = static_cast<int>(empty);
        centers = recompute_centers(vectors, assignment, k);
    }
}

} // namespace

Clustering kmeans(const std::vector<Vec>& vectors, std::size_t k, std::uint64_t seed) {
    const std::size_t n = vectors.size();
    if (n == 0) throw ShapeError("kmeans: empty input");
    if (k == 0 || k > n) throw ShapeError("kmeans: K must be in [1, n]");

    Rng rng(seed);
    // k-means++ seeding
    std::vector<Vec> centers;
    centers.reserve(k);
    std::vector<bool> chosen(n, false);
    {
        const std::size_t first = rng.uniform_index(n);
        centers.push_back(vectors[first]);
        chosen[first] = true;
    }
    std::vector<double> d2(n, 0.0);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = kInf;
            for (const auto& c : centers) best = std::min(best, dist2(vectors[i], c));
            d2[i] = chosen[i] ? 0.0 : best * best;
            total += d2[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r && !chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == n) { // all mass on chosen points (duplicates); take first free
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
        }
        chosen[pick] = true;
        centers.push_back(vectors[pick]);
    }

    std::vector<int> assignment(n, 0);
    assign_nearest(vectors, centers, assignment);
    centers = recompute_centers(vectors, assignment, k);
    repair_empty(vectors, assignment, centers);

    for (int iter = 0; iter < 200; ++iter) {
        std::vector<int> next = assignment;
        assign_nearest(vectors, centers, next);
        if (next == assignment) break;
        assignment = next;
        centers = recompute_centers(vectors, assignment, k);
        repair_empty(vectors, assignment, centers);
    }

    // canonical ids: clusters numbered by first appearance in item order
    std::vector<int> remap(k, -1);
    int next_id = 0;
    for (int& a : assignment) {
        if (remap[static_cast<std::size_t>(a)] < 0) remap[static_cast<std::size_t>(a)] = next_id++;
        a = remap[static_cast<std::size_t>(a)];
    }

    Clustering result;
    result.assignment = assignment;
    result.k = static_cast<int>(k);
    result.centers = recompute_centers(vectors, assignment, k);
    return result;
}

Clustering hierarchical_cluster(const std::vector<Vec>& vectors, double distance_threshold) {
    const std::size_t n = vectors.size();
    if (n == 0) throw ShapeError("hierarchical_cluster: empty input");

    // average-linkage distances maintained with the Lance-Williams update
    std::vector<std::vector<double>> link(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) link[i][j] = link[j][i] = dist2(vectors[i], vectors[j]);

    std::vector<std::size_t> size(n, 1);
    std::vector<bool> alive(n, true);
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = static_cast<int>(i);

    std::size_t remaining = n;
    while (remaining > 1) {
        double best = kInf;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!alive[j]) continue;
                if (link[i][j] < best - 1e-15) {
                    best = link[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best > distance_threshold) break;
        // merge bj into bi
        const double wi = static_cast<double>(size[bi]);
        const double wj = static_cast<double>(size[bj]);
        for (std::size_t t = 0; t < n; ++t) {
            if (!alive[t] || t == bi || t == bj) continue;
            link[bi][t] = link[t][bi] = (wi * link[bi][t] + wj * link[bj][t]) / (wi + wj);
        }
        size[bi] += size[bj];
        alive[bj] = false;
        for (std::size_t t = 0; t < n; ++t)
            if (label[t] == static_cast<int>(bj)) label[t] = static_cast<int>(bi);
        --remaining;
    }

    // compact labels to [0, K)
    std::vector<int> remap(n, -1);
    int k = 0;
    Clustering result;
    result.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int root = label[i];
        if (remap[static_cast<std::size_t>(root)] < 0) remap[static_cast<std::size_t>(root)] = k++;
        result.assignment[i] = remap[static_cast<std::size_t>(root)];
    }
    result.k = k;
    result.centers = recompute_centers(vectors, result.assignment, static_cast<std::size_t>(k));
    return result;
}

double layer_threshold(double c, int variant, const std::vector<Vec>& clustering_vectors) {
    if (c <= 0.0) throw ShapeError("layer_threshold: constant must be positive");
    if (clustering_vectors.empty()) throw ShapeError("layer_threshold: empty vectors");
    if (variant == 1)
        return c * std::sqrt(static_cast<double>(clustering_vectors.front().size()));
    if (variant == 2) {
        double mean = 0.0;
        for (const auto& v : clustering_vectors) mean += norm2(v);
        return c * mean / static_cast<double>(clustering_vectors.size());
    }
    throw ShapeError("layer_threshold: variant must be 1 or 2");
}

double within_cluster_ss(const std::vector<Vec>& vectors, const Clustering& clustering) {
    double ss = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const double d = dist2(vectors[i], clustering.centers[static_cast<std::size_t>(
                                               clustering.assignment[i])]);
        ss += d * d;
    }
    return ss;
}

} // namespace tropnnc
