#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropnnc/clustering.hpp"
#include "tropnnc/linalg.hpp"
#include "tropnnc/network.hpp"

namespace tropnnc {

enum class CompressionMethod {
    TropnncSingle,    // single-output, cluster-sum representatives, +-1 output weights
    Tropnnc,          // multi-output, mean input row / summed output column
    TropnncIter,      // iterative alternating refinement of the representatives
    TropnncIterA6,    // iterative variant with frozen output-weight signs
    ZonotopeKmeans,   // single-output baseline, cluster-mean representatives
    NeuralPathKmeans, // multi-output baseline, cluster-mean representatives
    L1,               // structured pruning by smallest L1 norm
    Random,           // structured pruning, uniform random
};

const char* method_name(CompressionMethod m);
std::optional<CompressionMethod> parse_method(const std::string& name);

enum class BnFusionMode { None, All, PerLayer };

struct CompressionConfig {
    CompressionMethod method = CompressionMethod::Tropnnc;
    // exactly one target form
    double ratio = -1.0;       // fraction of neurons kept, in (0, 1]
    long explicit_k = -1;      // cluster count per layer
    double threshold_c = -1.0; // non-uniform: global threshold constant
    int threshold_variant = 0; // 1: c*sqrt(dim); 2: c*mean norm
    std::size_t num_iter = 10;
    std::uint64_t seed = 0;
    bool cluster_on_prefusion = true;
    BnFusionMode fuse_bn = BnFusionMode::None;
    std::vector<std::size_t> layers; // ordinals among Linear/Conv2d layers; empty = all

    void validate_target() const;
};

// --- weight-matrix level operations -------------------------------------

struct SingleOutputResult {
    Mat a_tilde;  // K x (d+1), bias in the last column
    Vec c_tilde;  // entries +-1
    Clustering clustering; // over the nonzero-weight generators, row order
    std::vector<Vec> generators;
    std::vector<std::size_t> generator_rows;
};

// Cluster-sum representatives; K split across sign classes proportionally
// to class sizes (every nonempty class gets at least one cluster).
SingleOutputResult compress_single_output(const Mat& a, const Vec& c_row, std::size_t k,
                                          std::uint64_t seed);
// Explicit per-sign cluster counts.
SingleOutputResult compress_single_output_split(const Mat& a, const Vec& c_row,
                                                std::size_t k_pos, std::size_t k_neg,
                                                std::uint64_t seed);
// Zonotope K-means baseline: identical clustering, cluster-mean representatives.
SingleOutputResult baseline_zonotope_kmeans(const Mat& a, const Vec& c_row, std::size_t k,
                                            std::uint64_t seed);

struct MultiOutputResult {
    Mat a_tilde; // K x (d+1)
    Mat c_tilde; // m x K
    // assignment over the rows of A; -1 marks neurons dropped because their
    // output column is all zero
    Clustering clustering;
    std::vector<double> criterion_trace; // global criterion after each half-step
};

// Non-iterative multi-output compression: k-means on (a_i, b_i, C_:,i),
// representative = (mean of input rows, sum of output columns). cluster_a
// optionally supplies different rows for the clustering vectors (pre-fusion
// weights); the representatives always come from a and c.
MultiOutputResult compress_multi_output(const Mat& a, const Mat& c, std::size_t k,
                                        std::uint64_t seed, const Mat* cluster_a = nullptr);

// Iterative refinement (alternating least squares on the cluster criterion);
// num_iter = 0 reduces to the non-iterative algorithm. With a6_variant the
// output-weight signs are frozen at initialization, magnitudes are updated
// over the non-null index sets with clamping at zero, and the run ends on an
// output-weight half-step.
MultiOutputResult compress_multi_output_iterative(const Mat& a, const Mat& c, std::size_t k,
                                                  std::size_t num_iter, bool a6_variant,
                                                  std::uint64_t seed,
                                                  const Mat* cluster_a = nullptr);

// Neural Path K-means baseline: identical clustering, cluster-mean
// representatives for both the input rows and the output columns.
MultiOutputResult baseline_neural_path_kmeans(const Mat& a, const Mat& c, std::size_t k,
                                              std::uint64_t seed, const Mat* cluster_a = nullptr);

// Same algorithms driven by an externally supplied clustering (hierarchical
// non-uniform mode). The clustering covers the rows of A that have nonzero
// output columns, in row order.
MultiOutputResult compress_multi_output_clustered(const Mat& a, const Mat& c,
                                                  const Clustering& kept_clustering,
                                                  bool mean_baseline);
MultiOutputResult compress_multi_output_iterative_clustered(const Mat& a, const Mat& c,
                                                            const Clustering& kept_clustering,
                                                            std::size_t num_iter,
                                                            bool a6_variant);

struct CriterionValue {
    std::vector<double> per_cluster;
    double total = 0.0;
};

// The alternating-minimization criterion
//   sum_k sum_j || C~_jk (a~_k, b~_k) - sum_{i in I_k} C_ji (a_i, b_i) ||^2.
CriterionValue criterion_value(const Mat& a, const Mat& c, const Clustering& clustering,
                               const Mat& a_tilde, const Mat& c_tilde);

// Sign-fixed form used by the iterative variant: absolute weights over the
// non-null index sets.
CriterionValue criterion_value_signfixed(const Mat& a, const Mat& c,
                                         const Clustering& clustering, const Mat& a_tilde,
                                         const Mat& c_tilde);

// --- network level operations -------------------------------------------

Network baseline_l1(const Network& net, double ratio);
Network baseline_random(const Network& net, double ratio, std::uint64_t seed);

struct LayerReport {
    std::size_t layer_index = 0;     // position in the layer list at compression time
    std::size_t parametric_ordinal = 0;
    std::string kind;
    std::size_t width_before = 0;
    std::size_t width_after = 0;
    double threshold = 0.0;          // non-uniform mode only
    std::vector<double> criterion_trace;
};

struct CompressionReport {
    std::vector<LayerReport> layers;
    std::size_t params_before = 0;
    std::size_t params_after = 0;
    std::size_t flops_before = 0;
    std::size_t flops_after = 0;

    static std::string csv_header();
    std::string to_csv() const;
};

// Ordinals (among Linear/Conv2d layers) that the compressor can act on:
// layers followed by a ReLU (pooling allowed in between) and a next
// parametric layer of the same kind boundary.
std::vector<std::size_t> compressible_ordinals(const Network& net);

Network compress_layer(const Network& net, std::size_t layer_index,
                       const CompressionConfig& config, LayerReport* report = nullptr);

std::pair<Network, CompressionReport> compress_network(const Network& net,
                                                       const CompressionConfig& config);

// Ratio -> cluster count used by every clustering method.
std::size_t ratio_to_k(double ratio, std::size_t n);

} // namespace tropnnc
