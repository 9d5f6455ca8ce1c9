#include "tropnnc/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tropnnc/rng.hpp"

namespace tropnnc {

const char* method_name(CompressionMethod m) {
    switch (m) {
        case CompressionMethod::TropnncSingle: return "tropnnc-single";
        case CompressionMethod::Tropnnc: return "tropnnc";
        case CompressionMethod::TropnncIter: return "tropnnc-iter";
        case CompressionMethod::TropnncIterA6: return "tropnnc-iter-a6";
        case CompressionMethod::ZonotopeKmeans: return "zonotope-kmeans";
        case CompressionMethod::NeuralPathKmeans: return "neural-path-kmeans";
        case CompressionMethod::L1: return "l1";
        case CompressionMethod::Random: return "random";
    }
    return "?";
}

std::optional<CompressionMethod> parse_method(const std::string& name) {
    for (CompressionMethod m :
         {CompressionMethod::TropnncSingle, CompressionMethod::Tropnnc,
          CompressionMethod::TropnncIter, CompressionMethod::TropnncIterA6,
          CompressionMethod::ZonotopeKmeans, CompressionMethod::NeuralPathKmeans,
          CompressionMethod::L1, CompressionMethod::Random})
        if (name == method_name(m)) return m;
    return std::nullopt;
}

void CompressionConfig::validate_target() const {
    int forms = 0;
    if (ratio > 0.0) ++forms;
    if (explicit_k > 0) ++forms;
    if (threshold_c > 0.0) ++forms;
    if (forms != 1) throw ConfigError("exactly one of ratio / k / threshold must be set");
    if (ratio > 0.0 && ratio > 1.0) throw ConfigError("ratio must be in (0, 1]");
    if (threshold_c > 0.0 && threshold_variant != 1 && threshold_variant != 2)
        throw ConfigError("threshold variant must be 1 or 2");
}

std::size_t ratio_to_k(double ratio, std::size_t n) {
    if (ratio <= 0.0 || ratio > 1.0) throw ConfigError("ratio must be in (0, 1]");
    const auto k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
}

// --- single output --------------------------------------------------------

namespace {

struct SignSplit {
    std::vector<std::size_t> pos_rows, neg_rows;
    std::vector<Vec> pos_gens, neg_gens;
};

SignSplit split_generators(const Mat& a, const Vec& c_row) {
    if (c_row.size() != a.rows) throw ShapeError("single-output: C width must match A rows");
    SignSplit s;
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (c_row[i] == 0.0) continue;
        Vec gen = scale(a.row(i), std::fabs(c_row[i]));
        if (c_row[i] > 0.0) {
            s.pos_rows.push_back(i);
            s.pos_gens.push_back(std::move(gen));
        } else {
            s.neg_rows.push_back(i);
            s.neg_gens.push_back(std::move(gen));
        }
    }
    return s;
}

SingleOutputResult assemble_single(const Mat& a, const SignSplit& split,
                                   const Clustering& pos_cl, const Clustering& neg_cl,
                                   bool mean_representative) {
    SingleOutputResult result;
    const std::size_t cols = a.cols;
    const std::size_t k_pos = static_cast<std::size_t>(pos_cl.k);
    const std::size_t k_neg = static_cast<std::size_t>(neg_cl.k);
    result.a_tilde = Mat(k_pos + k_neg, cols);
    result.c_tilde.assign(k_pos + k_neg, 0.0);

    result.clustering.k = static_cast<int>(k_pos + k_neg);
    result.clustering.sign_class.assign(k_pos + k_neg, 0);
    for (std::size_t k = 0; k < k_pos; ++k) result.clustering.sign_class[k] = +1;
    for (std::size_t k = 0; k < k_neg; ++k) result.clustering.sign_class[k_pos + k] = -1;

    // merge the per-sign clusterings into one generator list in row order
    struct Item {
        std::size_t row;
        int cluster;
        const Vec* gen;
    };
    std::vector<Item> items;
    for (std::size_t gi = 0; gi < split.pos_rows.size(); ++gi)
        items.push_back({split.pos_rows[gi], pos_cl.assignment[gi], &split.pos_gens[gi]});
    for (std::size_t gi = 0; gi < split.neg_rows.size(); ++gi)
        items.push_back({split.neg_rows[gi], static_cast<int>(k_pos) + neg_cl.assignment[gi],
                         &split.neg_gens[gi]});
    std::sort(items.begin(), items.end(),
              [](const Item& x, const Item& y) { return x.row < y.row; });
    for (const Item& it : items) {
        result.generator_rows.push_back(it.row);
        result.generators.push_back(*it.gen);
        result.clustering.assignment.push_back(it.cluster);
    }

    std::vector<std::size_t> counts(k_pos + k_neg, 0);
    for (std::size_t t = 0; t < result.generators.size(); ++t) {
        const auto cid = static_cast<std::size_t>(result.clustering.assignment[t]);
        for (std::size_t j = 0; j < cols; ++j)
            result.a_tilde(cid, j) += result.generators[t][j];
        ++counts[cid];
    }
    for (std::size_t k = 0; k < k_pos + k_neg; ++k) {
        if (mean_representative && counts[k] > 0)
            for (std::size_t j = 0; j < cols; ++j)
                result.a_tilde(k, j) /= static_cast<double>(counts[k]);
        result.c_tilde[k] = k < k_pos ? 1.0 : -1.0;
    }
    return result;
}

SingleOutputResult run_single(const Mat& a, const Vec& c_row, std::size_t k_pos,
                              std::size_t k_neg, std::uint64_t seed, bool mean_representative) {
    const SignSplit split = split_generators(a, c_row);
    if (split.pos_gens.empty() && split.neg_gens.empty())
        throw ShapeError("single-output: all output weights are zero");
    if ((split.pos_gens.empty()) != (k_pos == 0) || (split.neg_gens.empty()) != (k_neg == 0))
        throw ConfigError("single-output: cluster split inconsistent with sign classes");
    Rng rng(seed);
    Clustering pos_cl, neg_cl;
    pos_cl.k = 0;
    neg_cl.k = 0;
    if (!split.pos_gens.empty()) pos_cl = kmeans(split.pos_gens, k_pos, rng.next());
    if (!split.neg_gens.empty()) neg_cl = kmeans(split.neg_gens, k_neg, rng.next());
    return assemble_single(a, split, pos_cl, neg_cl, mean_representative);
}

std::pair<std::size_t, std::size_t> proportional_split(std::size_t k, std::size_t n_pos,
                                                       std::size_t n_neg) {
    const std::size_t classes = (n_pos > 0 ? 1 : 0) + (n_neg > 0 ? 1 : 0);
    if (classes == 0) throw ShapeError("single-output: all output weights are zero");
    if (k < classes) throw ConfigError("single-output: K smaller than number of sign classes");
    if (n_neg == 0) return {std::min(k, n_pos), 0};
    if (n_pos == 0) return {0, std::min(k, n_neg)};
    std::size_t k_pos = static_cast<std::size_t>(std::llround(
        static_cast<double>(k) * static_cast<double>(n_pos) / static_cast<double>(n_pos + n_neg)));
    k_pos = std::clamp<std::size_t>(k_pos, 1, std::min(n_pos, k - 1));
    std::size_t k_neg = std::min(k - k_pos, n_neg);
    k_pos = std::min(n_pos, k - k_neg);
    return {k_pos, k_neg};
}

} // namespace

SingleOutputResult compress_single_output(const Mat& a, const Vec& c_row, std::size_t k,
                                          std::uint64_t seed) {
    const SignSplit split = split_generators(a, c_row);
    const auto [k_pos, k_neg] = proportional_split(k, split.pos_gens.size(), split.neg_gens.size());
    return run_single(a, c_row, k_pos, k_neg, seed, /*mean=*/false);
}

SingleOutputResult compress_single_output_split(const Mat& a, const Vec& c_row,
                                                std::size_t k_pos, std::size_t k_neg,
                                                std::uint64_t seed) {
    return run_single(a, c_row, k_pos, k_neg, seed, /*mean=*/false);
}

SingleOutputResult baseline_zonotope_kmeans(const Mat& a, const Vec& c_row, std::size_t k,
                                            std::uint64_t seed) {
    const SignSplit split = split_generators(a, c_row);
    const auto [k_pos, k_neg] = proportional_split(k, split.pos_gens.size(), split.neg_gens.size());
    return run_single(a, c_row, k_pos, k_neg, seed, /*mean=*/true);
}

// --- multi output ---------------------------------------------------------

namespace {

std::vector<std::size_t> nonzero_columns(const Mat& c) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < c.cols; ++i) {
        bool nz = false;
        for (std::size_t j = 0; j < c.rows; ++j)
            if (c(j, i) != 0.0) {
                nz = true;
                break;
            }
        if (nz) kept.push_back(i);
    }
    return kept;
}

// Full-row assignment from a clustering over the kept rows; dropped rows are
// re-added as singleton clusters while extra cluster slots remain.
struct FullAssignment {
    std::vector<int> assignment;
    std::size_t k = 0;
};

FullAssignment expand_assignment(const Mat& a, const std::vector<std::size_t>& kept,
                                 const Clustering& kept_clustering, std::size_t k_requested) {
    FullAssignment fa;
    fa.assignment.assign(a.rows, -1);
    for (std::size_t t = 0; t < kept.size(); ++t)
        fa.assignment[kept[t]] = kept_clustering.assignment[t];
    fa.k = static_cast<std::size_t>(kept_clustering.k);
    for (std::size_t i = 0; i < a.rows && fa.k < k_requested; ++i) {
        if (fa.assignment[i] >= 0) continue;
        fa.assignment[i] = static_cast<int>(fa.k++);
    }
    return fa;
}

MultiOutputResult assemble_multi(const Mat& a, const Mat& c, const FullAssignment& fa,
                                 bool mean_columns) {
    MultiOutputResult result;
    const std::size_t kk = fa.k;
    result.a_tilde = Mat(kk, a.cols);
    result.c_tilde = Mat(c.rows, kk);
    result.clustering.assignment = fa.assignment;
    result.clustering.k = static_cast<int>(kk);

    std::vector<std::size_t> counts(kk, 0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (fa.assignment[i] < 0) continue;
        const auto k = static_cast<std::size_t>(fa.assignment[i]);
        for (std::size_t j = 0; j < a.cols; ++j) result.a_tilde(k, j) += a(i, j);
        for (std::size_t j = 0; j < c.rows; ++j) result.c_tilde(j, k) += c(j, i);
        ++counts[k];
    }
    for (std::size_t k = 0; k < kk; ++k) {
        if (counts[k] == 0) continue;
        for (std::size_t j = 0; j < a.cols; ++j)
            result.a_tilde(k, j) /= static_cast<double>(counts[k]);
        if (mean_columns)
            for (std::size_t j = 0; j < c.rows; ++j)
                result.c_tilde(j, k) /= static_cast<double>(counts[k]);
    }
    return result;
}

FullAssignment cluster_rows(const Mat& a, const Mat& c, std::size_t k, std::uint64_t seed,
                            const Mat* cluster_a) {
    if (k == 0 || k > a.rows) throw ConfigError("multi-output: K must be in [1, n]");
    if (c.cols != a.rows) throw ShapeError("multi-output: C columns must match A rows");
    if (cluster_a != nullptr && cluster_a->rows != a.rows)
        throw ShapeError("multi-output: clustering rows must match A rows");
    const Mat& base = cluster_a != nullptr ? *cluster_a : a;
    const std::vector<std::size_t> kept = nonzero_columns(c);
    if (kept.empty()) {
        FullAssignment fa;
        fa.assignment.assign(a.rows, -1);
        fa.k = 0;
        for (std::size_t i = 0; i < a.rows && fa.k < k; ++i)
            fa.assignment[i] = static_cast<int>(fa.k++);
        return fa;
    }
    std::vector<Vec> vectors;
    vectors.reserve(kept.size());
    for (std::size_t i : kept) {
        Vec v = base.row(i);
        const Vec col = c.col(i);
        v.insert(v.end(), col.begin(), col.end());
        vectors.push_back(std::move(v));
    }
    const std::size_t k_main = std::min(k, kept.size());
    const Clustering kc = kmeans(vectors, k_main, seed);
    return expand_assignment(a, kept, kc, k);
}

double criterion_total(const Mat& a, const Mat& c, const std::vector<int>& assignment,
                       const Mat& a_tilde, const Mat& c_tilde) {
    double total = 0.0;
    const std::size_t kk = a_tilde.rows;
    for (std::size_t k = 0; k < kk; ++k) {
        for (std::size_t j = 0; j < c.rows; ++j) {
            Vec resid = scale(a_tilde.row(k), c_tilde(j, k));
            for (std::size_t i = 0; i < a.rows; ++i)
                if (assignment[i] == static_cast<int>(k))
                    add_scaled(resid, a.row(i), -c(j, i));
            total += dot(resid, resid);
        }
    }
    return total;
}

double criterion_total_signfixed(const Mat& a, const Mat& c, const std::vector<int>& assignment,
                                 const std::vector<std::vector<Vec>>& s_abs,
                                 const Mat& a_tilde, const Mat& c_tilde) {
    double total = 0.0;
    for (std::size_t k = 0; k < a_tilde.rows; ++k)
        for (std::size_t j = 0; j < c.rows; ++j) {
            Vec resid = scale(a_tilde.row(k), std::fabs(c_tilde(j, k)));
            add_scaled(resid, s_abs[j][k], -1.0);
            total += dot(resid, resid);
        }
    (void)a;
    (void)assignment;
    return total;
}

MultiOutputResult iterate_multi(const Mat& a, const Mat& c, const FullAssignment& fa,
                                std::size_t num_iter, bool a6_variant) {
    MultiOutputResult result = assemble_multi(a, c, fa, /*mean_columns=*/false);
    const std::size_t kk = fa.k;
    const std::size_t m = c.rows;
    if (num_iter == 0) {
        result.criterion_trace.push_back(
            criterion_total(a, c, fa.assignment, result.a_tilde, result.c_tilde));
        return result;
    }

    // cluster sums, fixed through the iterations
    std::vector<std::vector<Vec>> s(m, std::vector<Vec>(kk, Vec(a.cols, 0.0)));
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (fa.assignment[i] < 0) continue;
        const auto k = static_cast<std::size_t>(fa.assignment[i]);
        for (std::size_t j = 0; j < m; ++j) add_scaled(s[j][k], a.row(i), c(j, i));
    }

    std::vector<int> sign(m * kk, 0);
    std::vector<std::vector<Vec>> s_abs;
    if (a6_variant) {
        // signs and non-null index sets frozen at the initial solution
        s_abs.assign(m, std::vector<Vec>(kk, Vec(a.cols, 0.0)));
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < kk; ++k) {
                const double v = result.c_tilde(j, k);
                sign[j * kk + k] = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
            }
        for (std::size_t i = 0; i < a.rows; ++i) {
            if (fa.assignment[i] < 0) continue;
            const auto k = static_cast<std::size_t>(fa.assignment[i]);
            for (std::size_t j = 0; j < m; ++j)
                if (c(j, i) * static_cast<double>(sign[j * kk + k]) > 0.0)
                    add_scaled(s_abs[j][k], a.row(i), std::fabs(c(j, i)));
        }
    }

    auto record = [&]() {
        result.criterion_trace.push_back(
            a6_variant ? criterion_total_signfixed(a, c, fa.assignment, s_abs, result.a_tilde,
                                                   result.c_tilde)
                       : criterion_total(a, c, fa.assignment, result.a_tilde, result.c_tilde));
    };
    record();

    auto output_weight_phase = [&]() {
        for (std::size_t k = 0; k < kk; ++k) {
            const Vec rep = result.a_tilde.row(k);
            const double rep_sq = dot(rep, rep);
            if (rep_sq < 1e-12) continue; // degenerate; input phase will reinitialize
            for (std::size_t j = 0; j < m; ++j) {
                if (a6_variant) {
                    const int sg = sign[j * kk + k];
                    if (sg == 0) {
                        result.c_tilde(j, k) = 0.0;
                        continue;
                    }
                    const double mag = std::max(0.0, dot(s_abs[j][k], rep) / rep_sq);
                    result.c_tilde(j, k) = static_cast<double>(sg) * mag;
                } else {
                    result.c_tilde(j, k) = dot(s[j][k], rep) / rep_sq;
                }
            }
        }
    };
    auto input_weight_phase = [&]() {
        for (std::size_t k = 0; k < kk; ++k) {
            double denom = 0.0;
            for (std::size_t j = 0; j < m; ++j) denom += result.c_tilde(j, k) * result.c_tilde(j, k);
            const Vec rep = result.a_tilde.row(k);
            if (dot(rep, rep) < 1e-12) {
                // reinitialize toward the cluster generator-sum direction
                Vec dir(a.cols, 0.0);
                for (std::size_t j = 0; j < m; ++j)
                    add_scaled(dir, a6_variant ? s_abs[j][k] : s[j][k], 1.0);
                const double nrm = norm2(dir);
                if (nrm > 0.0) result.a_tilde.set_row(k, scale(dir, 1.0 / nrm));
                continue;
            }
            if (denom < 1e-12) continue; // all output weights ~0: freeze this row
            Vec next(a.cols, 0.0);
            for (std::size_t j = 0; j < m; ++j)
                add_scaled(next, a6_variant ? s_abs[j][k] : s[j][k],
                           a6_variant ? std::fabs(result.c_tilde(j, k)) : result.c_tilde(j, k));
            result.a_tilde.set_row(k, scale(next, 1.0 / denom));
        }
    };

    for (std::size_t it = 0; it < num_iter; ++it) {
        output_weight_phase();
        record();
        input_weight_phase();
        record();
    }
    if (a6_variant) {
        // end on an output-weight half-step: the projection property of the
        // final weights is what the sign-fixed bound assumes
        output_weight_phase();
        record();
    }
    return result;
}

FullAssignment full_from_kept(const Mat& a, const Mat& c, const Clustering& kept_clustering) {
    const std::vector<std::size_t> kept = nonzero_columns(c);
    if (kept_clustering.assignment.size() != kept.size())
        throw ShapeError("clustered compression: clustering must cover the nonzero columns");
    FullAssignment fa;
    fa.assignment.assign(a.rows, -1);
    for (std::size_t t = 0; t < kept.size(); ++t)
        fa.assignment[kept[t]] = kept_clustering.assignment[t];
    fa.k = static_cast<std::size_t>(kept_clustering.k);
    return fa;
}

} // namespace

MultiOutputResult compress_multi_output(const Mat& a, const Mat& c, std::size_t k,
                                        std::uint64_t seed, const Mat* cluster_a) {
    const FullAssignment fa = cluster_rows(a, c, k, seed, cluster_a);
    MultiOutputResult result = assemble_multi(a, c, fa, /*mean_columns=*/false);
    result.criterion_trace.push_back(
        criterion_total(a, c, fa.assignment, result.a_tilde, result.c_tilde));
    return result;
}

MultiOutputResult compress_multi_output_iterative(const Mat& a, const Mat& c, std::size_t k,
                                                  std::size_t num_iter, bool a6_variant,
                                                  std::uint64_t seed, const Mat* cluster_a) {
    const FullAssignment fa = cluster_rows(a, c, k, seed, cluster_a);
    return iterate_multi(a, c, fa, num_iter, a6_variant);
}

MultiOutputResult baseline_neural_path_kmeans(const Mat& a, const Mat& c, std::size_t k,
                                              std::uint64_t seed, const Mat* cluster_a) {
    const FullAssignment fa = cluster_rows(a, c, k, seed, cluster_a);
    return assemble_multi(a, c, fa, /*mean_columns=*/true);
}

MultiOutputResult compress_multi_output_clustered(const Mat& a, const Mat& c,
                                                  const Clustering& kept_clustering,
                                                  bool mean_baseline) {
    const FullAssignment fa = full_from_kept(a, c, kept_clustering);
    return assemble_multi(a, c, fa, mean_baseline);
}

MultiOutputResult compress_multi_output_iterative_clustered(const Mat& a, const Mat& c,
                                                            const Clustering& kept_clustering,
                                                            std::size_t num_iter,
                                                            bool a6_variant) {
    const FullAssignment fa = full_from_kept(a, c, kept_clustering);
    return iterate_multi(a, c, fa, num_iter, a6_variant);
}

CriterionValue criterion_value(const Mat& a, const Mat& c, const Clustering& clustering,
                               const Mat& a_tilde, const Mat& c_tilde) {
    if (clustering.assignment.size() != a.rows)
        throw ShapeError("criterion_value: clustering must cover the rows of A");
    CriterionValue cv;
    const std::size_t kk = a_tilde.rows;
    cv.per_cluster.assign(kk, 0.0);
    for (std::size_t k = 0; k < kk; ++k) {
        for (std::size_t j = 0; j < c.rows; ++j) {
            Vec resid = scale(a_tilde.row(k), c_tilde(j, k));
            for (std::size_t i = 0; i < a.rows; ++i)
                if (clustering.assignment[i] == static_cast<int>(k))
                    add_scaled(resid, a.row(i), -c(j, i));
            cv.per_cluster[k] += dot(resid, resid);
        }
        cv.total += cv.per_cluster[k];
    }
    return cv;
}

CriterionValue criterion_value_signfixed(const Mat& a, const Mat& c,
                                         const Clustering& clustering, const Mat& a_tilde,
                                         const Mat& c_tilde) {
    if (clustering.assignment.size() != a.rows)
        throw ShapeError("criterion_value_signfixed: clustering must cover the rows of A");
    CriterionValue cv;
    const std::size_t kk = a_tilde.rows;
    cv.per_cluster.assign(kk, 0.0);
    for (std::size_t k = 0; k < kk; ++k) {
        for (std::size_t j = 0; j < c.rows; ++j) {
            Vec resid = scale(a_tilde.row(k), std::fabs(c_tilde(j, k)));
            for (std::size_t i = 0; i < a.rows; ++i)
                if (clustering.assignment[i] == static_cast<int>(k) &&
                    c(j, i) * c_tilde(j, k) > 0.0)
                    add_scaled(resid, a.row(i), -std::fabs(c(j, i)));
            cv.per_cluster[k] += dot(resid, resid);
        }
        cv.total += cv.per_cluster[k];
    }
    return cv;
}

// --- network level ----------------------------------------------------------

namespace {

bool is_parametric(const Layer& layer) {
    return std::holds_alternative<LinearLayer>(layer) ||
           std::holds_alternative<Conv2dLayer>(layer);
}

struct Plan {
    std::size_t target_idx = 0;
    std::size_t next_idx = 0;
    bool conv_pair = false;
    std::optional<std::size_t> bn_idx;
};

std::optional<Plan> plan_for(const Network& net, std::size_t target_idx) {
    if (target_idx >= net.layers.size() || !is_parametric(net.layers[target_idx]))
        return std::nullopt;
    Plan plan;
    plan.target_idx = target_idx;
    std::size_t j = target_idx + 1;
    if (j < net.layers.size() && std::holds_alternative<BatchNormLayer>(net.layers[j])) {
        plan.bn_idx = j;
        ++j;
    }
    bool saw_relu = false;
    while (j < net.layers.size()) {
        const Layer& layer = net.layers[j];
        if (std::holds_alternative<ReluLayer>(layer)) {
            saw_relu = true;
        } else if (std::holds_alternative<MaxPoolLayer>(layer) ||
                   std::holds_alternative<AvgPoolLayer>(layer)) {
            // allowed in between
        } else {
            break;
        }
        ++j;
    }
    if (!saw_relu || j >= net.layers.size() || !is_parametric(net.layers[j])) return std::nullopt;
    const bool target_conv = std::holds_alternative<Conv2dLayer>(net.layers[target_idx]);
    const bool next_conv = std::holds_alternative<Conv2dLayer>(net.layers[j]);
    if (target_conv != next_conv) return std::nullopt; // conv->flatten->linear not supported
    plan.next_idx = j;
    plan.conv_pair = target_conv;
    return plan;
}

std::vector<std::size_t> parametric_indices(const Network& net) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < net.layers.size(); ++i)
        if (is_parametric(net.layers[i])) idx.push_back(i);
    return idx;
}

Mat linear_to_mat(const LinearLayer& lin) {
    const std::size_t out = lin.weight.shape[0];
    const std::size_t in = lin.weight.shape[1];
    Mat m(out, in + 1);
    for (std::size_t o = 0; o < out; ++o) {
        for (std::size_t j = 0; j < in; ++j) m(o, j) = lin.weight.at2(o, j);
        m(o, in) = lin.bias.data[o];
    }
    return m;
}

Mat input_matrix(const Layer& layer) {
    if (const auto* lin = std::get_if<LinearLayer>(&layer)) return linear_to_mat(*lin);
    return flatten_conv_in(std::get<Conv2dLayer>(layer));
}

Mat output_matrix(const Layer& next_layer) {
    if (const auto* lin = std::get_if<LinearLayer>(&next_layer)) {
        const std::size_t out = lin->weight.shape[0];
        const std::size_t in = lin->weight.shape[1];
        Mat m(out, in);
        for (std::size_t o = 0; o < out; ++o)
            for (std::size_t j = 0; j < in; ++j) m(o, j) = lin->weight.at2(o, j);
        return m;
    }
    return flatten_conv_out(std::get<Conv2dLayer>(next_layer));
}

void write_back(Network& net, const Plan& plan, const Mat& a_tilde, const Mat& c_tilde) {
    if (!plan.conv_pair) {
        auto& lin = std::get<LinearLayer>(net.layers[plan.target_idx]);
        const std::size_t kk = a_tilde.rows;
        const std::size_t in = a_tilde.cols - 1;
        lin.weight = Tensor({kk, in});
        lin.bias = Tensor({kk});
        for (std::size_t k = 0; k < kk; ++k) {
            for (std::size_t j = 0; j < in; ++j) lin.weight.at2(k, j) = a_tilde(k, j);
            lin.bias.data[k] = a_tilde(k, in);
        }
        auto& next = std::get<LinearLayer>(net.layers[plan.next_idx]);
        next.weight = Tensor({c_tilde.rows, kk});
        for (std::size_t j = 0; j < c_tilde.rows; ++j)
            for (std::size_t k = 0; k < kk; ++k) next.weight.at2(j, k) = c_tilde(j, k);
    } else {
        auto& conv = std::get<Conv2dLayer>(net.layers[plan.target_idx]);
        const std::size_t in_c = conv.kernel.shape[1];
        const std::size_t kh = conv.kernel.shape[2];
        const std::size_t kw = conv.kernel.shape[3];
        Conv2dLayer replacement =
            unflatten_conv_in(a_tilde, in_c, kh, kw, conv.stride, conv.padding);
        conv.kernel = std::move(replacement.kernel);
        conv.bias = std::move(replacement.bias);
        auto& next = std::get<Conv2dLayer>(net.layers[plan.next_idx]);
        next.kernel = unflatten_conv_out(c_tilde, next.kernel.shape[0], next.kernel.shape[2],
                                         next.kernel.shape[3]);
    }
}

// select row subset (pruning baselines)
std::pair<Mat, Mat> select_rows(const Mat& a, const Mat& c, const std::vector<std::size_t>& keep) {
    Mat a2(keep.size(), a.cols);
    Mat c2(c.rows, keep.size());
    for (std::size_t t = 0; t < keep.size(); ++t) {
        for (std::size_t j = 0; j < a.cols; ++j) a2(t, j) = a(keep[t], j);
        for (std::size_t j = 0; j < c.rows; ++j) c2(j, t) = c(j, keep[t]);
    }
    return {std::move(a2), std::move(c2)};
}

std::size_t prune_keep_count(double ratio, std::size_t n) {
    if (ratio <= 0.0 || ratio > 1.0) throw ConfigError("ratio must be in (0, 1]");
    const auto removed = static_cast<std::size_t>(
        std::ceil((1.0 - ratio) * static_cast<double>(n) - 1e-12));
    return std::max<std::size_t>(1, n - std::min(removed, n - 1));
}

std::vector<Vec> method_cluster_vectors(const Mat& cluster_base, const Mat& c,
                                        CompressionMethod method) {
    std::vector<Vec> vectors;
    if (method == CompressionMethod::TropnncSingle ||
        method == CompressionMethod::ZonotopeKmeans) {
        for (std::size_t i = 0; i < cluster_base.rows; ++i)
            if (c(0, i) != 0.0) vectors.push_back(scale(cluster_base.row(i), std::fabs(c(0, i))));
    } else {
        for (std::size_t i = 0; i < cluster_base.rows; ++i) {
            bool nz = false;
            for (std::size_t j = 0; j < c.rows; ++j)
                if (c(j, i) != 0.0) nz = true;
            if (!nz) continue;
            Vec v = cluster_base.row(i);
            const Vec col = c.col(i);
            v.insert(v.end(), col.begin(), col.end());
            vectors.push_back(std::move(v));
        }
    }
    return vectors;
}

} // namespace

std::vector<std::size_t> compressible_ordinals(const Network& net) {
    std::vector<std::size_t> ordinals;
    const auto params = parametric_indices(net);
    for (std::size_t ord = 0; ord < params.size(); ++ord)
        if (plan_for(net, params[ord]).has_value()) ordinals.push_back(ord);
    return ordinals;
}

Network compress_layer(const Network& net, std::size_t layer_index,
                       const CompressionConfig& config, LayerReport* report) {
    config.validate_target();
    const auto plan_opt = plan_for(net, layer_index);
    if (!plan_opt.has_value())
        throw UnsupportedTopologyError("layer " + std::to_string(layer_index) +
                                       " is not compressible (needs ReLU then a matching "
                                       "parametric layer)");
    Plan plan = *plan_opt;

    Network work = net;
    Mat pre_fusion_a = input_matrix(work.layers[plan.target_idx]);
    if (plan.bn_idx.has_value()) {
        if (config.fuse_bn == BnFusionMode::None)
            throw UnsupportedTopologyError(
                "batchnorm after layer " + std::to_string(layer_index) +
                " must be fused before compression (use a fuse-bn mode)");
        work = fuse_batchnorm_at(work, *plan.bn_idx);
        if (plan.next_idx > *plan.bn_idx) --plan.next_idx;
        plan.bn_idx.reset();
    }

    const Mat a = input_matrix(work.layers[plan.target_idx]);
    const Mat c = output_matrix(work.layers[plan.next_idx]);
    const Mat& cluster_base = config.cluster_on_prefusion ? pre_fusion_a : a;
    const std::size_t n = a.rows;

    Mat a_tilde, c_tilde;
    std::vector<double> trace;
    double threshold_used = 0.0;

    const bool single = config.method == CompressionMethod::TropnncSingle ||
                        config.method == CompressionMethod::ZonotopeKmeans;
    if (single && c.rows != 1)
        throw UnsupportedTopologyError("single-output method on a layer with " +
                                       std::to_string(c.rows) + " outputs");

    if (config.method == CompressionMethod::L1 || config.method == CompressionMethod::Random) {
        std::size_t keep_count;
        if (config.ratio > 0.0)
            keep_count = prune_keep_count(config.ratio, n);
        else if (config.explicit_k > 0)
            keep_count = std::min<std::size_t>(static_cast<std::size_t>(config.explicit_k), n);
        else
            throw ConfigError("threshold targets are not defined for pruning baselines");
        std::vector<std::size_t> keep;
        if (config.method == CompressionMethod::L1) {
            // smallest L1 norm of the input weights (bias excluded)
            std::vector<std::pair<double, std::size_t>> scored(n);
            for (std::size_t i = 0; i < n; ++i) {
                double l1 = 0.0;
                for (std::size_t j = 0; j + 1 < a.cols; ++j) l1 += std::fabs(a(i, j));
                scored[i] = {l1, i};
            }
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& x, const auto& y) { return x.first < y.first; });
            std::vector<bool> removed(n, false);
            for (std::size_t t = 0; t < n - keep_count; ++t) removed[scored[t].second] = true;
            for (std::size_t i = 0; i < n; ++i)
                if (!removed[i]) keep.push_back(i);
        } else {
            Rng rng(config.seed);
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            keep.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep_count));
            std::sort(keep.begin(), keep.end());
        }
        auto [a2, c2] = select_rows(a, c, keep);
        a_tilde = std::move(a2);
        c_tilde = std::move(c2);
    } else if (config.threshold_c > 0.0) {
        // non-uniform mode: hierarchical clustering with a per-layer threshold
        if (single) {
            const Vec c_row = c.row(0);
            const SignSplit split = split_generators(cluster_base, c_row);
            std::vector<Vec> all = split.pos_gens;
            all.insert(all.end(), split.neg_gens.begin(), split.neg_gens.end());
            threshold_used = layer_threshold(config.threshold_c, config.threshold_variant, all);
            Clustering pos_cl, neg_cl;
            pos_cl.k = neg_cl.k = 0;
            if (!split.pos_gens.empty())
                pos_cl = hierarchical_cluster(split.pos_gens, threshold_used);
            if (!split.neg_gens.empty())
                neg_cl = hierarchical_cluster(split.neg_gens, threshold_used);
            const SingleOutputResult r = assemble_single(
                a, split_generators(a, c_row), pos_cl, neg_cl,
                config.method == CompressionMethod::ZonotopeKmeans);
            a_tilde = r.a_tilde;
            c_tilde = Mat(1, r.c_tilde.size());
            for (std::size_t k = 0; k < r.c_tilde.size(); ++k) c_tilde(0, k) = r.c_tilde[k];
        } else {
            const auto vectors = method_cluster_vectors(cluster_base, c, config.method);
            if (vectors.empty()) throw UnsupportedTopologyError("layer has no active neurons");
            threshold_used =
                layer_threshold(config.threshold_c, config.threshold_variant, vectors);
            const Clustering kc = hierarchical_cluster(vectors, threshold_used);
            MultiOutputResult r;
            if (config.method == CompressionMethod::Tropnnc)
                r = compress_multi_output_clustered(a, c, kc, /*mean_baseline=*/false);
            else if (config.method == CompressionMethod::NeuralPathKmeans)
                r = compress_multi_output_clustered(a, c, kc, /*mean_baseline=*/true);
            else
                r = compress_multi_output_iterative_clustered(
                    a, c, kc, config.num_iter,
                    config.method == CompressionMethod::TropnncIterA6);
            a_tilde = std::move(r.a_tilde);
            c_tilde = std::move(r.c_tilde);
            trace = std::move(r.criterion_trace);
        }
    } else {
        const std::size_t k = config.explicit_k > 0
                                  ? std::min<std::size_t>(static_cast<std::size_t>(config.explicit_k), n)
                                  : ratio_to_k(config.ratio, n);
        if (single) {
            const Vec c_row = c.row(0);
            // cluster on the configured base, representatives from a
            const SignSplit split_rep = split_generators(a, c_row);
            const SignSplit split_cl = split_generators(cluster_base, c_row);
            const auto [k_pos, k_neg] =
                proportional_split(k, split_cl.pos_gens.size(), split_cl.neg_gens.size());
            Rng rng(config.seed);
            Clustering pos_cl, neg_cl;
            pos_cl.k = neg_cl.k = 0;
            if (!split_cl.pos_gens.empty()) pos_cl = kmeans(split_cl.pos_gens, k_pos, rng.next());
            if (!split_cl.neg_gens.empty()) neg_cl = kmeans(split_cl.neg_gens, k_neg, rng.next());
            const SingleOutputResult r =
                assemble_single(a, split_rep, pos_cl, neg_cl,
                                config.method == CompressionMethod::ZonotopeKmeans);
            a_tilde = r.a_tilde;
            c_tilde = Mat(1, r.c_tilde.size());
            for (std::size_t t = 0; t < r.c_tilde.size(); ++t) c_tilde(0, t) = r.c_tilde[t];
        } else {
            const Mat* cl = &cluster_base == &a ? nullptr : &cluster_base;
            MultiOutputResult r;
            if (config.method == CompressionMethod::Tropnnc)
                r = compress_multi_output(a, c, k, config.seed, cl);
            else if (config.method == CompressionMethod::NeuralPathKmeans)
                r = baseline_neural_path_kmeans(a, c, k, config.seed, cl);
            else
                r = compress_multi_output_iterative(
                    a, c, k, config.num_iter,
                    config.method == CompressionMethod::TropnncIterA6, config.seed, cl);
            a_tilde = std::move(r.a_tilde);
            c_tilde = std::move(r.c_tilde);
            trace = std::move(r.criterion_trace);
        }
    }

    write_back(work, plan, a_tilde, c_tilde);
    validate(work);

    if (report != nullptr) {
        report->layer_index = plan.target_idx;
        report->kind = layer_kind_name(work.layers[plan.target_idx]);
        report->width_before = n;
        report->width_after = a_tilde.rows;
        report->threshold = threshold_used;
        report->criterion_trace = std::move(trace);
    }
    return work;
}

std::pair<Network, CompressionReport> compress_network(const Network& net,
                                                       const CompressionConfig& config) {
    config.validate_target();
    validate(net);
    CompressionReport report;
    report.params_before = count_params(net);
    report.flops_before = count_flops(net, net.input_shape);

    Network work = net;
    if (config.fuse_bn == BnFusionMode::All) work = fuse_batchnorm(work);

    // fix the set of target ordinals up front; positions may shift as
    // batchnorm layers are fused away, ordinals do not
    const auto params0 = parametric_indices(work);
    std::vector<std::size_t> targets;
    for (std::size_t ord = 0; ord < params0.size(); ++ord) {
        if (!config.layers.empty() &&
            std::find(config.layers.begin(), config.layers.end(), ord) == config.layers.end())
            continue;
        if (plan_for(work, params0[ord]).has_value()) targets.push_back(ord);
    }
    if (!config.layers.empty())
        for (std::size_t ord : config.layers) {
            if (ord >= params0.size())
                throw UnsupportedTopologyError("layer ordinal out of range: " + std::to_string(ord));
            if (!plan_for(work, params0[ord]).has_value())
                throw UnsupportedTopologyError("selected layer ordinal " + std::to_string(ord) +
                                               " is not compressible");
        }

    for (std::size_t ord : targets) {
        const auto params = parametric_indices(work);
        LayerReport lr;
        lr.parametric_ordinal = ord;
        work = compress_layer(work, params[ord], config, &lr);
        report.layers.push_back(std::move(lr));
    }

    report.params_after = count_params(work);
    report.flops_after = count_flops(work, work.input_shape);
    return {std::move(work), std::move(report)};
}

Network baseline_l1(const Network& net, double ratio) {
    CompressionConfig config;
    config.method = CompressionMethod::L1;
    config.ratio = ratio;
    return compress_network(net, config).first;
}

Network baseline_random(const Network& net, double ratio, std::uint64_t seed) {
    CompressionConfig config;
    config.method = CompressionMethod::Random;
    config.ratio = ratio;
    config.seed = seed;
    return compress_network(net, config).first;
}

std::string CompressionReport::csv_header() {
    return "layer_index,parametric_ordinal,kind,width_before,width_after,threshold,"
           "criterion_initial,criterion_final";
}

std::string CompressionReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << csv_header() << '\n';
    for (const auto& lr : layers) {
        os << lr.layer_index << ',' << lr.parametric_ordinal << ',' << lr.kind << ','
           << lr.width_before << ',' << lr.width_after << ',' << lr.threshold << ',';
        if (lr.criterion_trace.empty())
            os << ",";
        else
            os << lr.criterion_trace.front() << ',' << lr.criterion_trace.back();
        os << '\n';
    }
    os << "# params_before=" << params_before << " params_after=" << params_after
       << " flops_before=" << flops_before << " flops_after=" << flops_after << '\n';
    return os.str();
}

} // namespace tropnnc
