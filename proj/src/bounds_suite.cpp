#include "tropnnc/bounds_suite.hpp"

#include <algorithm>
#include <cmath>

#include "tropnnc/compression.hpp"
#include "tropnnc/hausdorff.hpp"
#include "tropnnc/rng.hpp"

namespace tropnnc {

const char* bounds_kind_name(BoundsKind kind) {
    switch (kind) {
        case BoundsKind::Prop4: return "prop4";
        case BoundsKind::Thm6: return "thm6";
        case BoundsKind::Prop5: return "prop5";
        case BoundsKind::Cor7: return "cor7";
        case BoundsKind::Prop8: return "prop8";
        case BoundsKind::VertexCount: return "vertexcount";
        case BoundsKind::Examples: return "examples";
    }
    return "?";
}

std::optional<BoundsKind> parse_bounds_kind(const std::string& name) {
    for (BoundsKind k : {BoundsKind::Prop4, BoundsKind::Thm6, BoundsKind::Prop5,
                         BoundsKind::Cor7, BoundsKind::Prop8, BoundsKind::VertexCount,
                         BoundsKind::Examples})
        if (name == bounds_kind_name(k)) return k;
    return std::nullopt;
}

namespace {

TropPolynomial random_poly(Rng& rng, std::size_t d, std::size_t n) {
    TropPolynomial p;
    for (std::size_t i = 0; i < n; ++i) {
        TropTerm t;
        t.slope = rng.gaussian_vector(d);
        for (auto& v : t.slope) v *= 1.5;
        t.bias = rng.gaussian();
        p.terms.push_back(std::move(t));
    }
    return p;
}

Mat random_mat(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    Mat m(rows, cols);
    for (auto& v : m.data) v = scale * rng.gaussian();
    return m;
}

// planted near-parallel clusters in lifted dimension, all pairwise acute
struct PlantedRows {
    std::vector<Vec> rows;           // in R^{d+1}
    std::vector<std::size_t> sizes;  // per planted cluster
};

PlantedRows planted_clusters(Rng& rng, std::size_t lifted_dim, std::size_t n_clusters,
                             std::size_t max_members) {
    PlantedRows out;
    for (std::size_t k = 0; k < n_clusters; ++k) {
        Vec base = rng.gaussian_vector(lifted_dim);
        const double nrm = norm2(base);
        for (auto& v : base) v /= nrm;
        const std::size_t members = 1 + rng.uniform_index(max_members);
        out.sizes.push_back(members);
        for (std::size_t t = 0; t < members; ++t) {
            Vec row = scale(base, rng.uniform(0.5, 2.0));
            for (auto& v : row) v += 0.02 * rng.gaussian();
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

bool rows_pairwise_acute(const std::vector<Vec>& rows, const std::vector<int>& assignment) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            if (assignment[i] >= 0 && assignment[i] == assignment[j] &&
                dot(rows[i], rows[j]) < -1e-9)
                return false;
    return true;
}

// Gram determinants of every min(d, n)-subset of (normalized) generators
bool general_position(const std::vector<Vec>& gens, std::size_t d) {
    const std::size_t n = gens.size();
    const std::size_t s = std::min(d, n);
    std::vector<Vec> unit(n);
    for (std::size_t i = 0; i < n; ++i) unit[i] = scale(gens[i], 1.0 / norm2(gens[i]));

    std::vector<std::size_t> idx(s);
    // iterate over all s-subsets
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    while (true) {
        std::vector<std::vector<double>> gram(s, std::vector<double>(s));
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) gram[i][j] = dot(unit[idx[i]], unit[idx[j]]);
        // determinant via elimination
        double det = 1.0;
        for (std::size_t col = 0; col < s; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < s; ++r)
                if (std::fabs(gram[r][col]) > std::fabs(gram[piv][col])) piv = r;
            if (std::fabs(gram[piv][col]) < 1e-14) {
                det = 0.0;
                break;
            }
            if (piv != col) {
                std::swap(gram[piv], gram[col]);
                det = -det;
            }
            det *= gram[col][col];
            for (std::size_t r = col + 1; r < s; ++r) {
                const double f = gram[r][col] / gram[col][col];
                for (std::size_t cc = col; cc < s; ++cc) gram[r][cc] -= f * gram[col][cc];
            }
        }
        if (std::fabs(det) < 1e-8) return false;
        // next subset
        std::size_t pos = s;
        while (pos > 0) {
            --pos;
            if (idx[pos] != pos + n - s) break;
            if (pos == 0) return true;
        }
        if (idx[pos] == pos + n - s) return true;
        ++idx[pos];
        for (std::size_t t = pos + 1; t < s; ++t) idx[t] = idx[t - 1] + 1;
    }
}

BoundReport expect_close(const std::string& name, double computed, double expected,
                         double tol = 1e-9) {
    BoundReport rep;
    rep.name = name;
    rep.lhs_estimate = computed;
    rep.rhs = expected;
    rep.holds = std::fabs(computed - expected) <= tol;
    return rep;
}

std::vector<BoundReport> run_examples() {
    std::vector<BoundReport> reports;

    // worked example: reduction of f v g to the upper-envelope terms
    {
        TropPolynomial f;
        f.terms = {{{0.0, 0.0}, 0.0}, {{0.0, -1.0}, 1.0}, {{0.0, 1.0}, 1.0}};
        TropPolynomial g;
        g.terms = {{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 1.0}};
        const TropPolynomial fg = trop_max(f, g);
        const auto kept = upper_envelope_terms(fg);
        bool exact = kept.size() == 4;
        if (exact) {
            std::vector<Vec> expected = {
                {0.0, -1.0, 1.0}, {0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0}};
            for (std::size_t idx : kept) {
                Vec pt = fg.terms[idx].slope;
                pt.push_back(fg.terms[idx].bias);
                bool found = false;
                for (const auto& e : expected)
                    if (dist2(pt, e) < 1e-12) found = true;
                exact = exact && found;
            }
        }
        BoundReport rep;
        rep.name = "example1_reduction";
        rep.lhs_estimate = static_cast<double>(kept.size());
        rep.rhs = 4.0;
        rep.holds = exact;
        reports.push_back(std::move(rep));
    }

    // two-generator zonotope vs its mean / sum single-generator reduction
    const Zonotope p{{0.0, 0.0}, {{1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}};
    const Zonotope p_mean{{0.0, 0.0}, {{0.75, std::sqrt(3.0) / 4.0}}};
    const Zonotope p_sum{{0.0, 0.0}, {{1.5, std::sqrt(3.0) / 2.0}}};
    const double root3_2 = std::sqrt(3.0) / 2.0;

    reports.push_back(expect_close("example2_H", hausdorff_zonotopes(p, p_mean), root3_2));
    reports.push_back(expect_close(
        "example2_DH", discrete_hausdorff(zonotope_points(p), zonotope_points(p_mean)), root3_2));
    reports.push_back(expect_close("example3_H", hausdorff_zonotopes(p, p_sum), 0.5));
    reports.push_back(expect_close(
        "example3_DH", discrete_hausdorff(zonotope_points(p), zonotope_points(p_sum)), 1.0));

    // two-output simultaneous approximation with one cluster
    {
        Mat a(2, 3);
        a(0, 0) = 1.0; a(0, 1) = 0.0; a(0, 2) = 0.0;
        a(1, 0) = 0.0; a(1, 1) = 1.0; a(1, 2) = 0.0;
        Mat c(2, 2);
        c(0, 0) = 3.0; c(0, 1) = 5.0;
        c(1, 0) = 4.0; c(1, 1) = 2.0;
        const MultiOutputResult r = compress_multi_output(a, c, 1, 0);
        const bool ok = r.a_tilde.rows == 1 && r.a_tilde(0, 0) == 0.5 &&
                        r.a_tilde(0, 1) == 0.5 && r.a_tilde(0, 2) == 0.0 &&
                        r.c_tilde(0, 0) == 8.0 && r.c_tilde(1, 0) == 6.0;
        BoundReport rep;
        rep.name = "example5_representative";
        rep.lhs_estimate = r.c_tilde(0, 0);
        rep.rhs = 8.0;
        rep.holds = ok;
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace

std::vector<BoundReport> run_bounds_suite(BoundsKind kind, std::size_t trials,
                                          std::uint64_t seed) {
    if (kind == BoundsKind::Examples) return run_examples();
    if (trials < 1) throw ConfigError("bounds suite: trials must be >= 1");

    std::vector<BoundReport> reports;
    Rng master(seed);

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = master.next();
        Rng rng(trial_seed);
        switch (kind) {
            case BoundsKind::Prop4: {
                const std::size_t d = 1 + rng.uniform_index(3);
                const TropPolynomial p = random_poly(rng, d, 1 + rng.uniform_index(8));
                const TropPolynomial q = random_poly(rng, d, 1 + rng.uniform_index(8));
                reports.push_back(check_poly_bound(p, q, 1.0, 10000, trial_seed));
                break;
            }
            case BoundsKind::Thm6: {
                const std::size_t d = 1 + rng.uniform_index(4);
                const std::size_t n = 2 + rng.uniform_index(9);
                const std::size_t m = 1 + rng.uniform_index(3);
                const Mat a = random_mat(rng, n, d + 1);
                const Mat c = random_mat(rng, m, n);
                Mat at, ct;
                if (trial % 2 == 0) {
                    const auto r = compress_multi_output(a, c, std::max<std::size_t>(1, n / 2),
                                                         trial_seed);
                    at = r.a_tilde;
                    ct = r.c_tilde;
                } else {
                    const std::size_t nt = 1 + rng.uniform_index(n);
                    at = random_mat(rng, nt, d + 1);
                    ct = random_mat(rng, m, nt);
                }
                reports.push_back(check_network_bound(a, c, at, ct, 1.0, 10000, trial_seed));
                break;
            }
            case BoundsKind::Prop5:
            case BoundsKind::Cor7: {
                // acute-angle single-output instance; resample until the
                // realized clusters satisfy the precondition
                for (int attempt = 0; attempt < 100; ++attempt) {
                    const std::size_t d = 1 + rng.uniform_index(3);
                    const std::size_t k_pos = 1 + rng.uniform_index(3);
                    const std::size_t k_neg = rng.uniform_index(3);
                    const PlantedRows pos = planted_clusters(rng, d + 1, k_pos, 3);
                    const PlantedRows neg =
                        k_neg > 0 ? planted_clusters(rng, d + 1, k_neg, 3) : PlantedRows{};
                    const std::size_t n = pos.rows.size() + neg.rows.size();
                    Mat a(n, d + 1);
                    Vec c_row(n);
                    for (std::size_t i = 0; i < pos.rows.size(); ++i) {
                        a.set_row(i, pos.rows[i]);
                        c_row[i] = 1.0;
                    }
                    for (std::size_t i = 0; i < neg.rows.size(); ++i) {
                        a.set_row(pos.rows.size() + i, neg.rows[i]);
                        c_row[pos.rows.size() + i] = -1.0;
                    }
                    const SingleOutputResult sr =
                        compress_single_output_split(a, c_row, k_pos, k_neg, rng.next());
                    const ClusterBoundData data = cluster_bound_data(a, c_row, sr.clustering);
                    if (!data.acute_ok) continue;

                    if (kind == BoundsKind::Cor7) {
                        BoundReport rep;
                        rep.name = "cor7";
                        rep.seed = trial_seed;
                        rep.lhs_estimate = prop5_rhs(a, c_row, sr.clustering);
                        rep.rhs = misiakos_rhs(a, c_row, sr.clustering);
                        rep.components["delta_max"] = data.delta_max;
                        rep.components["N_max"] = static_cast<double>(data.n_max);
                        rep.holds = rep.lhs_estimate <= rep.rhs + 1e-8;
                        reports.push_back(std::move(rep));
                    } else {
                        BoundReport rep;
                        rep.name = "prop5";
                        rep.r = 1.0;
                        rep.rho = std::sqrt(2.0);
                        rep.seed = trial_seed;
                        rep.samples_used = 2000;
                        Rng sampler(trial_seed);
                        double sup = 0.0;
                        for (std::size_t s = 0; s < rep.samples_used; ++s) {
                            const Vec x = sampler.ball_point(d, 1.0);
                            sup = std::max(sup,
                                           std::fabs(single_output_value(a, c_row, x) -
                                                     single_output_value(sr.a_tilde, sr.c_tilde, x)));
                        }
                        rep.lhs_estimate = sup / rep.rho;
                        rep.rhs = prop5_rhs(a, c_row, sr.clustering);
                        rep.components["delta_max"] = data.delta_max;
                        rep.holds = rep.lhs_estimate <= rep.rhs + 1e-8;
                        reports.push_back(std::move(rep));
                    }
                    break;
                }
                break;
            }
            case BoundsKind::Prop8: {
                for (int attempt = 0; attempt < 100; ++attempt) {
                    const std::size_t d = 1 + rng.uniform_index(3);
                    const std::size_t m = 1 + rng.uniform_index(3);
                    const std::size_t kc = 1 + rng.uniform_index(3);
                    const PlantedRows planted = planted_clusters(rng, d + 1, kc, 3);
                    const std::size_t n = planted.rows.size();
                    Mat a(n, d + 1);
                    for (std::size_t i = 0; i < n; ++i) a.set_row(i, planted.rows[i]);
                    // cluster-coherent output columns
                    Mat c(m, n);
                    std::size_t i0 = 0;
                    for (std::size_t k = 0; k < kc; ++k) {
                        const Vec col = rng.gaussian_vector(m);
                        for (std::size_t t = 0; t < planted.sizes[k]; ++t, ++i0)
                            for (std::size_t j = 0; j < m; ++j)
                                c(j, i0) = col[j] * rng.uniform(0.5, 1.5) + 0.05 * rng.gaussian();
                    }
                    const MultiOutputResult r =
                        compress_multi_output_iterative(a, c, kc, 5, /*a6=*/true, rng.next());
                    std::vector<Vec> rows(n);
                    for (std::size_t i = 0; i < n; ++i) rows[i] = a.row(i);
                    if (!rows_pairwise_acute(rows, r.clustering.assignment)) continue;

                    BoundReport rep = prop8_rhs(a, c, r.clustering, r.a_tilde, r.c_tilde);
                    const BoundReport net =
                        check_network_bound(a, c, r.a_tilde, r.c_tilde, 1.0, 2000, trial_seed);
                    rep.r = net.r;
                    rep.rho = net.rho;
                    rep.seed = trial_seed;
                    rep.samples_used = net.samples_used;
                    rep.lhs_estimate = net.lhs_estimate;
                    rep.holds = rep.lhs_estimate <= rep.rhs + 1e-8;
                    reports.push_back(std::move(rep));
                    break;
                }
                break;
            }
            case BoundsKind::VertexCount: {
                std::size_t d = 0, n = 0;
                std::vector<Vec> gens;
                do {
                    d = 1 + rng.uniform_index(4);
                    n = 1 + rng.uniform_index(8);
                    gens.clear();
                    for (std::size_t i = 0; i < n; ++i) gens.push_back(rng.gaussian_vector(d));
                } while (!general_position(gens, d));
                Zonotope z;
                z.start = Vec(d, 0.0);
                z.generators = gens;
                const auto pts = zonotope_points(z);
                const std::size_t observed = hull_vertex_indices(pts).size();
                BoundReport rep;
                rep.name = "vertexcount";
                rep.seed = trial_seed;
                rep.lhs_estimate = static_cast<double>(observed);
                rep.rhs = static_cast<double>(zonotope_vertex_count(n, d));
                rep.components["n"] = static_cast<double>(n);
                rep.components["d"] = static_cast<double>(d);
                rep.holds = observed == static_cast<std::size_t>(rep.rhs);
                reports.push_back(std::move(rep));
                break;
            }
            case BoundsKind::Examples:
                break;
        }
    }
    return reports;
}

} // namespace tropnnc
