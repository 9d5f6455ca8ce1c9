#include "tropnnc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tropnnc/hausdorff.hpp"
#include "tropnnc/rng.hpp"

namespace tropnnc {

std::string BoundReport::csv_header() {
    return "name,r,rho,lhs_estimate,rhs,holds,samples_used,seed,components";
}

std::string BoundReport::to_csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << name << ',' << r << ',' << rho << ',' << lhs_estimate << ',' << rhs << ','
       << (holds ? 1 : 0) << ',' << samples_used << ',' << seed << ',';
    bool first = true;
    for (const auto& [k, v] : components) {
        if (!first) os << ';';
        os << k << '=' << v;
        first = false;
    }
    return os.str();
}

namespace {

constexpr double kHoldTol = 1e-8;

Vec row_of(const Mat& a, std::size_t i) { return a.row(i); }

} // namespace

double single_output_value(const Mat& a, const Vec& c_row, const Vec& x) {
    if (c_row.size() != a.rows) throw ShapeError("single_output_value: C width mismatch");
    if (x.size() + 1 != a.cols) throw ShapeError("single_output_value: input dim mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double z = a(i, a.cols - 1);
        for (std::size_t j = 0; j + 1 < a.cols; ++j) z += a(i, j) * x[j];
        v += c_row[i] * std::max(z, 0.0);
    }
    return v;
}

Vec multi_output_value(const Mat& a, const Mat& c, const Vec& x) {
    if (c.cols != a.rows) throw ShapeError("multi_output_value: shape mismatch");
    if (x.size() + 1 != a.cols) throw ShapeError("multi_output_value: input dim mismatch");
    Vec hidden(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double z = a(i, a.cols - 1);
        for (std::size_t j = 0; j + 1 < a.cols; ++j) z += a(i, j) * x[j];
        hidden[i] = std::max(z, 0.0);
    }
    return matvec(c, hidden);
}

BoundReport check_poly_bound(const TropPolynomial& p, const TropPolynomial& p_tilde, double r,
                             std::size_t n_samples, std::uint64_t seed) {
    if (r <= 0.0) throw ShapeError("check_poly_bound: r must be positive");
    if (p.dim() != p_tilde.dim()) throw ShapeError("check_poly_bound: dimension mismatch");
    const double rho = std::sqrt(r * r + 1.0);

    BoundReport rep;
    rep.name = "prop4";
    rep.r = r;
    rep.rho = rho;
    rep.seed = seed;
    rep.samples_used = n_samples;

    Rng rng(seed);
    double sup = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const Vec x = rng.ball_point(p.dim(), r);
        sup = std::max(sup, std::fabs(eval_trop(p, x) - eval_trop(p_tilde, x)));
    }
    rep.lhs_estimate = sup / rho;
    rep.rhs = hausdorff(enewt(p), enewt(p_tilde));
    rep.components["H"] = rep.rhs;
    rep.holds = rep.lhs_estimate <= rep.rhs + kHoldTol;
    return rep;
}

BoundReport check_network_bound(const Mat& a, const Mat& c, const Mat& a_tilde,
                                const Mat& c_tilde, double r, std::size_t n_samples,
                                std::uint64_t seed) {
    if (r <= 0.0) throw ShapeError("check_network_bound: r must be positive");
    if (a.cols != a_tilde.cols) throw ShapeError("check_network_bound: input dims differ");
    if (c.rows != c_tilde.rows) throw ShapeError("check_network_bound: output dims differ");
    const std::size_t d = a.cols - 1;
    const double rho = std::sqrt(r * r + 1.0);

    BoundReport rep;
    rep.name = "thm6";
    rep.r = r;
    rep.rho = rho;
    rep.seed = seed;
    rep.samples_used = n_samples;

    Rng rng(seed);
    double sup = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const Vec x = rng.ball_point(d, r);
        const Vec v = multi_output_value(a, c, x);
        const Vec vt = multi_output_value(a_tilde, c_tilde, x);
        double l1 = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) l1 += std::fabs(v[j] - vt[j]);
        sup = std::max(sup, l1);
    }
    rep.lhs_estimate = sup / rho;

    const auto polys = network_polys(a, c);
    const auto polys_t = network_polys(a_tilde, c_tilde);
    double rhs = 0.0;
    for (std::size_t j = 0; j < polys.size(); ++j) {
        const double hp = hausdorff_zonotopes(polys[j].positive_zonotope, polys_t[j].positive_zonotope);
        const double hq = hausdorff_zonotopes(polys[j].negative_zonotope, polys_t[j].negative_zonotope);
        rep.components["H_P" + std::to_string(j)] = hp;
        rep.components["H_Q" + std::to_string(j)] = hq;
        rhs += hp + hq;
    }
    rep.rhs = rhs;
    rep.holds = rep.lhs_estimate <= rep.rhs + kHoldTol;
    return rep;
}

ClusterBoundData cluster_bound_data(const Mat& a, const Vec& c_row, const Clustering& clustering) {
    ClusterBoundData data;
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (c_row[i] == 0.0) continue;
        data.generators.push_back(scale(row_of(a, i), std::fabs(c_row[i])));
        data.generator_rows.push_back(i);
    }
    if (clustering.assignment.size() != data.generators.size())
        throw ShapeError("cluster_bound_data: clustering size must match generator count");

    const auto groups = clustering.groups();
    for (const auto& g : groups)
        if (g.empty()) throw ShapeError("cluster_bound_data: empty cluster");

    data.acute_ok = true;
    for (const auto& g : groups) {
        data.n_max = std::max(data.n_max, g.size());
        Vec center(data.generators.front().size(), 0.0);
        for (std::size_t i : g) add_scaled(center, data.generators[i], 1.0 / double(g.size()));
        for (std::size_t i : g) {
            data.delta_max = std::max(data.delta_max, dist2(data.generators[i], center));
            for (std::size_t j : g)
                if (i < j && dot(data.generators[i], data.generators[j]) < -1e-9)
                    data.acute_ok = false;
        }
    }
    return data;
}

double prop5_rhs(const Mat& a, const Vec& c_row, const Clustering& clustering) {
    const ClusterBoundData data = cluster_bound_data(a, c_row, clustering);
    double rhs = 0.0;
    for (const auto& g : data.generators) rhs += std::min(norm2(g), data.delta_max);
    return rhs;
}

double misiakos_rhs(const Mat& a, const Vec& c_row, const Clustering& clustering) {
    const ClusterBoundData data = cluster_bound_data(a, c_row, clustering);
    double norm_sum = 0.0;
    for (const auto& g : data.generators) norm_sum += norm2(g);
    return double(clustering.k) * data.delta_max +
           (1.0 - 1.0 / double(data.n_max)) * norm_sum;
}

BoundReport prop8_rhs(const Mat& a, const Mat& c, const Clustering& clustering,
                      const Mat& a_tilde, const Mat& c_tilde) {
    const std::size_t n = a.rows;
    const std::size_t m = c.rows;
    const std::size_t kk = static_cast<std::size_t>(clustering.k);
    if (clustering.assignment.size() != n)
        throw ShapeError("prop8_rhs: clustering must cover the rows of A");
    if (c_tilde.rows != m || c_tilde.cols != kk || a_tilde.rows != kk)
        throw ShapeError("prop8_rhs: compressed shapes inconsistent with clustering");

    BoundReport rep;
    rep.name = "prop8";
    rep.rho = 1.0;

    std::vector<std::vector<std::size_t>> members(kk);
    for (std::size_t i = 0; i < n; ++i)
        if (clustering.assignment[i] >= 0)
            members[static_cast<std::size_t>(clustering.assignment[i])].push_back(i);

    // non-null index sets I_jk and the per-cluster criterion of the
    // sign-fixed variant
    std::vector<std::vector<std::vector<std::size_t>>> i_jk(
        m, std::vector<std::vector<std::size_t>>(kk));
    std::size_t n_min = std::numeric_limits<std::size_t>::max();
    bool any_signed = false;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < kk; ++k) {
            const double cjk = c_tilde(j, k);
            if (cjk == 0.0) continue;
            any_signed = true;
            for (std::size_t i : members[k])
                if (c(j, i) * cjk > 0.0) i_jk[j][k].push_back(i);
            n_min = std::min(n_min, i_jk[j][k].size());
        }
    }
    const bool vacuous = !any_signed || n_min == 0;
    rep.components["N_min"] = vacuous ? 0.0 : double(n_min);
    rep.components["vacuous"] = vacuous ? 1.0 : 0.0;
    if (vacuous) {
        rep.rhs = std::numeric_limits<double>::infinity();
        rep.holds = true;
        return rep;
    }

    std::vector<double> l_k(kk, 0.0); // sqrt of the per-cluster criterion
    for (std::size_t k = 0; k < kk; ++k) {
        double crit = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            Vec resid = scale(row_of(a_tilde, k), std::fabs(c_tilde(j, k)));
            for (std::size_t i : i_jk[j][k]) add_scaled(resid, row_of(a, i), -std::fabs(c(j, i)));
            crit += dot(resid, resid);
        }
        l_k[k] = std::sqrt(crit);
        rep.components["l_" + std::to_string(k)] = l_k[k];
    }

    // per-output non-null cluster means for the epsilon deviations
    std::vector<std::vector<Vec>> mean_jk(m, std::vector<Vec>(kk, Vec(a.cols, 0.0)));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < kk; ++k)
            if (!i_jk[j][k].empty()) {
                Vec& mu = mean_jk[j][k];
                for (std::size_t i : i_jk[j][k])
                    add_scaled(mu, row_of(a, i), c(j, i) / double(i_jk[j][k].size()));
            }

    double min_sum = 0.0;
    double null_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int ki = clustering.assignment[i];
        if (ki < 0) continue;
        const std::size_t k = static_cast<std::size_t>(ki);
        const Vec ri = row_of(a, i);
        const double ri_norm = norm2(ri);
        double c_col_sq = 0.0;
        double eps_fro_sq = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            c_col_sq += c(j, i) * c(j, i);
            const Vec eps = sub(scale(ri, c(j, i)), mean_jk[j][k]);
            eps_fro_sq += dot(eps, eps);
            if (c(j, i) * c_tilde(j, k) <= 0.0) null_sum += std::fabs(c(j, i)) * ri_norm;
        }
        min_sum += std::min(std::sqrt(c_col_sq) * ri_norm,
                            l_k[k] / double(n_min) + std::sqrt(eps_fro_sq));
    }
    rep.components["min_sum"] = min_sum;
    rep.components["null_sum"] = null_sum;
    rep.rhs = std::sqrt(double(m)) * min_sum + null_sum;
    rep.holds = true;
    return rep;
}

} // namespace tropnnc
