#include "tropnnc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tropnnc {

namespace {

// Exact minimizer of ||sum_i w_i p_i - u||^2 over the affine hull of the
// active atoms (sum w = 1, signs unconstrained). Returns false if the KKT
// system is singular or some weight leaves [0,1] by more than slack.
bool polish_active_set(const Vec& u, const std::vector<Vec>& pts,
                       const std::vector<std::size_t>& active, Vec& weights_out) {
    const std::size_t k = active.size();
    // KKT system for min ||P w - u||^2 s.t. 1'w = 1:
    //   [ P'P  1 ] [w]   [P'u]
    //   [ 1'   0 ] [mu] = [1]
    std::vector<std::vector<double>> a(k + 1, std::vector<double>(k + 1, 0.0));
    Vec b(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double g = dot(pts[active[i]], pts[active[j]]);
            a[i][j] = g;
            a[j][i] = g;
        }
        a[i][k] = 1.0;
        a[k][i] = 1.0;
        b[i] = dot(pts[active[i]], u);
    }
    b[k] = 1.0;
    if (!solve_dense(a, b)) return false;
    const double slack = 1e-9;
    for (std::size_t i = 0; i < k; ++i)
        if (b[i] < -slack || b[i] > 1.0 + slack) return false;
    weights_out.assign(k, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        weights_out[i] = std::clamp(b[i], 0.0, 1.0);
        sum += weights_out[i];
    }
    if (sum <= 0.0) return false;
    for (auto& w : weights_out) w /= sum;
    return true;
}

Vec combine(const std::vector<Vec>& pts, const std::vector<double>& w) {
    Vec x(pts.front().size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (w[i] != 0.0) add_scaled(x, pts[i], w[i]);
    return x;
}

} // namespace

Projection project_onto_hull(const Vec& u, const std::vector<Vec>& points,
                             double gap_tol, int max_iter) {
    if (points.empty()) throw ShapeError("project_onto_hull: empty point set");
    const std::size_t n = points.size();
    for (const auto& p : points)
        if (p.size() != u.size()) throw ShapeError("project_onto_hull: dimension mismatch");
    if (n == 1) return {points[0], dist2(u, points[0])};

    std::vector<double> w(n, 0.0);
    // start from the nearest defining point
    std::size_t best = 0;
    double best_d = dist2(u, points[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double d = dist2(u, points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    w[best] = 1.0;
    Vec x = points[best];

    double prev_f = 0.5 * best_d * best_d;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Vec g = sub(x, u); // gradient of 0.5||x-u||^2
        std::size_t s = 0, v = 0;
        double s_val = std::numeric_limits<double>::infinity();
        double v_val = -std::numeric_limits<double>::infinity();
        bool have_active = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double gi = dot(g, points[i]);
            if (gi < s_val) {
                s_val = gi;
                s = i;
            }
            if (w[i] > 0.0 && gi > v_val) {
                v_val = gi;
                v = i;
                have_active = true;
            }
        }
        const double gap = dot(g, x) - s_val;
        if (gap <= gap_tol) break;

        const Vec d_fw = sub(points[s], x);
        const double fw_slope = dot(g, d_fw);
        Vec d;
        double gamma_max;
        bool away = false;
        if (have_active) {
            const Vec d_aw = sub(x, points[v]);
            if (fw_slope <= dot(g, d_aw) || w[v] >= 1.0 - 1e-15) {
                d = d_fw;
                gamma_max = 1.0;
            } else {
                d = d_aw;
                gamma_max = w[v] / (1.0 - w[v]);
                away = true;
            }
        } else {
            d = d_fw;
            gamma_max = 1.0;
        }
        const double dd = dot(d, d);
        if (dd <= 0.0) break;
        const double gamma = std::clamp(-dot(g, d) / dd, 0.0, gamma_max);
        if (gamma <= 0.0) break;
        if (away) {
            for (auto& wi : w) wi *= (1.0 + gamma);
            w[v] -= gamma;
            if (w[v] < 1e-16) w[v] = 0.0;
        } else {
            for (auto& wi : w) wi *= (1.0 - gamma);
            w[s] += gamma;
        }
        x = combine(points, w);
        const double f = 0.5 * dot(sub(x, u), sub(x, u));
        if (iter > 0 && prev_f - f < 1e-30 && gap < 1e-9) break;
        prev_f = f;
    }

    // exact solve on the active set when it is small and well conditioned
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] > 1e-12) active.push_back(i);
    if (active.size() >= 2 && active.size() <= u.size() + 2) {
        Vec wa;
        if (polish_active_set(u, points, active, wa)) {
            Vec xa(u.size(), 0.0);
            for (std::size_t i = 0; i < active.size(); ++i)
                add_scaled(xa, points[active[i]], wa[i]);
            if (dist2(u, xa) <= dist2(u, x)) x = xa;
        }
    }
    return {x, dist2(u, x)};
}

Projection project_onto_zonotope(const Vec& u, const Zonotope& z, int max_sweeps) {
    const std::size_t n = z.generators.size();
    for (const auto& g : z.generators)
        if (g.size() != u.size()) throw ShapeError("project_onto_zonotope: dimension mismatch");
    if (z.start.size() != u.size()) throw ShapeError("project_onto_zonotope: dimension mismatch");
    if (n == 0) return {z.start, dist2(u, z.start)};

    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = dot(z.generators[i], z.generators[i]);

    std::vector<double> lam(n, 0.5);
    Vec x = z.start;
    for (std::size_t i = 0; i < n; ++i) add_scaled(x, z.generators[i], lam[i]);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (sq[i] <= 0.0) continue;
            // residual excluding generator i's current contribution
            const double gi = dot(z.generators[i], sub(u, x)) + lam[i] * sq[i];
            const double next = std::clamp(gi / sq[i], 0.0, 1.0);
            const double delta = next - lam[i];
            if (delta != 0.0) {
                add_scaled(x, z.generators[i], delta);
                lam[i] = next;
                max_change = std::max(max_change, std::fabs(delta));
            }
        }
        if (max_change < 1e-14) break;
    }
    // recompute from coefficients to drop accumulated drift
    x = z.start;
    for (std::size_t i = 0; i < n; ++i)
        if (lam[i] != 0.0) add_scaled(x, z.generators[i], lam[i]);
    return {x, dist2(u, x)};
}

std::vector<std::size_t> hull_vertex_indices(const std::vector<Vec>& points, double tol) {
    const std::size_t n = points.size();
    std::vector<std::size_t> result;
    if (n == 0) return result;
    if (n == 1) return {0};

    // drop near-duplicates, keeping first occurrences
    std::vector<std::size_t> unique;
    for (std::size_t i = 0; i < n; ++i) {
        bool dup = false;
        for (std::size_t j : unique) {
            if (dist2(points[i], points[j]) < 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(i);
    }
    if (unique.size() == 1) return {unique[0]};

    std::vector<Vec> rest;
    rest.reserve(unique.size() - 1);
    for (std::size_t ui = 0; ui < unique.size(); ++ui) {
        rest.clear();
        for (std::size_t uj = 0; uj < unique.size(); ++uj)
            if (uj != ui) rest.push_back(points[unique[uj]]);
        // cheap certificate first: extreme along some coordinate or the
        // direction away from the centroid
        const Vec& cand = points[unique[ui]];
        bool certified = false;
        const std::size_t d = cand.size();
        Vec centroid(d, 0.0);
        for (const auto& p : rest) add_scaled(centroid, p, 1.0 / double(rest.size()));
        std::vector<Vec> dirs;
        dirs.push_back(sub(cand, centroid));
        for (std::size_t k = 0; k < d; ++k) {
            Vec e(d, 0.0);
            e[k] = 1.0;
            dirs.push_back(e);
            e[k] = -1.0;
            dirs.push_back(e);
        }
        for (const auto& dir : dirs) {
            const double cv = dot(dir, cand);
            double other_max = -std::numeric_limits<double>::infinity();
            for (const auto& p : rest) other_max = std::max(other_max, dot(dir, p));
            if (cv > other_max + tol) {
                certified = true;
                break;
            }
        }
        if (certified || project_onto_hull(cand, rest).distance > tol)
            result.push_back(unique[ui]);
    }
    return result;
}

} // namespace tropnnc
