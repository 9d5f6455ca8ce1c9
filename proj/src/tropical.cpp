#include "tropnnc/tropical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tropnnc {

TropPolynomial TropPolynomial::scaled_relu(const Vec& a, double b, double c) {
    if (c < 0.0) throw ShapeError("scaled_relu: scale must be nonnegative");
    TropPolynomial p;
    p.terms.push_back(TropTerm{scale(a, c), c * b});
    p.terms.push_back(TropTerm{Vec(a.size(), 0.0), 0.0});
    return p;
}

double eval_trop(const TropPolynomial& p, const Vec& x) {
    if (p.terms.empty()) throw ShapeError("eval_trop: empty polynomial");
    if (x.size() != p.dim()) throw ShapeError("eval_trop: dimension mismatch");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& t : p.terms) best = std::max(best, dot(t.slope, x) + t.bias);
    return best;
}

TropPolynomial trop_max(const TropPolynomial& f, const TropPolynomial& g) {
    if (f.dim() != g.dim()) throw ShapeError("trop_max: dimension mismatch");
    TropPolynomial r = f;
    r.terms.insert(r.terms.end(), g.terms.begin(), g.terms.end());
    return r;
}

TropPolynomial trop_add(const TropPolynomial& f, const TropPolynomial& g) {
    if (f.dim() != g.dim()) throw ShapeError("trop_add: dimension mismatch");
    TropPolynomial r;
    r.terms.reserve(f.terms.size() * g.terms.size());
    for (const auto& tf : f.terms)
        for (const auto& tg : g.terms)
            r.terms.push_back(TropTerm{add(tf.slope, tg.slope), tf.bias + tg.bias});
    return r;
}

PointPolytope enewt(const TropPolynomial& p) {
    PointPolytope poly;
    poly.points.reserve(p.terms.size());
    for (const auto& t : p.terms) {
        Vec pt = t.slope;
        pt.push_back(t.bias);
        poly.points.push_back(std::move(pt));
    }
    return poly;
}

PointPolytope minkowski_sum(const PointPolytope& p, const PointPolytope& q) {
    if (p.dim() != q.dim()) throw ShapeError("minkowski_sum: dimension mismatch");
    PointPolytope r;
    r.points.reserve(p.points.size() * q.points.size());
    for (const auto& a : p.points)
        for (const auto& b : q.points) r.points.push_back(add(a, b));
    return r;
}

std::vector<Vec> zonotope_points(const Zonotope& z, std::size_t cap) {
    const std::size_t n = z.generators.size();
    if (n > cap) throw ShapeError("zonotope_points: generator count exceeds cap");
    std::vector<Vec> pts;
    pts.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Vec p = z.start;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) add_scaled(p, z.generators[i], 1.0);
        pts.push_back(std::move(p));
    }
    return pts;
}

std::uint64_t zonotope_vertex_count(std::uint64_t n, std::uint64_t d) {
    if (n < 1 || d < 1) throw ShapeError("zonotope_vertex_count: n, d must be >= 1");
    // binomials via Pascal's triangle, exact in 64-bit at the scales used
    std::uint64_t sum = 0;
    for (std::uint64_t j = 0; j < d && j <= n - 1; ++j) {
        std::uint64_t c = 1;
        for (std::uint64_t i = 1; i <= j; ++i) c = c * (n - 1 - (i - 1)) / i;
        sum += c;
    }
    return 2 * sum;
}

namespace {

double hull_distance(const Vec& u, const std::vector<Vec>& pts) {
    return project_onto_hull(u, pts).distance;
}

} // namespace

EnvelopePosition is_on_or_below_upper(const Vec& point, const PointPolytope& p, double tol) {
    if (p.points.empty()) throw ShapeError("is_on_or_below_upper: empty polytope");
    if (point.size() != p.dim()) throw ShapeError("is_on_or_below_upper: dimension mismatch");
    const std::size_t last = point.size() - 1;
    double bmin = std::numeric_limits<double>::infinity();
    double bmax = -std::numeric_limits<double>::infinity();
    for (const auto& q : p.points) {
        bmin = std::min(bmin, q[last]);
        bmax = std::max(bmax, q[last]);
    }
    const double t_hi_bracket = 1.0 + std::max(0.0, bmax - std::min(point[last], bmin));

    auto dist_at = [&](double t) {
        Vec q = point;
        q[last] += t;
        return hull_distance(q, p.points);
    };

    // the membership set in t is an interval; locate it by minimizing the
    // convex distance profile, then push the upper end out by bisection
    double lo = 0.0, hi = t_hi_bracket;
    for (int it = 0; it < 90; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (dist_at(m1) <= dist_at(m2))
            hi = m2;
        else
            lo = m1;
    }
    const double t_min = 0.5 * (lo + hi);
    double d_feas = dist_at(t_min);
    double t_feas = t_min;
    if (dist_at(0.0) <= tol) { // prefer the t=0 membership when available
        t_feas = 0.0;
        d_feas = 0.0;
    }
    if (d_feas > tol) return EnvelopePosition::Above;

    double t_lo = t_feas, t_up = t_hi_bracket;
    if (dist_at(t_up) <= tol) {
        t_lo = t_up; // degenerate bracket; polytope spans the whole range
    } else {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (t_lo + t_up);
            if (dist_at(mid) <= tol)
                t_lo = mid;
            else
                t_up = mid;
        }
    }
    return t_lo > tol ? EnvelopePosition::StrictlyBelow : EnvelopePosition::OnEnvelope;
}

std::vector<std::size_t> upper_envelope_terms(const TropPolynomial& p, double tol) {
    const std::size_t n = p.terms.size();
    if (n == 0) return {};
    if (n == 1) return {0};
    const PointPolytope lifted = enewt(p);

    // drop exact/near duplicate terms first (keep first occurrence)
    std::vector<std::size_t> unique;
    for (std::size_t i = 0; i < n; ++i) {
        bool dup = false;
        for (std::size_t j : unique)
            if (dist2(lifted.points[i], lifted.points[j]) < 1e-12) {
                dup = true;
                break;
            }
        if (!dup) unique.push_back(i);
    }
    if (unique.size() == 1) return {unique[0]};

    std::vector<std::size_t> kept;
    std::vector<Vec> rest;
    for (std::size_t ui = 0; ui < unique.size(); ++ui) {
        rest.clear();
        for (std::size_t uj = 0; uj < unique.size(); ++uj)
            if (uj != ui) rest.push_back(lifted.points[unique[uj]]);
        PointPolytope others{rest};
        // a term survives iff its lifted point is not inside and not below
        // the upper envelope of the remaining points
        if (is_on_or_below_upper(lifted.points[unique[ui]], others, tol) ==
            EnvelopePosition::Above)
            kept.push_back(unique[ui]);
    }
    return kept;
}

bool trop_poly_equal(const TropPolynomial& p, const TropPolynomial& q, double tol) {
    if (p.dim() != q.dim()) throw ShapeError("trop_poly_equal: dimension mismatch");
    const auto pi = upper_envelope_terms(p, tol);
    const auto qi = upper_envelope_terms(q, tol);
    if (pi.size() != qi.size()) return false;
    const PointPolytope pp = enewt(p);
    const PointPolytope qq = enewt(q);
    std::vector<bool> used(qi.size(), false);
    for (std::size_t i : pi) {
        bool matched = false;
        for (std::size_t k = 0; k < qi.size(); ++k) {
            if (used[k]) continue;
            const Vec& a = pp.points[i];
            const Vec& b = qq.points[qi[k]];
            bool close = true;
            for (std::size_t c = 0; c < a.size(); ++c)
                if (std::fabs(a[c] - b[c]) > tol) {
                    close = false;
                    break;
                }
            if (close) {
                used[k] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

std::vector<OutputPolys> network_polys(const Mat& a, const Mat& c, std::size_t poly_cap) {
    if (c.cols != a.rows) throw ShapeError("network_polys: C columns must match A rows");
    const std::size_t n = a.rows;
    const std::size_t d = a.cols - 1;
    std::vector<OutputPolys> out(c.rows);
    for (std::size_t j = 0; j < c.rows; ++j) {
        OutputPolys& op = out[j];
        op.positive = TropPolynomial::constant(d, 0.0);
        op.negative = TropPolynomial::constant(d, 0.0);
        op.positive_zonotope.start = Vec(d + 1, 0.0);
        op.negative_zonotope.start = Vec(d + 1, 0.0);
        std::size_t pos_rank = 0, neg_rank = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cji = c(j, i);
            if (cji == 0.0) continue;
            Vec row = a.row(i);
            const double bias = row.back();
            row.pop_back();
            const double mag = std::fabs(cji);
            Vec gen = row;
            gen.push_back(bias);
            gen = scale(gen, mag);
            if (cji > 0.0) {
                if (++pos_rank > poly_cap)
                    throw ShapeError("network_polys: positive polynomial rank exceeds cap");
                op.positive = trop_add(op.positive, TropPolynomial::scaled_relu(row, bias, mag));
                op.positive_zonotope.generators.push_back(std::move(gen));
            } else {
                if (++neg_rank > poly_cap)
                    throw ShapeError("network_polys: negative polynomial rank exceeds cap");
                op.negative = trop_add(op.negative, TropPolynomial::scaled_relu(row, bias, mag));
                op.negative_zonotope.generators.push_back(std::move(gen));
            }
        }
    }
    return out;
}

} // namespace tropnnc
