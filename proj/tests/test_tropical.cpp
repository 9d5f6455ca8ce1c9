#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "tropnnc/bounds.hpp"
#include "tropnnc/rng.hpp"
#include "tropnnc/tropical.hpp"

using namespace tropnnc;

namespace {

TropPolynomial random_poly(Rng& rng, std::size_t d, std::size_t n) {
    TropPolynomial p;
    for (std::size_t i = 0; i < n; ++i)
        p.terms.push_back({rng.gaussian_vector(d), rng.gaussian()});
    return p;
}

// f(x,y) = max{0, -y+1, y+1}, g(x,y) = max{x+1, -x+1}
TropPolynomial example_f() {
    TropPolynomial f;
    f.terms = {{{0.0, 0.0}, 0.0}, {{0.0, -1.0}, 1.0}, {{0.0, 1.0}, 1.0}};
    return f;
}
TropPolynomial example_g() {
    TropPolynomial g;
    g.terms = {{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 1.0}};
    return g;
}

bool has_term(const TropPolynomial& p, const Vec& slope, double bias) {
    for (const auto& t : p.terms)
        if (dist2(t.slope, slope) < 1e-12 && std::fabs(t.bias - bias) < 1e-12) return true;
    return false;
}

} // namespace

TEST_CASE("eval_trop: single-variable worked values") {
    TropPolynomial f; // max{x, 1}
    f.terms = {{{1.0}, 0.0}, {{0.0}, 1.0}};
    CHECK(eval_trop(f, {0.0}) == doctest::Approx(1.0));
    CHECK(eval_trop(f, {3.0}) == doctest::Approx(3.0));

    TropPolynomial g; // max{x, y, 1}
    g.terms = {{{1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}, {{0.0, 0.0}, 1.0}};
    CHECK(eval_trop(g, {0.5, 0.2}) == doctest::Approx(1.0));

    TropPolynomial affine;
    affine.terms = {{{2.0, -1.0}, 0.5}};
    CHECK(eval_trop(affine, {1.0, 1.0}) == doctest::Approx(1.5));
}

TEST_CASE("trop_max / trop_add: worked term lists") {
    const TropPolynomial fg = trop_max(example_f(), example_g());
    REQUIRE(fg.terms.size() == 5);
    CHECK(has_term(fg, {0.0, 0.0}, 0.0));
    CHECK(has_term(fg, {1.0, 0.0}, 1.0));
    CHECK(has_term(fg, {0.0, 1.0}, 1.0));
    CHECK(has_term(fg, {0.0, -1.0}, 1.0));
    CHECK(has_term(fg, {-1.0, 0.0}, 1.0));

    const TropPolynomial sum = trop_add(example_f(), example_g());
    REQUIRE(sum.terms.size() == 6);
    CHECK(has_term(sum, {1.0, 0.0}, 1.0));
    CHECK(has_term(sum, {-1.0, 0.0}, 1.0));
    CHECK(has_term(sum, {1.0, -1.0}, 2.0));
    CHECK(has_term(sum, {-1.0, -1.0}, 2.0));
    CHECK(has_term(sum, {1.0, 1.0}, 2.0));
    CHECK(has_term(sum, {-1.0, 1.0}, 2.0));
}

TEST_CASE("trop_add with the zero-constant polynomial is the identity") {
    Rng rng(3);
    const TropPolynomial p = random_poly(rng, 3, 5);
    const TropPolynomial r = trop_add(p, TropPolynomial::constant(3, 0.0));
    for (int s = 0; s < 100; ++s) {
        const Vec x = rng.gaussian_vector(3);
        CHECK(eval_trop(r, x) == doctest::Approx(eval_trop(p, x)).epsilon(1e-12));
    }
}

TEST_CASE("eval identities for trop_max and trop_add at random points") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + rng.uniform_index(3);
        const TropPolynomial f = random_poly(rng, d, 1 + rng.uniform_index(6));
        const TropPolynomial g = random_poly(rng, d, 1 + rng.uniform_index(6));
        const TropPolynomial fmax = trop_max(f, g);
        const TropPolynomial fadd = trop_add(f, g);
        for (int s = 0; s < 50; ++s) {
            const Vec x = rng.gaussian_vector(d);
            const double vf = eval_trop(f, x), vg = eval_trop(g, x);
            CHECK(std::fabs(eval_trop(fmax, x) - std::max(vf, vg)) <= 1e-12);
            CHECK(std::fabs(eval_trop(fadd, x) - (vf + vg)) <= 1e-12);
        }
    }
}

TEST_CASE("enewt: relu pair, constant, and the worked 5-point hull") {
    const TropPolynomial relu = TropPolynomial::scaled_relu({2.0, -1.0}, 0.5, 1.0);
    const PointPolytope pp = enewt(relu);
    REQUIRE(pp.points.size() == 2);
    CHECK(dist2(pp.points[0], {2.0, -1.0, 0.5}) < 1e-15);
    CHECK(dist2(pp.points[1], {0.0, 0.0, 0.0}) < 1e-15);

    const PointPolytope cp = enewt(TropPolynomial::constant(3, 2.5));
    REQUIRE(cp.points.size() == 1);
    CHECK(dist2(cp.points[0], {0.0, 0.0, 0.0, 2.5}) < 1e-15);

    CHECK(enewt(trop_max(example_f(), example_g())).points.size() == 5);
}

TEST_CASE("minkowski_sum: identity element and axis segments") {
    PointPolytope p;
    p.points = {{0.0, 0.0}, {1.0, 0.0}};
    PointPolytope zero;
    zero.points = {{0.0, 0.0}};
    const PointPolytope same = minkowski_sum(p, zero);
    REQUIRE(same.points.size() == 2);
    CHECK(dist2(same.points[0], p.points[0]) < 1e-15);

    PointPolytope q;
    q.points = {{0.0, 0.0}, {0.0, 1.0}};
    const PointPolytope square = minkowski_sum(p, q);
    REQUIRE(square.points.size() == 4);
    CHECK(dist2(square.points[3], {1.0, 1.0}) < 1e-15);
}

TEST_CASE("prop 1 geometry: ENewt(f+g) = ENewt(f) + ENewt(g) via support functions") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 1 + rng.uniform_index(2);
        const TropPolynomial f = random_poly(rng, d, 1 + rng.uniform_index(4));
        const TropPolynomial g = random_poly(rng, d, 1 + rng.uniform_index(4));
        const PointPolytope lhs = enewt(trop_add(f, g));
        const PointPolytope rhs = minkowski_sum(enewt(f), enewt(g));
        for (int s = 0; s < 100; ++s) {
            const Vec dir = rng.gaussian_vector(d + 1);
            double sl = -1e300, sr = -1e300;
            for (const auto& pt : lhs.points) sl = std::max(sl, dot(dir, pt));
            for (const auto& pt : rhs.points) sr = std::max(sr, dot(dir, pt));
            CHECK(std::fabs(sl - sr) <= 1e-10);
        }
    }
}

TEST_CASE("zonotope_points: empty, worked pair, and the cap") {
    Zonotope none{{1.0, 2.0}, {}};
    const auto only = zonotope_points(none);
    REQUIRE(only.size() == 1);
    CHECK(dist2(only[0], {1.0, 2.0}) < 1e-15);

    Zonotope z{{0.0, 0.0}, {{1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}};
    const auto pts = zonotope_points(z);
    REQUIRE(pts.size() == 4);
    CHECK(dist2(pts[0], {0.0, 0.0}) < 1e-15);
    CHECK(dist2(pts[1], {1.0, 0.0}) < 1e-15);
    CHECK(dist2(pts[2], {0.5, std::sqrt(3.0) / 2.0}) < 1e-15);
    CHECK(dist2(pts[3], {1.5, std::sqrt(3.0) / 2.0}) < 1e-15);

    Zonotope big{Vec(2, 0.0), std::vector<Vec>(25, Vec{1.0, 0.0})};
    CHECK_THROWS_AS(zonotope_points(big), ShapeError);
}

TEST_CASE("zonotope_vertex_count formula values") {
    CHECK(zonotope_vertex_count(2, 2) == 4);
    CHECK(zonotope_vertex_count(3, 2) == 6); // hexagon
    CHECK(zonotope_vertex_count(6, 3) == 32);
    CHECK(zonotope_vertex_count(1, 4) == 2);
    CHECK(zonotope_vertex_count(8, 1) == 2);
}

TEST_CASE("is_on_or_below_upper: defining points are never above") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        PointPolytope p;
        for (int i = 0; i < 6; ++i) p.points.push_back(rng.gaussian_vector(3));
        for (const auto& pt : p.points)
            CHECK(is_on_or_below_upper(pt, p) != EnvelopePosition::Above);
    }
}

TEST_CASE("is_on_or_below_upper: worked constant term is strictly below") {
    const PointPolytope p = enewt(trop_max(example_f(), example_g()));
    CHECK(is_on_or_below_upper({0.0, 0.0, 0.0}, p) == EnvelopePosition::StrictlyBelow);
    // points above the envelope
    CHECK(is_on_or_below_upper({0.0, 0.0, 5.0}, p) == EnvelopePosition::Above);
    // outside the shadow of the polytope entirely
    CHECK(is_on_or_below_upper({10.0, 0.0, 0.0}, p) == EnvelopePosition::Above);
}

TEST_CASE("is_on_or_below_upper: interior point minus a large offset is strictly below") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        PointPolytope p;
        for (int i = 0; i < 8; ++i) p.points.push_back(rng.gaussian_vector(3));
        Vec interior(3, 0.0);
        for (const auto& pt : p.points) add_scaled(interior, pt, 1.0 / 8.0);
        interior[2] -= 100.0;
        CHECK(is_on_or_below_upper(interior, p) == EnvelopePosition::StrictlyBelow);
    }
}

TEST_CASE("upper_envelope_terms: worked reduction keeps exactly 4 terms") {
    const TropPolynomial fg = trop_max(example_f(), example_g());
    const auto kept = upper_envelope_terms(fg);
    REQUIRE(kept.size() == 4);
    for (std::size_t idx : kept) CHECK(fg.terms[idx].bias == doctest::Approx(1.0));
}

TEST_CASE("upper_envelope_terms: affine polynomial keeps its single term") {
    TropPolynomial affine;
    affine.terms = {{{1.0, 2.0}, -0.5}};
    const auto kept = upper_envelope_terms(affine);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0] == 0);
}

TEST_CASE("reduction soundness: reduced polynomial equals the original everywhere") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 1 + rng.uniform_index(3);
        const TropPolynomial p = random_poly(rng, d, 2 + rng.uniform_index(7));
        const auto kept = upper_envelope_terms(p);
        REQUIRE(!kept.empty());
        TropPolynomial reduced;
        for (std::size_t idx : kept) reduced.terms.push_back(p.terms[idx]);
        for (int s = 0; s < 500; ++s) {
            const Vec x = scale(rng.gaussian_vector(d), 3.0);
            CHECK(std::fabs(eval_trop(reduced, x) - eval_trop(p, x)) <= 1e-10);
        }
    }
}

TEST_CASE("lemma 1: strictly-below terms are dominated at every sample") {
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 1 + rng.uniform_index(2);
        const TropPolynomial p = random_poly(rng, d, 4 + rng.uniform_index(4));
        const PointPolytope lifted = enewt(p);
        for (std::size_t i = 0; i < p.terms.size(); ++i) {
            PointPolytope others;
            for (std::size_t j = 0; j < p.terms.size(); ++j)
                if (j != i) others.points.push_back(lifted.points[j]);
            if (is_on_or_below_upper(lifted.points[i], others) !=
                EnvelopePosition::StrictlyBelow)
                continue;
            TropPolynomial rest;
            for (std::size_t j = 0; j < p.terms.size(); ++j)
                if (j != i) rest.terms.push_back(p.terms[j]);
            for (int s = 0; s < 100; ++s) {
                const Vec x = rng.gaussian_vector(d);
                CHECK(dot(p.terms[i].slope, x) + p.terms[i].bias < eval_trop(rest, x) + 1e-9);
            }
        }
    }
}

TEST_CASE("trop_poly_equal: redundant terms, reduction, and perturbations") {
    const TropPolynomial fg = trop_max(example_f(), example_g());
    TropPolynomial reduced;
    for (std::size_t idx : upper_envelope_terms(fg)) reduced.terms.push_back(fg.terms[idx]);
    CHECK(trop_poly_equal(fg, reduced));

    Rng rng(23);
    const TropPolynomial p = random_poly(rng, 2, 5);
    TropPolynomial with_redundant = p;
    // a term strictly below an existing one
    with_redundant.terms.push_back({p.terms[0].slope, p.terms[0].bias - 3.0});
    CHECK(trop_poly_equal(p, with_redundant));

    TropPolynomial bumped = reduced;
    bumped.terms[0].bias += 1.0;
    CHECK_FALSE(trop_poly_equal(reduced, bumped));
}

TEST_CASE("network_polys: worked two-output example") {
    Mat a(2, 3);
    a(0, 0) = 1.0; a(0, 1) = 0.0; a(0, 2) = 0.0;
    a(1, 0) = 0.0; a(1, 1) = 1.0; a(1, 2) = 0.0;
    Mat c(2, 2);
    c(0, 0) = 3.0; c(0, 1) = 5.0;
    c(1, 0) = 4.0; c(1, 1) = 2.0;
    const auto polys = network_polys(a, c);
    REQUIRE(polys.size() == 2);
    REQUIRE(polys[0].positive_zonotope.generators.size() == 2);
    CHECK(dist2(polys[0].positive_zonotope.generators[0], {3.0, 0.0, 0.0}) < 1e-15);
    CHECK(dist2(polys[0].positive_zonotope.generators[1], {0.0, 5.0, 0.0}) < 1e-15);
    CHECK(polys[0].negative_zonotope.generators.empty());
    CHECK(dist2(polys[1].positive_zonotope.generators[0], {4.0, 0.0, 0.0}) < 1e-15);
}

TEST_CASE("network_polys: zero output row gives empty zonotopes and v == 0") {
    Mat a(3, 3);
    Rng rng(29);
    for (auto& v : a.data) v = rng.gaussian();
    Mat c(1, 3); // all zero
    const auto polys = network_polys(a, c);
    CHECK(polys[0].positive_zonotope.generators.empty());
    CHECK(polys[0].negative_zonotope.generators.empty());
    for (int s = 0; s < 20; ++s) {
        const Vec x = rng.gaussian_vector(2);
        CHECK(eval_trop(polys[0].positive, x) - eval_trop(polys[0].negative, x) ==
              doctest::Approx(0.0));
    }
}

TEST_CASE("network_polys: p_j - q_j equals the network output") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 1 + rng.uniform_index(3);
        const std::size_t n = 1 + rng.uniform_index(8);
        const std::size_t m = 1 + rng.uniform_index(3);
        Mat a(n, d + 1);
        for (auto& v : a.data) v = rng.gaussian();
        Mat c(m, n);
        for (auto& v : c.data) v = rng.gaussian();
        const auto polys = network_polys(a, c);
        for (int s = 0; s < 100; ++s) {
            const Vec x = scale(rng.gaussian_vector(d), 2.0);
            const Vec v = multi_output_value(a, c, x);
            for (std::size_t j = 0; j < m; ++j) {
                const double tropical_value =
                    eval_trop(polys[j].positive, x) - eval_trop(polys[j].negative, x);
                CHECK(std::fabs(tropical_value - v[j]) <= 1e-10);
            }
        }
    }
}
