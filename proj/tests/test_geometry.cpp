#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tropnnc/geometry.hpp"
#include "tropnnc/rng.hpp"

using namespace tropnnc;

namespace {

// brute-force projection oracle: dense grid over the simplex weights
double grid_search_distance(const Vec& u, const std::vector<Vec>& pts, int steps) {
    const std::size_t n = pts.size();
    std::vector<int> w(n, 0);
    double best = 1e300;
    // enumerate integer compositions of `steps` into n parts
    std::vector<int> comp(n, 0);
    comp[0] = steps;
    while (true) {
        Vec x(u.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            add_scaled(x, pts[i], double(comp[i]) / double(steps));
        best = std::min(best, dist2(u, x));
        // next composition
        std::size_t i = 0;
        while (i + 1 < n && comp[i] == 0) ++i;
        if (i + 1 >= n) break;
        const int v = comp[i];
        comp[i] = 0;
        comp[0] = v - 1;
        comp[i + 1] += 1;
    }
    return best;
}

} // namespace

TEST_CASE("project_onto_hull: defining point projects to itself") {
    Rng rng(3);
    std::vector<Vec> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(rng.gaussian_vector(3));
    for (const auto& p : pts) {
        const auto proj = project_onto_hull(p, pts);
        CHECK(proj.distance <= 1e-9);
    }
}

TEST_CASE("project_onto_hull: axis segment") {
    const std::vector<Vec> seg = {{0.0, 0.0}, {1.0, 0.0}};
    const auto proj = project_onto_hull({0.5, 1.0}, seg);
    CHECK(proj.distance == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(proj.point[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(proj.point[1] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("project_onto_hull: matches the simplex grid-search oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = 2 + rng.uniform_index(2); // 2..3
        const std::size_t n = 2 + rng.uniform_index(5); // 2..6
        std::vector<Vec> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(rng.gaussian_vector(d));
        const Vec u = rng.gaussian_vector(d);
        const double exact = project_onto_hull(u, pts).distance;
        const double coarse = grid_search_distance(u, pts, 60);
        // the grid is feasible, so it can only overestimate the distance
        CHECK(exact <= coarse + 1e-9);
        CHECK(coarse - exact <= 1e-2); // grid resolution slack
    }
}

TEST_CASE("project_onto_hull: interior point has zero distance") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec> pts;
        for (int i = 0; i < 6; ++i) pts.push_back(rng.gaussian_vector(2));
        // random convex combination is inside
        Vec w(6);
        double s = 0.0;
        for (auto& v : w) {
            v = rng.uniform();
            s += v;
        }
        Vec u(2, 0.0);
        for (int i = 0; i < 6; ++i) add_scaled(u, pts[i], w[i] / s);
        CHECK(project_onto_hull(u, pts).distance <= 1e-7);
    }
}

TEST_CASE("project_onto_zonotope: matches the hull projection on small orders") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 2 + rng.uniform_index(2);
        const std::size_t n = 1 + rng.uniform_index(4);
        Zonotope z;
        z.start = rng.gaussian_vector(d);
        for (std::size_t i = 0; i < n; ++i) z.generators.push_back(rng.gaussian_vector(d));
        const Vec u = scale(rng.gaussian_vector(d), 2.0);
        // all subset points define the same hull
        std::vector<Vec> pts;
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            Vec p = z.start;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::size_t{1} << i)) add_scaled(p, z.generators[i], 1.0);
            pts.push_back(std::move(p));
        }
        const double via_box = project_onto_zonotope(u, z).distance;
        const double via_hull = project_onto_hull(u, pts).distance;
        CHECK(via_box == doctest::Approx(via_hull).epsilon(1e-8));
    }
}

TEST_CASE("project_onto_zonotope: degenerate zonotope is its start point") {
    Zonotope z;
    z.start = {1.0, 2.0};
    const auto proj = project_onto_zonotope({4.0, 6.0}, z);
    CHECK(proj.distance == doctest::Approx(5.0));
}

TEST_CASE("hull_vertex_indices: square with interior and duplicate points") {
    const std::vector<Vec> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {1, 1}};
    const auto v = hull_vertex_indices(pts);
    REQUIRE(v.size() == 4);
    for (std::size_t idx : v) CHECK(idx < 4); // the four corners, first occurrences
}

TEST_CASE("hull_vertex_indices: collinear middle point is not a vertex") {
    const std::vector<Vec> pts = {{0, 0}, {2, 2}, {1, 1}};
    const auto v = hull_vertex_indices(pts);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == 0);
    CHECK(v[1] == 1);
}

TEST_CASE("project_onto_hull: dimension mismatch throws") {
    CHECK_THROWS_AS(project_onto_hull({1.0, 2.0}, std::vector<Vec>{{1.0, 2.0, 3.0}}),
                    ShapeError);
}
