#pragma once

#include <vector>

#include "tropnnc/linalg.hpp"

namespace tropnnc {

// Convex body given by a defining point set; the polytope is the convex hull.
struct PointPolytope {
    std::vector<Vec> points;

    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

// Zonotope: start point plus generator segments [0, v_i].
struct Zonotope {
    Vec start;
    std::vector<Vec> generators;

    std::size_t dim() const { return start.size(); }
    std::size_t order() const { return generators.size(); }
};

struct Projection {
    Vec point;       // nearest point of the body
    double distance; // ||u - point||
};

// Euclidean projection of u onto conv(points). Away-step Frank-Wolfe over
// the convex-combination weights, stop at duality gap <= gap_tol, followed
// by an exact solve on the identified active set.
Projection project_onto_hull(const Vec& u, const std::vector<Vec>& points,
                             double gap_tol = 1e-12, int max_iter = 10000);

inline Projection project_onto_hull(const Vec& u, const PointPolytope& p,
                                    double gap_tol = 1e-12, int max_iter = 10000) {
    return project_onto_hull(u, p.points, gap_tol, max_iter);
}

// Euclidean projection onto a zonotope: box-constrained least squares in the
// generator coefficients, solved by exact cyclic coordinate descent.
Projection project_onto_zonotope(const Vec& u, const Zonotope& z, int max_sweeps = 10000);

// Indices of the defining points that are vertices of the hull (a point is a
// vertex iff it lies outside the hull of the others). Near-duplicates keep
// only their first occurrence.
std::vector<std::size_t> hull_vertex_indices(const std::vector<Vec>& points, double tol = 1e-9);

} // namespace tropnnc
