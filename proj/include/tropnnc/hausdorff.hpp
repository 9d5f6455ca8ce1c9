#pragma once

#include <vector>

#include "tropnnc/geometry.hpp"

namespace tropnnc {

// Hausdorff distance between the convex hulls of two defining point sets.
// Valid because the directed sup of a convex distance function over a
// polytope is attained at a vertex, and every defining point lies in the
// hull. Empty-set convention: 0 if both empty, +infinity otherwise.
double hausdorff(const std::vector<Vec>& p, const std::vector<Vec>& q);

inline double hausdorff(const PointPolytope& p, const PointPolytope& q) {
    return hausdorff(p.points, q.points);
}

// Discrete Hausdorff distance: Hausdorff distance of the two true vertex
// sets, as finite point sets (min over points, not over hulls).
double discrete_hausdorff(const std::vector<Vec>& p, const std::vector<Vec>& q);

inline double discrete_hausdorff(const PointPolytope& p, const PointPolytope& q) {
    return discrete_hausdorff(p.points, q.points);
}

// Hausdorff distance between two zonotopes: the outer sup runs over the
// subset-sum points (a superset of the vertices, all inside the zonotope),
// the inner distance is an exact projection onto the other zonotope.
double hausdorff_zonotopes(const Zonotope& a, const Zonotope& b, std::size_t cap = 20);

} // namespace tropnnc
