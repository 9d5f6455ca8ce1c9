#pragma once

#include <cstdint>
#include <vector>

#include "tropnnc/geometry.hpp"
#include "tropnnc/linalg.hpp"

namespace tropnnc {

// Max-plus polynomial: max_i { a_i . x + b_i }.
struct TropTerm {
    Vec slope;
    double bias = 0.0;
};

struct TropPolynomial {
    std::vector<TropTerm> terms;

    std::size_t dim() const { return terms.empty() ? 0 : terms.front().slope.size(); }
    std::size_t rank() const { return terms.size(); }

    static TropPolynomial constant(std::size_t d, double b) {
        return TropPolynomial{{TropTerm{Vec(d, 0.0), b}}};
    }
    // ReLU unit scaled by c >= 0: max{ c(a.x + b), 0 }
    static TropPolynomial scaled_relu(const Vec& a, double b, double c);
};

double eval_trop(const TropPolynomial& p, const Vec& x);

TropPolynomial trop_max(const TropPolynomial& f, const TropPolynomial& g);
TropPolynomial trop_add(const TropPolynomial& f, const TropPolynomial& g);

// Lifted exponent points (a_i, b_i) in dimension d+1.
PointPolytope enewt(const TropPolynomial& p);

// Defining points of the Minkowski sum (all pairwise sums).
PointPolytope minkowski_sum(const PointPolytope& p, const PointPolytope& q);

// All 2^n subset-sum points of the zonotope; refuses when n exceeds cap.
std::vector<Vec> zonotope_points(const Zonotope& z, std::size_t cap = 20);

// Exact vertex count of a zonotope with n generators in general position
// in R^d: 2 * sum_{j<d} C(n-1, j).
std::uint64_t zonotope_vertex_count(std::uint64_t n, std::uint64_t d);

enum class EnvelopePosition { StrictlyBelow, OnEnvelope, Above };

// Classifies a point against the upper envelope (last coordinate = up) of
// the polytope: computes t* = max{t >= 0 : point + t e_last in hull} via a
// convex search over membership tests.
EnvelopePosition is_on_or_below_upper(const Vec& point, const PointPolytope& p,
                                      double tol = 1e-9);

// Indices of terms that are vertices of the upper envelope of ENewt(p); the
// polynomial restricted to them is pointwise equal to p.
std::vector<std::size_t> upper_envelope_terms(const TropPolynomial& p, double tol = 1e-9);

// Functional equality: upper-envelope vertex sets coincide as point sets.
bool trop_poly_equal(const TropPolynomial& p, const TropPolynomial& q, double tol = 1e-9);

// Tropical data of one hidden-layer output: positive / negative polynomial
// and the corresponding zonotopes.
struct OutputPolys {
    TropPolynomial positive;
    TropPolynomial negative;
    Zonotope positive_zonotope;
    Zonotope negative_zonotope;
};

// A is n x (d+1) with bias in the last column; C is m x n. Output j gets
// positive generators { c_ji (a_i, b_i) : c_ji > 0 } and negative ones from
// the c_ji < 0 entries.
std::vector<OutputPolys> network_polys(const Mat& a, const Mat& c, std::size_t poly_cap = 20);

} // namespace tropnnc
