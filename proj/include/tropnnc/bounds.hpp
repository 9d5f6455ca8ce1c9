#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tropnnc/clustering.hpp"
#include "tropnnc/linalg.hpp"
#include "tropnnc/tropical.hpp"

namespace tropnnc {

// All quantities of one bound check. lhs_estimate is a sampled lower bound
// on the true sup, so holds == true is sound evidence for the bound.
struct BoundReport {
    std::string name;
    double r = 0.0;
    double rho = 0.0; // sqrt(r^2 + 1)
    double lhs_estimate = 0.0;
    double rhs = 0.0;
    std::map<std::string, double> components;
    bool holds = false;
    std::size_t samples_used = 0;
    std::uint64_t seed = 0;

    static std::string csv_header();
    std::string to_csv_row() const;
};

// Prop. 4 check: (1/rho) sup_B |p - p~|  vs  H(ENewt p, ENewt p~).
BoundReport check_poly_bound(const TropPolynomial& p, const TropPolynomial& p_tilde, double r,
                             std::size_t n_samples, std::uint64_t seed);

// Thm. 6 check: (1/rho) sup_B ||v - v~||_1  vs  sum_j (H(P_j,P~_j) + H(Q_j,Q~_j)).
// A matrices carry the bias in the last column.
BoundReport check_network_bound(const Mat& a, const Mat& c, const Mat& a_tilde,
                                const Mat& c_tilde, double r, std::size_t n_samples,
                                std::uint64_t seed);

// Single-output evaluation v(x) = c . relu(A (x,1)).
double single_output_value(const Mat& a, const Vec& c_row, const Vec& x);
Vec multi_output_value(const Mat& a, const Mat& c, const Vec& x);

// Bound ingredients for the single-output clustering bounds. The clustering
// runs over the nonzero-weight generators |c_i| (a_i, b_i), enumerated in
// increasing row order of A.
struct ClusterBoundData {
    std::vector<Vec> generators;
    std::vector<std::size_t> generator_rows;
    double delta_max = 0.0;   // largest distance from a generator to its cluster mean
    std::size_t n_max = 0;    // largest cluster size
    bool acute_ok = false;    // within-cluster pairwise dot products >= -1e-9
};

ClusterBoundData cluster_bound_data(const Mat& a, const Vec& c_row, const Clustering& clustering);

// Prop. 5 bound: sum_i min{ ||c_i (a_i,b_i)||, delta_max }.
double prop5_rhs(const Mat& a, const Vec& c_row, const Clustering& clustering);

// Zonotope K-means bound: K*delta_max + (1 - 1/N_max) * sum_i |c_i| ||(a_i,b_i)||.
double misiakos_rhs(const Mat& a, const Vec& c_row, const Clustering& clustering);

// Prop. 8 bound for the sign-fixed iterative variant. clustering.assignment
// runs over rows of A; entries < 0 mark neurons dropped before clustering.
BoundReport prop8_rhs(const Mat& a, const Mat& c, const Clustering& clustering,
                      const Mat& a_tilde, const Mat& c_tilde);

} // namespace tropnnc
