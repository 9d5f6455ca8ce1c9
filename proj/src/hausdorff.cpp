#include "tropnnc/hausdorff.hpp"

#include <algorithm>
#include <limits>

#include "tropnnc/tropical.hpp"

namespace tropnnc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double directed_to_hull(const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double worst = 0.0;
    for (const auto& u : from) worst = std::max(worst, project_onto_hull(u, to).distance);
    return worst;
}

double directed_point_sets(const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double worst = 0.0;
    for (const auto& u : from) {
        double best = kInf;
        for (const auto& v : to) best = std::min(best, dist2(u, v));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double hausdorff(const std::vector<Vec>& p, const std::vector<Vec>& q) {
    if (p.empty() && q.empty()) return 0.0;
    if (p.empty() || q.empty()) return kInf;
    if (p.front().size() != q.front().size()) throw ShapeError("hausdorff: dimension mismatch");
    return std::max(directed_to_hull(p, q), directed_to_hull(q, p));
}

double discrete_hausdorff(const std::vector<Vec>& p, const std::vector<Vec>& q) {
    if (p.empty() && q.empty()) return 0.0;
    if (p.empty() || q.empty()) return kInf;
    if (p.front().size() != q.front().size())
        throw ShapeError("discrete_hausdorff: dimension mismatch");
    std::vector<Vec> vp, vq;
    for (std::size_t i : hull_vertex_indices(p)) vp.push_back(p[i]);
    for (std::size_t i : hull_vertex_indices(q)) vq.push_back(q[i]);
    return std::max(directed_point_sets(vp, vq), directed_point_sets(vq, vp));
}

double hausdorff_zonotopes(const Zonotope& a, const Zonotope& b, std::size_t cap) {
    if (a.dim() != b.dim()) throw ShapeError("hausdorff_zonotopes: dimension mismatch");
    double worst = 0.0;
    for (const auto& u : zonotope_points(a, cap))
        worst = std::max(worst, project_onto_zonotope(u, b).distance);
    for (const auto& v : zonotope_points(b, cap))
        worst = std::max(worst, project_onto_zonotope(v, a).distance);
    return worst;
}

} // namespace tropnnc
