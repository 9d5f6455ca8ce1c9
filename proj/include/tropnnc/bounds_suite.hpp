#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tropnnc/bounds.hpp"

namespace tropnnc {

enum class BoundsKind { Prop4, Thm6, Prop5, Cor7, Prop8, VertexCount, Examples };

const char* bounds_kind_name(BoundsKind kind);
std::optional<BoundsKind> parse_bounds_kind(const std::string& name);

// Randomized / pinned verification suites. Every returned report must have
// holds == true for the suite to pass. The Examples kind ignores trials and
// runs the pinned worked-example assertions.
std::vector<BoundReport> run_bounds_suite(BoundsKind kind, std::size_t trials,
                                          std::uint64_t seed);

inline bool all_hold(const std::vector<BoundReport>& reports) {
    for (const auto& r : reports)
        if (!r.holds) return false;
    return true;
}

} // namespace tropnnc
