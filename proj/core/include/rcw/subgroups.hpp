#pragma once

#include <string_view>
#include <vector>

#include "rcw/group.hpp"

namespace rcw {

inline constexpr int kMaxSubgroupDegree = 8;
inline constexpr int kMaxCyclicDegree = 12;

enum class SubgroupFilter { all, fixed_point_free, minimal_fixed_point_free };

/// Parses "all", "fixed_point_free"/"fpf", "minimal_fixed_point_free"/"minimal".
SubgroupFilter parse_subgroup_filter(std::string_view text);

/// One representative per conjugacy class of subgroups of Sym(degree),
/// degree <= kMaxSubgroupDegree. The representative is the conjugate whose
/// sorted element list is lexicographically least. Output is ordered by
/// (order, render()). Results are cached per degree; thread-safe.
std::vector<PermGroup> enumerate_subgroups(int degree, SubgroupFilter filter);

/// Number of conjugacy classes of subgroups (unfiltered).
std::size_t subgroup_class_count(int degree);

/// One representative per conjugacy class of cyclic subgroups, i.e. per cycle
/// type. The generator lays cycles out in decreasing length on consecutive
/// points, e.g. (0 1 2 3 4)(5 6). Ordered by (order, render()).
std::vector<PermGroup> enumerate_cyclic_subgroups(int degree, SubgroupFilter filter);

/// True iff g has no fixed point but every proper subgroup of g has one.
bool is_minimal_fixed_point_free(const PermGroup& g);

}  // namespace rcw
