#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rcw/perm.hpp"
#include "rcw/selection.hpp"

namespace rcw {

/// How an arity-4 selection on a 7-set S lets one pick an element of S.
/// With F = table(S) = {a<b<c<d} and g(T) = (S\T) \ table(S\T):
///  - natural_choice_outside: some g(l), l in F, meets S \ F;
///  - fixed_point: the permutations of F preserving g fix some point of F;
///  - terminal: g matches one of four rigid patterns (numbered 1..4) whose
///    preserving permutations are all fixed-point-free on F. Patterns 1 and 4
///    are isomorphic; the lowest matching number is reported, so 4 never is.
enum class SevenCase { natural_choice_outside, fixed_point, terminal };

struct SevenReport {
  SevenCase kind = SevenCase::natural_choice_outside;
  /// 1..4 for terminal cases, 0 otherwise.
  int terminal_case = 0;
  /// The selected 4-set F in increasing order: a, b, c, d.
  std::array<int, 4> labels{};
  /// g on the points of F, indexed like `labels`.
  std::array<SubsetCode, 4> g_values{};
  /// Non-identity permutations of F preserving g, as permutations of the
  /// 7-point domain fixing S \ F; ascending.
  std::vector<Perm> preserving;
  /// Points of F fixed by every preserving permutation (fixed_point case).
  SubsetCode fixed_points;
  /// For terminal cases: g(g(p,q) u g(r,s)) for the case's distinguished
  /// double transposition (p q)(r s).
  std::optional<int> chosen;
};

/// Requires a 7-point arity-4 structure with table(S), table(S\{l}) for l in
/// F and, for terminal cases, table(S\{p,q}) for pairs in F set. Throws
/// PreconditionError on anything else.
SevenReport classify_seven(const SelectionStructure& m);

/// Builds a 7-point arity-4 structure with table(S) = {3,4,5,6} (labels
/// a..d = 3..6, x,y,z = 0,1,2) and g(l) = g_values[l-3] for l in F. Every
/// other entry keeps the 4 largest points.
SelectionStructure make_seven_structure(const std::array<SubsetCode, 4>& g_values);

/// A point fixed by Aut(m), chosen through the canonical form so that
/// equivariant_choose(m.relabel(pi)) == pi(equivariant_choose(m)). Empty iff
/// Aut(m) has no fixed point. Domain limited to 10 points.
std::optional<int> equivariant_choose(const SelectionStructure& m);

}  // namespace rcw
