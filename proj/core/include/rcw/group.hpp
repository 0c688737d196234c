#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rcw/perm.hpp"
#include "rcw/subset.hpp"

namespace rcw {

inline constexpr std::size_t kDefaultElementCap = 1'000'000;

/// A permutation group given by generators, with its full element list
/// cached at construction. Immutable after construction.
class PermGroup {
 public:
  /// Trivial group on `degree` points.
  explicit PermGroup(int degree = 0);

  /// Closes the generators under composition. Throws DomainError on degree
  /// mismatch and BoundExceeded when the closure exceeds `cap` elements.
  static PermGroup closure(int degree, std::vector<Perm> generators,
                           std::size_t cap = kDefaultElementCap);

  /// Builds a group from a complete, already closed element list; generators
  /// are selected greedily in element order. Used by code that has already
  /// computed the closure (stabilizers, automorphism searches).
  static PermGroup from_elements(int degree, std::vector<Perm> elements);

  int degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Perm>& generators() const { return generators_; }
  /// Sorted ascending by image list; the identity comes first.
  const std::vector<Perm>& elements() const { return elements_; }
  bool contains(const Perm& p) const;

  /// Points fixed by every element.
  SubsetCode fixed_points() const;
  bool is_fixed_point_free() const { return fixed_points().empty(); }
  bool is_cyclic() const;

  /// "<(0 1 2), (3 4)>" using the stored generators; the trivial group is "<>".
  std::string render() const;

 private:
  int degree_ = 0;
  std::vector<Perm> generators_;
  std::vector<Perm> elements_;
};

/// {pi(L) : pi in g}, sorted lexicographically.
std::vector<SubsetCode> orbit_of_subset(const PermGroup& g, SubsetCode l);

/// {pi in g : pi(L) == L}.
PermGroup setwise_stabilizer(const PermGroup& g, SubsetCode l);

/// Orbit partition of L under g; requires every generator to map L onto
/// itself (PreconditionError otherwise). Blocks are sorted by least point.
std::vector<SubsetCode> orbits_on_points(const PermGroup& g, SubsetCode l);

}  // namespace rcw
