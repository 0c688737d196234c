#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rcw/group.hpp"
#include "rcw/perm.hpp"
#include "rcw/selection.hpp"

namespace rcw {

inline constexpr int kMaxSearchDomain = 10;
inline constexpr std::uint64_t kMaxStructureCount = 10'000'000;

/// All permutations pi with pi(table(L)) == table(pi L) for every L, by
/// backtracking over partial images with per-point invariant pruning.
/// Throws BoundExceeded above kMaxSearchDomain points.
PermGroup automorphism_group(const SelectionStructure& m);

struct CanonicalForm {
  SelectionStructure structure;
  /// relabeling.apply maps m onto structure: structure == m.relabel(relabeling)
  Perm relabeling;
};

/// Canonical representative of m's isomorphism class: the relabeling whose
/// table encoding (entries in increasing mask order) is lexicographically
/// least among labelings that order points by an isomorphism invariant.
CanonicalForm canonical_form(const SelectionStructure& m);

/// Number of total selection structures of the given shape, saturating at
/// UINT64_MAX.
std::uint64_t count_structures(int domain_size, int arity);

/// Streams every total selection structure on domain_size points exactly
/// once, in a fixed mixed-radix order.
class StructureEnumerator {
 public:
  /// Throws BoundExceeded if count_structures exceeds `cap`.
  StructureEnumerator(int domain_size, int arity, std::uint64_t cap = kMaxStructureCount);

  /// Writes the next structure into `out`; false once exhausted.
  bool next(SelectionStructure& out);
  std::uint64_t total() const { return total_; }

 private:
  int domain_size_;
  int arity_;
  std::vector<SubsetCode> subsets_;
  std::vector<std::vector<SubsetCode>> choices_;
  std::vector<std::size_t> digits_;
  std::uint64_t total_ = 0;
  bool started_ = false;
  bool done_ = false;
};

/// Convenience: materializes the stream.
std::vector<SelectionStructure> enumerate_structures(int domain_size, int arity,
                                                     std::uint64_t cap = kMaxStructureCount);

}  // namespace rcw
