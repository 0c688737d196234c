#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcw/perm.hpp"
#include "rcw/subset.hpp"

namespace rcw {

/// Largest domain for which a dense selection table is materialized
/// (2^24 entries). Larger selection structures are represented lazily by the
/// modules that need them.
inline constexpr int kMaxTableDomain = 24;

/// A finite model of the selection theory of arity n: a table assigning to
/// every subset L of {0..N-1} with |L| > n an n-element subset of L.
///
/// Entries are created unset; `is_total()` reports whether every required
/// entry has been filled. Value type, compared entry-wise.
class SelectionStructure {
 public:
  SelectionStructure() = default;
  /// Throws DomainError when domain_size exceeds kMaxTableDomain or arity < 1.
  SelectionStructure(int domain_size, int arity);

  int domain_size() const { return domain_size_; }
  int arity() const { return arity_; }

  /// True iff the table has an entry for L, i.e. |L| > arity.
  bool in_domain(SubsetCode l) const {
    return l.size() > arity_ && l.subset_of(SubsetCode::full(domain_size_));
  }
  /// Empty SubsetCode when unset.
  SubsetCode at(SubsetCode l) const { return table_[static_cast<std::size_t>(l.bits())]; }
  bool is_set(SubsetCode l) const { return at(l).size() == arity_; }
  /// Throws PreconditionError unless value is an arity-subset of L and L is in the domain.
  void set(SubsetCode l, SubsetCode value);

  bool is_total() const;
  /// Throws PreconditionError describing the first violated invariant.
  void validate() const;

  /// All L with |L| > arity in increasing mask order.
  std::vector<SubsetCode> domain_subsets() const;
  std::size_t entry_count() const;

  /// The relabeled structure pi.m with table'(pi L) = pi(table(L)).
  SelectionStructure relabel(const Perm& pi) const;
  /// pi(table(L)) == table(pi L) for every L.
  bool is_automorphism(const Perm& pi) const;

  /// Default filling: every L selects its `arity` largest points.
  static SelectionStructure largest_points(int domain_size, int arity);
  /// Every L selects its `arity` smallest points.
  static SelectionStructure smallest_points(int domain_size, int arity);

  /// One "L -> S" line per entry in mask order.
  std::string render() const;

  friend bool operator==(const SelectionStructure& a, const SelectionStructure& b) = default;

 private:
  int domain_size_ = 0;
  int arity_ = 1;
  std::vector<SubsetCode> table_;
};

/// The `k` largest (or smallest) points of L.
SubsetCode largest_k(SubsetCode l, int k);
SubsetCode smallest_k(SubsetCode l, int k);

}  // namespace rcw
