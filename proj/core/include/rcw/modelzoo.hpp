#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcw/certificate.hpp"
#include "rcw/group.hpp"
#include "rcw/reductions.hpp"
#include "rcw/subset.hpp"

namespace rcw {

inline constexpr int kZooAtomCap = 64;

enum class ZooKind { vfin, vlines, bfm };

std::string zoo_kind_name(ZooKind k);
/// Throws ParseError on an unknown name.
ZooKind parse_zoo_kind(std::string_view name);

/// A block of consecutive atoms. vfin and vlines blocks carry a full cycle;
/// the single bfm block carries every transposition.
struct ZooBlock {
  int first = 0;
  int size = 0;
  /// vlines only: which line the block lies on and its position along the
  /// line. Positions are recorded but take no part in finite verdicts.
  std::optional<int> line;
  std::optional<int> position;
  friend bool operator==(const ZooBlock&, const ZooBlock&) = default;
};

struct ZooParams {
  int blocks = 0;                // vfin: number of prime blocks (0 = as many as fit)
  std::vector<int> line_sizes;   // vlines: block size per line, each a prime power
  int blocks_per_line = 0;       // vlines: 0 = as many as fit
  int atoms = 0;                 // bfm
};

struct ZooModel {
  ZooKind kind = ZooKind::vfin;
  std::vector<ZooBlock> blocks;
  int atom_count = 0;
  /// The excluded finite set E; the group is fix(E).
  SubsetCode support;

  /// Generators of fix(E): block generators that touch E are dropped.
  std::vector<Perm> generators() const;
  /// Closure of generators(); BoundExceeded above `cap` elements.
  PermGroup group(std::size_t cap = kDefaultElementCap) const;
  friend bool operator==(const ZooModel&, const ZooModel&) = default;
};

/// Throws BoundExceeded above `cap` atoms (cap <= 64) and PreconditionError
/// on bad parameters or a support outside the atoms.
ZooModel make_model(ZooKind kind, const ZooParams& params, int cap = kZooAtomCap, SubsetCode support = {});

/// JSON descriptor mirroring the model fields.
std::string model_to_json(const ZooModel& m);
ZooModel model_from_json(std::string_view text);

/// Orbits of the setwise stabilizer of L in fix(E) on L, E = model.support
/// united with `extra_support`. Sorted by least atom.
std::vector<SubsetCode> stabilizer_orbits(const ZooModel& m, SubsetCode l, SubsetCode extra_support = {});

enum class ZooPrinciple { nrc_fin, c_n, ncfin_minus, rc };

std::string zoo_principle_name(ZooPrinciple p);
ZooPrinciple parse_zoo_principle(std::string_view name);

inline constexpr int kDefaultSupportBudget = 2;

struct ZooVerdict {
  std::string model;
  ZooPrinciple principle = ZooPrinciple::nrc_fin;
  int n = 0;
  int e_max = 0;
  bool holds_at_bound = false;
  /// A support under which the principle holds (when it does).
  SubsetCode support;
  /// Number of supports tried (up to the symmetry of equal blocks).
  std::size_t supports_tested = 0;
  /// When the principle fails: the configuration found for the model's own
  /// support, and one per tested support, each disjoint from it.
  SubsetCode witness;
  std::vector<std::pair<SubsetCode, SubsetCode>> witnesses;
  std::string witness_template;
  /// ncfin_minus: members admitting invariant choice on the smaller and the
  /// larger instance, for the support reported.
  std::uint64_t count_small = 0;
  std::uint64_t count_large = 0;
};

/// Searches supports E containing the model's support with |E| <= e_max.
/// nrc_fin: a fix(E)-equivariant selection of n-subsets on every set of
/// more than n atoms, checked on each vlines line separately (holds when it
/// holds on every line). c_n: an invariant choice on every n-set of atoms.
/// rc: the same on the n-subsets of some union of blocks holding at least
/// half of them. ncfin_minus: the number of (n+1)-sets with an invariant
/// n-subset grows from the model with one block fewer to the model.
ZooVerdict evaluate(const ZooModel& m, ZooPrinciple p, int n, int e_max = kDefaultSupportBudget);

/// zoo_failure certificate for a failing verdict whose witness fits the
/// verifier (the blocks meeting the witness span at most 24 atoms).
std::optional<Certificate> zoo_certificate(const ZooModel& m, const ZooVerdict& v);

/// Invariant partial choice: each member whose stabilizer in fix(E) fixes
/// one of its points gets the least such point.
PartialSelection bfm_partial_choice(const ZooModel& m, const std::vector<SubsetCode>& family,
                                    SubsetCode support = {});

}  // namespace rcw
