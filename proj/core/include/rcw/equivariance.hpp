#pragma once

#include <optional>
#include <vector>

#include "rcw/error.hpp"
#include "rcw/group.hpp"
#include "rcw/selection.hpp"

namespace rcw {

/// Per-orbit record: a representative L, the orbit sizes of its setwise
/// stabilizer on L, and (when an invariant subset exists) the sizes of the
/// orbits making up the chosen one together with the subset itself.
struct OrbitEntry {
  SubsetCode rep;
  std::vector<int> stabilizer_orbit_sizes;
  std::optional<std::vector<int>> chosen_blocks;
  std::optional<SubsetCode> selected;
};

struct OrbitCertificate {
  std::vector<OrbitEntry> orbit_reps;
};

struct SelExistence {
  bool exists = false;
  OrbitCertificate certificate;
  std::optional<SubsetCode> failing;
};

struct ChoiceExistence {
  bool exists = false;
  std::optional<SubsetCode> failing;
};

/// Thrown by build_equivariant_sel when some L has no invariant subset.
class NoEquivariantSel : public Error {
 public:
  explicit NoEquivariantSel(SubsetCode failing);
  SubsetCode failing() const { return failing_; }

 private:
  SubsetCode failing_;
};

enum class Transversal { forward, reversed };

/// Orbit representatives (lex-least member of each orbit) of the subsets of
/// g's domain whose size lies in [min_size, max_size], in lex order.
/// Domain limited to kMaxTableDomain points.
std::vector<SubsetCode> subset_orbit_reps(const PermGroup& g, int min_size, int max_size);

/// The lex-least union of g-orbits on L of total size k, if any. Requires
/// every generator to map L to itself and 0 < k < |L|.
std::optional<SubsetCode> invariant_ksubset(const PermGroup& g, SubsetCode l, int k);

/// For every orbit of subsets L with |L| > arity, whether the setwise
/// stabilizer of L admits an invariant arity-subset. Entries are in lex order
/// of representatives; `failing` is the first representative without one.
SelExistence equivariant_sel_exists(const PermGroup& g, int arity);

/// A total g-equivariant selection structure. table(rep) is the lex-least
/// invariant subset; other orbit members are filled by walking the group
/// elements in the given order. Throws NoEquivariantSel if none exists.
SelectionStructure build_equivariant_sel(const PermGroup& g, int arity,
                                         Transversal order = Transversal::forward);

/// Whether every m-subset has a point fixed by its setwise stabilizer.
ChoiceExistence equivariant_choice_exists(const PermGroup& g, int m);

/// Arity k*n structure built from k successive selections:
/// Sel(L), Sel(L \ Sel(L)), ...
SelectionStructure compose_sel(const SelectionStructure& m, int k);

}  // namespace rcw
