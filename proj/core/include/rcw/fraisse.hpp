#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rcw/error.hpp"
#include "rcw/selection.hpp"

namespace rcw {

/// Default cap on the number of atoms a stage may hold.
inline constexpr std::size_t kFraisseAtomCap = 65536;

/// One atom of the staged generic model. The atom realizes point `point` of
/// representative R_k (k = `model`) over its ground, via the embedding that
/// sends ground[t] to image[t].
struct FraisseAtom {
  int stage = 0;
  std::vector<int> ground;
  std::size_t ground_index = 0;  // position of the ground in the enumeration of [F_s]^{<=n}
  std::size_t model = 0;
  std::size_t embedding = 0;     // position among the embeddings of this ground
  std::vector<int> image;
  int point = 0;
  friend bool operator==(const FraisseAtom&, const FraisseAtom&) = default;
};

/// F_s together with how every atom was created. The selection function is
/// stored lazily: an (n+1)-set equal to ground(a) u {a} with |ground(a)| = n
/// takes its value from the representative the atom realizes; every other
/// set selects its n largest atoms.
struct FraisseStage {
  int n = 2;
  int index = 0;
  std::vector<FraisseAtom> atoms;
  /// sizes[s] = |F_s| for every completed stage s <= index.
  std::vector<std::size_t> sizes{0};
  /// False while a stage build was cut off by the atom cap; `resume_at` is the
  /// next embedding position to process.
  bool complete = true;
  std::size_t resume_at = 0;

  std::size_t size() const { return atoms.size(); }
  friend bool operator==(const FraisseStage&, const FraisseStage&) = default;
};

/// A stage build would exceed the atom cap. `partial` holds everything built
/// so far and can be passed back to build_stage to resume.
class PartialStageError : public BoundExceeded {
 public:
  PartialStageError(std::string what, FraisseStage partial)
      : BoundExceeded(std::move(what)), partial_(std::move(partial)) {}
  const FraisseStage& partial() const { return partial_; }

 private:
  FraisseStage partial_;
};

/// Isomorphism class representatives of models of size m (1 <= m <= n+1),
/// on points 0..m-1, ordered by rendering of their canonical form.
const std::vector<SelectionStructure>& fraisse_representatives(int n, int m);

FraisseStage fraisse_start(int n);

/// F_{s+1} from F_s, or resumes an incomplete stage. Throws PartialStageError
/// when the cap would be exceeded.
FraisseStage build_stage(const FraisseStage& prev, std::size_t atom_cap = kFraisseAtomCap);

/// Builds stages 1..stages from scratch.
FraisseStage build_stages(int n, int stages, std::size_t atom_cap = kFraisseAtomCap);

/// Number of atoms stage prev.index+1 would add.
std::size_t projected_new_atoms(const FraisseStage& prev);

/// Throws DomainError for an atom outside the stage.
const std::vector<int>& ground(const FraisseStage& stage, int atom);

/// Sel(x) for a sorted set of more than n atoms of the stage.
std::vector<int> fraisse_sel(const FraisseStage& stage, const std::vector<int>& x);

/// Per stage s: every atom's ground lies in F_{s-1}, every closure
/// ground(a) u {a} is isomorphic to its representative via the recorded
/// embedding, and every set of n+1 or n+2 atoms below `window` that is not a
/// closure selects its n largest atoms.
struct SelScanReport {
  std::size_t closures = 0;
  std::size_t window_sets = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};
SelScanReport scan_stage(const FraisseStage& stage, std::size_t window = 40);

/// One-point extension types over a ground A: the representative index and
/// the orbit of the new point under automorphisms of R fixing the image of A
/// collapse to a single label (see extension_type).
struct ExtensionMiss {
  std::vector<int> ground;
  std::string type;
};
struct ExtensionReport {
  int stage = 0;
  std::size_t grounds = 0;
  std::size_t types = 0;
  std::vector<ExtensionMiss> misses;
};

/// The isomorphism type of F|(a u ground) over ground, with ground's atoms
/// kept in increasing order: "plain" below arity, otherwise "x<t>" where t is
/// the position of the unselected point (t = |ground| for the new atom).
std::string extension_type(const FraisseStage& stage, const std::vector<int>& ground, int atom);

/// For every A in [F_{s-1}]^{<=n} and every one-point extension type of
/// F|A, whether some atom added at stage s with ground A realizes it.
ExtensionReport check_extension_property(const FraisseStage& stage);

/// Injective, inside the stage, and preserving Sel on every subset of the
/// domain. Limited to domains of at most 24 atoms.
bool is_partial_isomorphism(const FraisseStage& stage, const std::map<int, int>& iso);

struct ExtendResult {
  std::map<int, int> iso;
  int rounds = 0;
  bool horizon_exhausted = false;
};

/// Alternating forth and back steps: each step takes the least atom missing
/// from the domain (resp. range) and pairs it with the least atom that keeps
/// the map an isomorphism. Stops after `steps` rounds, when the stage is
/// exhausted, or when no partner exists inside the stage.
ExtendResult extend_isomorphism(const FraisseStage& stage, const std::map<int, int>& iso, int steps);

struct AcfResult {
  bool realized = false;
  std::string reason;
  std::vector<int> reference;  // R = R' u {r0}
  int r0 = -1;
  int a0 = -1;
  std::vector<int> copies;     // atoms b0 with repl(a0 <-> b0) preserving Sel
};

/// Searches the stage for R', r0, a0 with Sel(R' u {r0, a}) = R' u {r0} for
/// every a in member \ {a0} and Sel(R' u {r0, a0}) = R' u {a0}, then for up to
/// `max_copies` atoms b0 that behave like a0 over R u support u member.
/// Throws PreconditionError if member meets support.
AcfResult acf_demo(const FraisseStage& stage, const std::vector<int>& member, const std::vector<int>& support,
                   std::size_t max_copies = 3);

/// Text dump: header, stage sizes, one line per atom, then the closure table.
std::string dump_stage(const FraisseStage& stage);
/// Throws ParseError on malformed input or a closure table that does not
/// match the atoms.
FraisseStage load_stage(std::string_view text);

}  // namespace rcw
