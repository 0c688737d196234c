#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcw/certificate.hpp"
#include "rcw/group.hpp"

namespace rcw {

enum class Mode { complete, cyclic_only };
enum class VerdictKind { holds_at_bound, fails };

std::string mode_name(Mode mode);
/// Accepts "complete", "cyclic" and "cyclic_only".
Mode parse_mode(std::string_view text);
std::string verdict_kind_name(VerdictKind kind);

/// One candidate group looked at by a decider. For rc decisions `admits` is
/// whether it carries an equivariant selection of the arity; for nrc
/// decisions `admits` is the failure condition (source arity yes, target no).
struct CandidateRecord {
  int degree = 0;
  std::string group;
  std::size_t order = 0;
  bool admits = false;
};

struct Verdict {
  VerdictKind kind = VerdictKind::holds_at_bound;
  std::optional<Certificate> witness;
  int bound = 0;
  Mode mode = Mode::complete;
  std::vector<CandidateRecord> examined;
  /// One-line human-readable summary.
  std::string summary;
};

/// Whether some fixed-point-free group of degree m (every subgroup class in
/// complete mode, every cyclic class otherwise) admits an equivariant
/// arity-n selection; such a group witnesses failure of RC_m from nRC_fin.
/// For m <= n the first candidate fails vacuously with an empty table.
/// Throws BoundExceeded for m > 8 (complete) or m > 12 (cyclic_only).
Verdict decide_local_rc(int n, int m, Mode mode, unsigned jobs = 1);

/// Searches domain sizes max(m, k) < d <= bound and groups of degree d for
/// one admitting an equivariant arity-m selection but no arity-k one.
/// Complete mode allows bound <= 8, cyclic_only bound <= 24.
Verdict decide_local_nrc(int m, int k, int bound, Mode mode, unsigned jobs = 1);

/// decide_local_rc for every m in [m_lo, m_hi], in order.
std::vector<Verdict> implication_matrix(int n, int m_lo, int m_hi, Mode mode, unsigned jobs = 1);

}  // namespace rcw
