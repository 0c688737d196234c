#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcw/equivariance.hpp"
#include "rcw/subset.hpp"

namespace rcw {

enum class ClaimKind { rc_failure, nrc_failure, zoo_failure };

/// rc_failure uses (n, m); nrc_failure uses (n, k); zoo_failure uses
/// (model, principle, n).
struct Claim {
  ClaimKind kind = ClaimKind::rc_failure;
  int n = 0;
  int m = 0;
  int k = 0;
  std::string model;
  std::string principle;

  friend bool operator==(const Claim&, const Claim&) = default;
};

/// One orbit of the table in orbit-generated form: table(rep) = selected, and
/// table(pi rep) = pi(selected) for the rest of the orbit.
struct OrbitTableEntry {
  SubsetCode rep;
  std::vector<int> stabilizer_orbit_sizes;
  std::vector<int> chosen_blocks;
  SubsetCode selected;

  friend bool operator==(const OrbitTableEntry&, const OrbitTableEntry&) = default;
};

/// Self-contained witness: a group on domain_size points, an equivariant
/// selection table (explicit or orbit-generated) and a target set on which
/// the claimed impossibility can be re-checked.
struct Certificate {
  std::string schema_version = "1";
  Claim claim;
  int domain_size = 0;
  std::vector<std::string> group_generators;
  bool orbit_generated = false;
  std::vector<std::pair<SubsetCode, SubsetCode>> sel_table;
  std::vector<OrbitTableEntry> orbit_table;
  SubsetCode target_set;
  std::string support_template;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Domains above this size are written in orbit-generated form.
inline constexpr int kExplicitTableMaxDomain = 12;

std::string claim_kind_name(ClaimKind kind);
/// Arity of the selection table: n for every claim kind.
int claim_arity(const Claim& claim);

/// Canonical text form: fixed key order, one table entry per line. Parsing
/// then serializing an accepted certificate reproduces the input bytes.
std::string serialize_certificate(const Certificate& c);
/// Throws ParseError on malformed input.
Certificate parse_certificate(std::string_view text);

/// Fills sel_table from an explicit structure, or orbit_table from an
/// existence certificate when the domain exceeds kExplicitTableMaxDomain.
void attach_table(Certificate& c, const SelectionStructure& sel, const OrbitCertificate& orbits);

/// Default wording of the support template.
std::string default_support_template();

}  // namespace rcw
