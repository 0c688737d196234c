#pragma once

#include <string>
#include <string_view>

namespace rcw {

/// Outcome of an independent certificate check. `reason` is empty when
/// accepted, otherwise one of: "schema", "malformed", "table",
/// "equivariance", "claim".
struct VerifyResult {
  bool accepted = false;
  std::string reason;
  std::string detail;
};

/// Re-checks a certificate from its text alone. Uses its own parser for
/// cycle notation, its own group closure and plain loops; no search code is
/// shared with the deciders. Single-threaded.
VerifyResult verify_certificate(std::string_view text);

}  // namespace rcw
