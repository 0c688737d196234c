#include "rcw/certificate.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "rcw/error.hpp"

namespace rcw {

namespace {

using Json = nlohmann::ordered_json;

std::string subset_json(SubsetCode s) { return "[" + s.render() + "]"; }

std::string int_list_json(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

std::string claim_json(const Claim& c) {
  const std::string kind = Json(claim_kind_name(c.kind)).dump();
  switch (c.kind) {
    case ClaimKind::rc_failure:
      return "{\"kind\": " + kind + ", \"n\": " + std::to_string(c.n) + ", \"m\": " + std::to_string(c.m) + "}";
    case ClaimKind::nrc_failure:
      return "{\"kind\": " + kind + ", \"n\": " + std::to_string(c.n) + ", \"k\": " + std::to_string(c.k) + "}";
    case ClaimKind::zoo_failure:
      return "{\"kind\": " + kind + ", \"model\": " + Json(c.model).dump() + ", \"principle\": " +
             Json(c.principle).dump() + ", \"n\": " + std::to_string(c.n) + "}";
  }
  return "{}";
}

SubsetCode subset_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an index array");
  std::vector<int> idx;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ParseError("expected integer indices");
    const int v = e.get<int>();
    if (v < 0 || v >= kMaxDomain) throw ParseError("index out of range");
    idx.push_back(v);
  }
  return SubsetCode::from_indices(idx);
}

std::vector<int> ints_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an integer array");
  std::vector<int> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ParseError("expected integers");
    out.push_back(e.get<int>());
  }
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  return j.at(key);
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("key '") + key + "' must be an integer");
  return v.get<int>();
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw ParseError(std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string claim_kind_name(ClaimKind kind) {
  switch (kind) {
    case ClaimKind::rc_failure:
      return "rc_failure";
    case ClaimKind::nrc_failure:
      return "nrc_failure";
    case ClaimKind::zoo_failure:
      return "zoo_failure";
  }
  return "";
}

int claim_arity(const Claim& claim) { return claim.n; }

std::string default_support_template() {
  return "The witness domain can be placed disjointly from any finite support; every set meeting both the "
         "support and the witness domain may receive an arbitrary fixed selection.";
}

void attach_table(Certificate& c, const SelectionStructure& sel, const OrbitCertificate& orbits) {
  c.sel_table.clear();
  c.orbit_table.clear();
  c.orbit_generated = c.domain_size > kExplicitTableMaxDomain;
  if (!c.orbit_generated) {
    for (SubsetCode l : sel.domain_subsets()) c.sel_table.emplace_back(l, sel.at(l));
    std::sort(c.sel_table.begin(), c.sel_table.end(),
              [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    return;
  }
  for (const OrbitEntry& e : orbits.orbit_reps)
    c.orbit_table.push_back({e.rep, e.stabilizer_orbit_sizes, e.chosen_blocks.value_or(std::vector<int>{}),
                             e.selected.value_or(SubsetCode{})});
}

std::string serialize_certificate(const Certificate& c) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema_version\": " << Json(c.schema_version).dump() << ",\n";
  out << "  \"claim\": " << claim_json(c.claim) << ",\n";
  out << "  \"domain_size\": " << c.domain_size << ",\n";
  out << "  \"group_generators\": [";
  for (std::size_t i = 0; i < c.group_generators.size(); ++i) {
    if (i) out << ", ";
    out << Json(c.group_generators[i]).dump();
  }
  out << "],\n";
  if (c.orbit_generated) {
    out << "  \"sel_table\": {\"orbit_generated\": [";
    for (std::size_t i = 0; i < c.orbit_table.size(); ++i) {
      const auto& e = c.orbit_table[i];
      out << (i ? ",\n" : "\n") << "    {\"rep\": " << subset_json(e.rep)
          << ", \"stabilizer_orbit_sizes\": " << int_list_json(e.stabilizer_orbit_sizes)
          << ", \"chosen_blocks\": " << int_list_json(e.chosen_blocks) << ", \"selected\": " << subset_json(e.selected)
          << "}";
    }
    out << (c.orbit_table.empty() ? "" : "\n  ") << "]},\n";
  } else {
    out << "  \"sel_table\": [";
    for (std::size_t i = 0; i < c.sel_table.size(); ++i) {
      out << (i ? ",\n" : "\n") << "    [" << subset_json(c.sel_table[i].first) << ", "
          << subset_json(c.sel_table[i].second) << "]";
    }
    out << (c.sel_table.empty() ? "" : "\n  ") << "],\n";
  }
  out << "  \"target_set\": " << subset_json(c.target_set) << ",\n";
  out << "  \"support_template\": " << Json(c.support_template).dump() << "\n";
  out << "}\n";
  return out.str();
}

Certificate parse_certificate(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
  }
  Certificate c;
  try {
    c.schema_version = string_field(j, "schema_version");
    const Json& claim = field(j, "claim");
    const std::string kind = string_field(claim, "kind");
    if (kind == "rc_failure") {
      c.claim.kind = ClaimKind::rc_failure;
      c.claim.n = int_field(claim, "n");
      c.claim.m = int_field(claim, "m");
    } else if (kind == "nrc_failure") {
      c.claim.kind = ClaimKind::nrc_failure;
      c.claim.n = int_field(claim, "n");
      c.claim.k = int_field(claim, "k");
    } else if (kind == "zoo_failure") {
      c.claim.kind = ClaimKind::zoo_failure;
      c.claim.model = string_field(claim, "model");
      c.claim.principle = string_field(claim, "principle");
      c.claim.n = int_field(claim, "n");
    } else {
      throw ParseError("unknown claim kind '" + kind + "'");
    }
    c.domain_size = int_field(j, "domain_size");
    for (const auto& g : field(j, "group_generators")) {
      if (!g.is_string()) throw ParseError("generators must be cycle strings");
      c.group_generators.push_back(g.get<std::string>());
    }
    const Json& table = field(j, "sel_table");
    if (table.is_object()) {
      c.orbit_generated = true;
      for (const auto& e : field(table, "orbit_generated")) {
        c.orbit_table.push_back({subset_from(field(e, "rep")), ints_from(field(e, "stabilizer_orbit_sizes")),
                                 ints_from(field(e, "chosen_blocks")), subset_from(field(e, "selected"))});
      }
    } else if (table.is_array()) {
      for (const auto& e : table) {
        if (!e.is_array() || e.size() != 2) throw ParseError("table entries must be [L, S] pairs");
        c.sel_table.emplace_back(subset_from(e[0]), subset_from(e[1]));
      }
    } else {
      throw ParseError("sel_table must be a list or an orbit_generated object");
    }
    c.target_set = subset_from(field(j, "target_set"));
    c.support_template = string_field(j, "support_template");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
  return c;
}

}  // namespace rcw
