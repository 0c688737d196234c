#include "rcw/verify.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace rcw {

namespace {

using Json = nlohmann::json;
using Mask = std::uint64_t;
using Images = std::vector<int>;

constexpr int kMaxVerifyDomain = 24;
constexpr std::size_t kMaxVerifyGroup = 2'000'000;

struct Reject {
  std::string reason;
  std::string detail;
};

[[noreturn]] void reject(const std::string& reason, const std::string& detail) { throw Reject{reason, detail}; }

int popcount(Mask m) {
  int c = 0;
  for (; m; m &= m - 1) ++c;
  return c;
}

std::string show(Mask m) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < 64; ++i) {
    if (!((m >> i) & 1U)) continue;
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

Images parse_cycles(const std::string& text, int degree) {
  Images img(static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) img[static_cast<std::size_t>(i)] = i;
  std::vector<bool> used(static_cast<std::size_t>(degree), false);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',')) ++pos;
  };
  skip_space();
  while (pos < text.size()) {
    if (text[pos] != '(') reject("malformed", "bad cycle string '" + text + "'");
    ++pos;
    std::vector<int> cycle;
    for (;;) {
      skip_space();
      if (pos >= text.size()) reject("malformed", "unterminated cycle in '" + text + "'");
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) reject("malformed", "bad point in '" + text + "'");
      int v = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        v = v * 10 + (text[pos] - '0');
        if (v > 1000) reject("malformed", "point too large in '" + text + "'");
        ++pos;
      }
      if (v >= degree || used[static_cast<std::size_t>(v)])
        reject("malformed", "point out of range or repeated in '" + text + "'");
      used[static_cast<std::size_t>(v)] = true;
      cycle.push_back(v);
    }
    for (std::size_t i = 0; i < cycle.size(); ++i)
      img[static_cast<std::size_t>(cycle[i])] = cycle[(i + 1) % cycle.size()];
    skip_space();
  }
  return img;
}

Mask apply(const Images& p, Mask s) {
  Mask out = 0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i)
    if ((s >> i) & 1U) out |= Mask{1} << p[static_cast<std::size_t>(i)];
  return out;
}

Images compose(const Images& p, const Images& q) {
  Images r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[static_cast<std::size_t>(q[i])];
  return r;
}

std::vector<Images> closure(const std::vector<Images>& gens, int degree) {
  Images id(static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) id[static_cast<std::size_t>(i)] = i;
  std::set<Images> seen{id};
  std::vector<Images> all{id};
  for (std::size_t head = 0; head < all.size(); ++head) {
    for (const Images& g : gens) {
      Images next = compose(g, all[head]);
      if (seen.insert(next).second) {
        if (all.size() >= kMaxVerifyGroup) reject("malformed", "group too large to verify");
        all.push_back(std::move(next));
      }
    }
  }
  return all;
}

Mask subset(const Json& j, int degree) {
  if (!j.is_array()) reject("malformed", "subset is not an array");
  Mask m = 0;
  int last = -1;
  for (const auto& e : j) {
    if (!e.is_number_integer()) reject("malformed", "subset element is not an integer");
    const int v = e.get<int>();
    if (v <= last || v >= degree) reject("malformed", "subset not strictly increasing within the domain");
    last = v;
    m |= Mask{1} << v;
  }
  return m;
}

const Json& need(const Json& j, const char* key, const char* reason) {
  if (!j.is_object() || !j.contains(key)) reject(reason, std::string("missing key '") + key + "'");
  return j.at(key);
}

int need_int(const Json& j, const char* key) {
  const Json& v = need(j, key, "schema");
  if (!v.is_number_integer()) reject("malformed", std::string("'") + key + "' is not an integer");
  return v.get<int>();
}

std::vector<Images> stabilizer(const std::vector<Images>& group, Mask l) {
  std::vector<Images> out;
  for (const Images& p : group)
    if (apply(p, l) == l) out.push_back(p);
  return out;
}

bool fixed_point_in(const std::vector<Images>& stab, Mask l) {
  for (int x = 0; x < 64; ++x) {
    if (!((l >> x) & 1U)) continue;
    bool fixed = true;
    for (const Images& p : stab) fixed = fixed && p[static_cast<std::size_t>(x)] == x;
    if (fixed) return true;
  }
  return false;
}

// Brute force over all k-subsets of l.
bool invariant_subset_in(const std::vector<Images>& stab, Mask l, int k) {
  std::vector<int> pts;
  for (int x = 0; x < 64; ++x)
    if ((l >> x) & 1U) pts.push_back(x);
  const int size = static_cast<int>(pts.size());
  if (k < 0 || k > size) return false;
  std::vector<int> choose(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) choose[static_cast<std::size_t>(i)] = i;
  for (;;) {
    Mask s = 0;
    for (int i : choose) s |= Mask{1} << pts[static_cast<std::size_t>(i)];
    bool invariant = true;
    for (const Images& p : stab) invariant = invariant && apply(p, s) == s;
    if (invariant) return true;
    int i = k - 1;
    while (i >= 0 && choose[static_cast<std::size_t>(i)] == size - k + i) --i;
    if (i < 0) return false;
    ++choose[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) choose[static_cast<std::size_t>(j)] = choose[static_cast<std::size_t>(j - 1)] + 1;
  }
}

void check(const Json& doc) {
  if (!doc.is_object()) reject("schema", "certificate is not an object");
  const Json& version = need(doc, "schema_version", "schema");
  if (!version.is_string() || version.get<std::string>() != "1") reject("schema", "unsupported schema_version");
  for (const char* key : {"claim", "domain_size", "group_generators", "sel_table", "target_set", "support_template"})
    need(doc, key, "schema");

  const int degree = need_int(doc, "domain_size");
  if (degree < 1 || degree > kMaxVerifyDomain) reject("malformed", "domain_size outside 1.." + std::to_string(kMaxVerifyDomain));

  const Json& claim = doc.at("claim");
  const Json& kind_json = need(claim, "kind", "schema");
  if (!kind_json.is_string()) reject("malformed", "claim kind is not a string");
  const std::string kind = kind_json.get<std::string>();
  if (kind != "rc_failure" && kind != "nrc_failure" && kind != "zoo_failure") reject("schema", "unknown claim kind");
  const int n = need_int(claim, "n");
  if (n < 1) reject("malformed", "claim arity must be positive");

  std::vector<Images> gens;
  if (!doc.at("group_generators").is_array()) reject("malformed", "group_generators is not a list");
  for (const auto& g : doc.at("group_generators")) {
    if (!g.is_string()) reject("malformed", "generator is not a string");
    gens.push_back(parse_cycles(g.get<std::string>(), degree));
  }
  const std::vector<Images> group = closure(gens, degree);
  const Mask target = subset(doc.at("target_set"), degree);

  // Rebuild the table as a map L -> S over all L with |L| > n.
  std::map<Mask, Mask> table;
  const Json& sel = doc.at("sel_table");
  if (sel.is_array()) {
    for (const auto& e : sel) {
      if (!e.is_array() || e.size() != 2) reject("malformed", "table entry is not an [L, S] pair");
      const Mask l = subset(e[0], degree);
      const Mask s = subset(e[1], degree);
      if (!table.emplace(l, s).second) reject("table", "duplicate entry for " + show(l));
    }
  } else if (sel.is_object()) {
    const Json& reps = need(sel, "orbit_generated", "schema");
    if (!reps.is_array()) reject("malformed", "orbit_generated is not a list");
    for (const auto& e : reps) {
      const Mask rep = subset(need(e, "rep", "schema"), degree);
      const Mask s = subset(need(e, "selected", "schema"), degree);
      for (const Images& p : stabilizer(group, rep))
        if (apply(p, s) != s) reject("equivariance", "selection for " + show(rep) + " is not stabilizer-invariant");
      for (const Images& p : group) {
        const Mask l = apply(p, rep);
        const Mask v = apply(p, s);
        auto [it, inserted] = table.emplace(l, v);
        if (!inserted && it->second != v) reject("equivariance", "orbit images disagree on " + show(l));
      }
    }
  } else {
    reject("malformed", "sel_table has the wrong type");
  }

  if (kind != "zoo_failure") {
    for (const auto& [l, s] : table) {
      if (popcount(l) <= n) reject("table", "entry for undersized set " + show(l));
      if ((s & ~l) != 0 || popcount(s) != n) reject("table", "entry for " + show(l) + " is not an n-subset of it");
    }
    const Mask full = degree == 64 ? ~Mask{0} : (Mask{1} << degree) - 1;
    for (Mask l = 0; l <= full; ++l) {
      if (popcount(l) > n && !table.contains(l)) reject("table", "missing entry for " + show(l));
      if (l == full) break;
    }
    for (const Images& g : gens) {
      for (const auto& [l, s] : table) {
        if (table.at(apply(g, l)) != apply(g, s)) reject("equivariance", "generator moves the entry for " + show(l));
      }
    }
  } else if (!table.empty()) {
    reject("table", "zoo certificates carry no selection table");
  }

  const std::vector<Images> stab = stabilizer(group, target);
  if (kind == "rc_failure") {
    const int m = need_int(claim, "m");
    if (m != degree || popcount(target) != m) reject("claim", "target must be the full m-point domain");
    if (fixed_point_in(stab, target)) reject("claim", "the target has a point fixed by its stabilizer");
  } else if (kind == "nrc_failure") {
    const int k = need_int(claim, "k");
    if (k < 1 || popcount(target) <= k) reject("claim", "target must have more than k points");
    if (invariant_subset_in(stab, target, k)) reject("claim", "the target has an invariant k-subset");
  } else {
    const Json& principle = need(claim, "principle", "schema");
    need(claim, "model", "schema");
    if (!principle.is_string()) reject("malformed", "principle is not a string");
    const std::string pr = principle.get<std::string>();
    if (pr == "nrc_fin") {
      if (popcount(target) <= n) reject("claim", "target must have more than n points");
      if (invariant_subset_in(stab, target, n)) reject("claim", "the target has an invariant n-subset");
    } else if (pr == "c_n" || pr == "rc" || pr == "ncfin_minus") {
      if (popcount(target) != n) reject("claim", "target must have exactly n points");
      if (fixed_point_in(stab, target)) reject("claim", "the target has a point fixed by its stabilizer");
    } else {
      reject("schema", "unknown principle '" + pr + "'");
    }
  }
}

}  // namespace

VerifyResult verify_certificate(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    return {false, "malformed", std::string("not valid JSON: ") + e.what()};
  }
  try {
    check(doc);
  } catch (const Reject& r) {
    return {false, r.reason, r.detail};
  } catch (const nlohmann::json::exception& e) {
    return {false, "malformed", e.what()};
  }
  return {true, "", ""};
}

}  // namespace rcw
