#include "rcw/reductions.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rcw/log.hpp"

namespace rcw {

namespace {

using json = nlohmann::json;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_set(std::uint64_t seed, const ElemSet& s) {
  std::uint64_t h = mix(seed ^ (s.size() * 0x632be59bd9b4e019ULL));
  for (int x : s) h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(x)));
  return h;
}

ElemSet set_minus(const ElemSet& a, const ElemSet& b) {
  ElemSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ElemSet set_and(const ElemSet& a, const ElemSet& b) {
  ElemSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ElemSet set_or(const ElemSet& a, const ElemSet& b) {
  ElemSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool includes(const ElemSet& big, const ElemSet& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool is_sorted_set(const ElemSet& s) { return std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end(); }

std::string render(const ElemSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int prime_power(int p, int k) {
  if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
  if (k < 0) throw PreconditionError("negative exponent");
  std::int64_t q = 1;
  for (int i = 0; i < k; ++i) {
    q *= p;
    if (q > (1 << 24)) throw BoundExceeded("p^k above 2^24");
  }
  return static_cast<int>(q);
}

// Greedy largest-first; returns chosen indices into sizes.
std::vector<std::size_t> subsum_indices(int q, const std::vector<int>& sizes) {
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
  std::vector<std::size_t> chosen;
  int sum = 0;
  for (std::size_t i : order) {
    if (sum + sizes[i] <= q) {
      sum += sizes[i];
      chosen.push_back(i);
    }
    if (sum == q) break;
  }
  if (sum != q) throw Error("greedy subsum missed the target");
  return chosen;
}

// Validating and recording front end for an oracle.
class Recorder {
 public:
  Recorder(const Oracle& o, std::vector<OracleCall>& log) : o_(o), log_(log) {}

  int arity() const { return o_.arity; }

  ElemSet select(const ElemSet& s) {
    if (static_cast<int>(s.size()) <= o_.arity) throw Error("select called on a set of size " + std::to_string(s.size()));
    ElemSet out = o_.select(s);
    if (static_cast<int>(out.size()) != o_.arity || !is_sorted_set(out) || !includes(s, out))
      throw OracleViolation("select(" + render(s) + ") returned " + render(out));
    log_.push_back({"select", {s}, out});
    return out;
  }

  ElemSet extract(const std::vector<ElemSet>& groups) {
    ElemSet pool;
    for (const ElemSet& g : groups) pool = set_or(pool, g);
    ElemSet out = o_.extract(groups);
    if (!is_sorted_set(out) || !includes(pool, out)) throw OracleViolation("extract returned ids outside the pool");
    for (const ElemSet& g : groups)
      if (!g.empty() && set_and(g, out).empty()) throw OracleViolation("extract missed a non-empty member trace");
    log_.push_back({"extract", groups, out});
    return out;
  }

 private:
  const Oracle& o_;
  std::vector<OracleCall>& log_;
};

void validate_family(const std::vector<ElemSet>& members, int n) {
  std::set<int> seen;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const ElemSet& m = members[i];
    if (!is_sorted_set(m)) throw PreconditionError("member " + std::to_string(i) + " is not a sorted set");
    if (static_cast<int>(m.size()) <= n)
      throw PreconditionError("member " + std::to_string(i) + " has " + std::to_string(m.size()) + " elements, need more than " +
                              std::to_string(n));
    for (int x : m) {
      if (x < 0) throw PreconditionError("negative element id");
      if (!seen.insert(x).second) throw PreconditionError("members are not pairwise disjoint (id " + std::to_string(x) + ")");
    }
  }
}

int index_id(std::size_t member) { return -1 - static_cast<int>(member); }

struct Piece {
  int layer = 0;
  ElemSet elems;
};

struct MemberState {
  ElemSet remainder;
  std::vector<Piece> pieces;
  bool resolved = false;
};

// Shared bookkeeping for reduce and reduce_pk_woc.
struct Run {
  const OracleFamily& fam;
  ReductionResult result;
  Recorder rec;
  std::vector<MemberState> st;

  Run(const OracleFamily& f, int k) : fam(f), rec(f.oracle, result.calls) {
    result.selection.k = k;
    st.resize(f.members.size());
    for (std::size_t i = 0; i < st.size(); ++i) st[i].remainder = f.members[i];
  }

  void resolve(std::size_t i, ElemSet sel, const std::string& rule) {
    st[i].resolved = true;
    result.selection.assignments[i] = std::move(sel);
    result.rule[i] = rule;
  }

  void note(std::string s) {
    log().debug("{}", s);
    result.notes.push_back(std::move(s));
  }

  std::vector<std::size_t> open_with_remainder() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < st.size(); ++i)
      if (!st[i].resolved && !st[i].remainder.empty()) out.push_back(i);
    return out;
  }

  // Intersects every open member's remainder with y; returns the traces.
  std::vector<std::pair<std::size_t, ElemSet>> take_layer(const ElemSet& y) {
    std::vector<std::pair<std::size_t, ElemSet>> out;
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (st[i].resolved) continue;
      ElemSet t = set_and(st[i].remainder, y);
      if (t.empty()) continue;
      st[i].remainder = set_minus(st[i].remainder, t);
      out.emplace_back(i, std::move(t));
    }
    return out;
  }

  void split(std::size_t i, std::size_t piece, const ElemSet& part) {
    Piece& p = st[i].pieces[piece];
    Piece rest{p.layer, set_minus(p.elems, part)};
    p.elems = part;
    st[i].pieces.insert(st[i].pieces.begin() + static_cast<std::ptrdiff_t>(piece) + 1, std::move(rest));
  }
};

// Earliest-first subset of piece sizes summing to target, if any.
std::optional<std::vector<std::size_t>> exact_sum(const std::vector<Piece>& pieces, int target) {
  const std::size_t p = pieces.size();
  // reach[j][s]: s is a sum of pieces j..p-1.
  std::vector<std::vector<char>> reach(p + 1, std::vector<char>(static_cast<std::size_t>(target) + 1, 0));
  reach[p][0] = 1;
  for (std::size_t j = p; j-- > 0;) {
    const int sz = static_cast<int>(pieces[j].elems.size());
    for (int s = 0; s <= target; ++s)
      reach[j][static_cast<std::size_t>(s)] =
          reach[j + 1][static_cast<std::size_t>(s)] || (s >= sz && reach[j + 1][static_cast<std::size_t>(s - sz)]);
  }
  if (!reach[0][static_cast<std::size_t>(target)]) return std::nullopt;
  std::vector<std::size_t> chosen;
  int s = target;
  for (std::size_t j = 0; j < p && s > 0; ++j) {
    const int sz = static_cast<int>(pieces[j].elems.size());
    if (s >= sz && reach[j + 1][static_cast<std::size_t>(s - sz)]) {
      chosen.push_back(j);
      s -= sz;
    }
  }
  return chosen;
}

bool try_assemble(Run& run, std::size_t i, int n, const std::string& rule) {
  if (run.st[i].resolved) return true;
  const auto chosen = exact_sum(run.st[i].pieces, n);
  if (!chosen) return false;
  ElemSet sel;
  for (std::size_t j : *chosen) sel = set_or(sel, run.st[i].pieces[j].elems);
  run.resolve(i, std::move(sel), rule);
  return true;
}

// The outdegree argument on pieces B_i of one layer and one size s with
// n/2 < s < n. Returns, for some members, a proper non-empty subset of B_i.
std::map<std::size_t, ElemSet> digraph_kernel(Run& run, const std::vector<std::size_t>& who,
                                              const std::vector<ElemSet>& b, int union_from) {
  const int n = run.rec.arity();
  const std::size_t count = who.size();
  std::vector<std::vector<char>> edge(count, std::vector<char>(count, 0));
  std::map<std::pair<std::size_t, std::size_t>, ElemSet> chosen;  // keyed by (min, max) position
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t q = p + 1; q < count; ++q) {
      const ElemSet g = run.rec.select(set_or(b[p], b[q]));
      edge[p][q] = !includes(g, b[q]);
      edge[q][p] = !includes(g, b[p]);
      if (!edge[p][q] && !edge[q][p]) throw Error("selection contains both halves of a pair");
      chosen[{p, q}] = g;
    }
  }
  auto edge_part = [&](std::size_t from, std::size_t to) {
    const ElemSet& g = chosen.at({std::min(from, to), std::max(from, to)});
    return set_and(g, b[to]);
  };

  std::map<std::size_t, std::vector<std::size_t>> classes;  // outdegree -> positions
  for (std::size_t p = 0; p < count; ++p)
    classes[static_cast<std::size_t>(std::count(edge[p].begin(), edge[p].end(), 1))].push_back(p);
  for (const auto& [k, members] : classes)
    if (outdegree_bound_check(static_cast<std::int64_t>(members.size()), static_cast<std::int64_t>(k)))
      throw Error("outdegree class larger than the counting bound allows");

  // f(I_k): at most n members of each class, picked by the oracle on index ids.
  std::map<std::size_t, std::vector<std::vector<std::size_t>>> by_m;
  for (const auto& [k, members] : classes) {
    std::vector<std::size_t> f = members;
    if (static_cast<int>(members.size()) > n) {
      ElemSet ids;
      for (std::size_t p : members) ids.push_back(index_id(who[p]));
      std::sort(ids.begin(), ids.end());
      const ElemSet picked = run.rec.select(ids);
      f.clear();
      for (std::size_t p : members)
        if (std::binary_search(picked.begin(), picked.end(), index_id(who[p]))) f.push_back(p);
    }
    by_m[f.size()].push_back(std::move(f));
  }
  // Most classes first, ties to the smaller m.
  std::vector<std::size_t> ms;
  for (const auto& [m, list] : by_m) ms.push_back(m);
  std::stable_sort(ms.begin(), ms.end(), [&](std::size_t x, std::size_t y) { return by_m[x].size() > by_m[y].size(); });

  for (std::size_t m : ms) {
    const auto& list = by_m[m];
    std::map<std::size_t, ElemSet> out;
    auto take_edge = [&](std::size_t i, std::size_t j) {
      if (edge[i][j]) out[who[j]] = edge_part(i, j);
      else out[who[i]] = edge_part(j, i);
    };
    if (m == 1) {
      for (std::size_t c = 0; c + 1 < list.size(); c += 2) take_edge(list[c][0], list[c + 1][0]);
    } else {
      for (const auto& f : list) {
        bool done = false;
        if (static_cast<int>(m) >= union_from) {
          ElemSet u;
          for (std::size_t p : f) u = set_or(u, b[p]);
          const ElemSet g = run.rec.select(u);
          for (std::size_t p : f) {
            const ElemSet part = set_and(g, b[p]);
            if (!part.empty() && part.size() < b[p].size()) {
              out[who[p]] = part;
              done = true;
            }
          }
        }
        if (!done) take_edge(f[0], f[1]);
      }
    }
    if (!out.empty()) {
      run.note("digraph: " + std::to_string(count) + " pieces of size " + std::to_string(b[0].size()) + ", " +
               std::to_string(classes.size()) + " outdegree classes, m=" + std::to_string(m) + " on " +
               std::to_string(list.size()) + " classes, " + std::to_string(out.size()) + " selections");
      return out;
    }
  }
  return {};
}

// Edge grid on members carrying a 3-piece and a 2-piece. Returns one edge
// (a, b) per selected member.
std::map<std::size_t, std::pair<int, int>> grid_kernel(Run& run, const std::vector<std::size_t>& who,
                                                       const std::vector<std::pair<ElemSet, ElemSet>>& traces) {
  EdgeGrid grid = build_edge_grid(traces);
  for (std::size_t g = 0; g < who.size(); ++g) grid.members[g].member = who[g];
  auto sel = [&](const ElemSet& s) { return run.rec.select(s); };
  compute_degrees(grid, sel);

  std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> by_degree;
  for (std::size_t g = 0; g < grid.members.size(); ++g)
    for (std::size_t c = 0; c < grid.members[g].columns.size(); ++c)
      by_degree[grid.members[g].column_degrees[c]].push_back({g, c});
  std::size_t k0 = by_degree.begin()->first;
  for (const auto& [k, cols] : by_degree)
    if (cols.size() > by_degree[k0].size()) k0 = k;

  // Unions F_a u F_a' in canonical order.
  struct FUnion {
    std::size_t owner;
    ElemSet edges;
  };
  std::vector<FUnion> unions;
  for (std::size_t g = 0; g < grid.members.size(); ++g) {
    const auto& rows = grid.members[g].rows;
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t a2 = a + 1; a2 < rows.size(); ++a2) {
        ElemSet u = rows[a];
        u.insert(u.end(), rows[a2].begin(), rows[a2].end());
        std::sort(u.begin(), u.end());
        unions.push_back({g, std::move(u)});
      }
  }

  std::map<std::size_t, std::pair<int, int>> out;
  auto record = [&](int edge_id) {
    const auto& [g, a, b] = grid.edge_owner.at(edge_id);
    out.emplace(grid.members[g].member, std::make_pair(a, b));
  };
  for (const auto& [g, c] : by_degree[k0]) {
    if (out.count(grid.members[g].member)) continue;
    ElemSet col = grid.members[g].columns[c];
    std::sort(col.begin(), col.end());
    std::size_t tried = 0;
    std::optional<int> outside;
    for (const FUnion& u : unions) {
      if (u.owner == g) continue;
      if (tried++ > k0) break;
      const ElemSet s = set_or(col, u.edges);
      const ElemSet left = set_minus(s, run.rec.select(s));
      if (std::binary_search(col.begin(), col.end(), left[0])) {
        record(left[0]);
        outside.reset();
        break;
      }
      if (!outside) outside = left[0];
    }
    // Every tried union absorbed the left-out edge: it selects from that member instead.
    if (outside && !out.count(grid.members[g].member)) record(*outside);
  }
  run.note("edge_grid: " + std::to_string(grid.members.size()) + " members, degree class " + std::to_string(k0) + " of " +
           std::to_string(by_degree[k0].size()) + " columns, " + std::to_string(out.size()) + " selections");
  return out;
}

bool shrink_round(Run& run, int n) {
  bool changed = false;
  // Digraph kernel per (layer, size) with n/2 < s < n.
  std::set<std::pair<int, std::size_t>> keys;
  for (const MemberState& m : run.st)
    if (!m.resolved)
      for (const Piece& p : m.pieces)
        if (2 * static_cast<int>(p.elems.size()) > n && static_cast<int>(p.elems.size()) < n)
          keys.insert({p.layer, p.elems.size()});
  const int union_from = n == 6 ? 2 : 4;
  for (const auto& [layer, size] : keys) {
    std::vector<std::size_t> who;
    std::vector<std::size_t> piece_idx;
    std::vector<ElemSet> b;
    for (std::size_t i = 0; i < run.st.size(); ++i) {
      if (run.st[i].resolved) continue;
      const auto& ps = run.st[i].pieces;
      for (std::size_t j = 0; j < ps.size(); ++j)
        if (ps[j].layer == layer && ps[j].elems.size() == size) {
          who.push_back(i);
          piece_idx.push_back(j);
          b.push_back(ps[j].elems);
          break;
        }
    }
    if (who.size() < 2) continue;
    const auto parts = digraph_kernel(run, who, b, union_from);
    for (std::size_t t = 0; t < who.size(); ++t) {
      const auto it = parts.find(who[t]);
      if (it == parts.end()) continue;
      run.split(who[t], piece_idx[t], it->second);
      try_assemble(run, who[t], n, "digraph");
      changed = true;
    }
    if (changed) return true;
  }

  if (n != 6) return false;
  std::vector<std::size_t> who;
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  std::vector<std::pair<ElemSet, ElemSet>> traces;
  for (std::size_t i = 0; i < run.st.size(); ++i) {
    if (run.st[i].resolved) continue;
    const auto& ps = run.st[i].pieces;
    std::optional<std::size_t> three, two;
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (!three && ps[j].elems.size() == 3) three = j;
      else if (!two && ps[j].elems.size() == 2) two = j;
    }
    if (three && two) {
      who.push_back(i);
      idx.push_back({*three, *two});
      traces.push_back({ps[*three].elems, ps[*two].elems});
    }
  }
  if (who.size() < 2) return false;
  const auto edges = grid_kernel(run, who, traces);
  for (std::size_t t = 0; t < who.size(); ++t) {
    const auto it = edges.find(who[t]);
    if (it == edges.end()) continue;
    const auto [a, b] = it->second;
    // Split the later piece first so the earlier index stays valid.
    const auto [iy, iz] = idx[t];
    if (iz > iy) {
      run.split(who[t], iz, {b});
      run.split(who[t], iy, {a});
    } else {
      run.split(who[t], iy, {a});
      run.split(who[t], iz, {b});
    }
    try_assemble(run, who[t], n, "edge_grid");
    changed = true;
  }
  return changed;
}

}  // namespace

FamilyTooSmall::FamilyTooSmall(std::size_t size, std::size_t minimum)
    : PreconditionError("family too small: " + std::to_string(size) + " members, need at least " +
                        std::to_string(minimum)),
      size_(size),
      minimum_(minimum) {}

Oracle seeded_oracle(int arity, std::uint64_t seed) {
  Oracle o;
  o.arity = arity;
  const int strategy = static_cast<int>(seed % 4);
  o.select = [arity, seed, strategy](const ElemSet& s) {
    ElemSet v = s;
    const std::uint64_t h = hash_set(seed, s);
    const bool random = strategy == 0 || (strategy == 3 && (h & 1U));
    if (random) {
      std::mt19937_64 rng(h);
      std::shuffle(v.begin(), v.end(), rng);
      v.resize(static_cast<std::size_t>(arity));
      std::sort(v.begin(), v.end());
    } else if (strategy == 2) {
      v.erase(v.begin(), v.end() - arity);
    } else {
      v.resize(static_cast<std::size_t>(arity));
    }
    return v;
  };
  o.extract = [seed](const std::vector<ElemSet>& groups) {
    ElemSet out;
    for (const ElemSet& g : groups) {
      if (g.empty()) continue;
      std::mt19937_64 rng(hash_set(seed ^ 0x5bd1e995ULL, g));
      ElemSet v = g;
      std::shuffle(v.begin(), v.end(), rng);
      const std::size_t take = 1 + static_cast<std::size_t>(rng() % v.size());
      out.insert(out.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return o;
}

Oracle lex_least_oracle(int arity) {
  Oracle o;
  o.arity = arity;
  o.select = [arity](const ElemSet& s) { return ElemSet(s.begin(), s.begin() + arity); };
  o.extract = [](const std::vector<ElemSet>& groups) {
    ElemSet out;
    for (const ElemSet& g : groups) out.insert(out.end(), g.begin(), g.end());
    std::sort(out.begin(), out.end());
    return out;
  };
  return o;
}

Oracle replay_oracle(int arity, const std::vector<OracleCall>& calls) {
  auto table = std::make_shared<std::map<std::pair<std::string, std::vector<ElemSet>>, ElemSet>>();
  for (const OracleCall& c : calls) (*table)[{c.op, c.input}] = c.output;
  Oracle o;
  o.arity = arity;
  o.select = [table](const ElemSet& s) {
    const auto it = table->find({"select", {s}});
    if (it == table->end()) throw OracleViolation("replay has no answer for select" + render(s));
    return it->second;
  };
  o.extract = [table](const std::vector<ElemSet>& groups) {
    const auto it = table->find({"extract", groups});
    if (it == table->end()) throw OracleViolation("replay has no answer for this extract");
    return it->second;
  };
  return o;
}

std::string write_oracle_trace(const std::vector<OracleCall>& calls) {
  std::string out;
  for (const OracleCall& c : calls) {
    json j;
    j["op"] = c.op;
    j["in"] = c.input;
    j["out"] = c.output;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<OracleCall> read_oracle_trace(std::string_view text) {
  std::vector<OracleCall> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      OracleCall c;
      c.op = j.at("op").get<std::string>();
      c.input = j.at("in").get<std::vector<ElemSet>>();
      c.output = j.at("out").get<ElemSet>();
      if (c.op != "select" && c.op != "extract") throw ParseError("unknown op");
      out.push_back(std::move(c));
    } catch (const std::exception& e) {
      throw ParseError("oracle trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ElemSet> parse_family(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("family file: ") + e.what());
  }
  const json& arr = j.is_object() ? j.value("members", json()) : j;
  if (!arr.is_array()) throw ParseError("family file: expected an array of members");
  std::vector<ElemSet> out;
  for (const json& m : arr) {
    if (!m.is_array()) throw ParseError("family file: member is not an array");
    ElemSet s;
    for (const json& x : m) {
      if (!x.is_number_integer() || x.get<long long>() < 0 || x.get<long long>() > (1LL << 30))
        throw ParseError("family file: element ids must be integers in [0, 2^30]");
      s.push_back(x.get<int>());
    }
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw ParseError("family file: repeated id inside a member");
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_family(const std::vector<ElemSet>& members) {
  std::string out = "{\"members\": [\n";
  for (std::size_t i = 0; i < members.size(); ++i) {
    out += "  " + json(members[i]).dump();
    out += i + 1 < members.size() ? ",\n" : "\n";
  }
  return out + "]}\n";
}

std::vector<ElemSet> random_family(int arity, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed));
  std::vector<ElemSet> out;
  int next = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const int size = arity + 1 + static_cast<int>(rng() % 3);
    ElemSet m(static_cast<std::size_t>(size));
    std::iota(m.begin(), m.end(), next);
    next += size;
    out.push_back(std::move(m));
  }
  return out;
}

bool is_valid_selection(const std::vector<ElemSet>& members, const PartialSelection& sel) {
  for (const auto& [i, s] : sel.assignments) {
    if (i >= members.size()) return false;
    if (static_cast<int>(s.size()) != sel.k || !is_sorted_set(s) || !includes(members[i], s)) return false;
  }
  return true;
}

std::vector<int> subsum_divisors(int p, int k, const std::vector<int>& sizes) {
  const int q = prime_power(p, k);
  std::int64_t total = 0;
  for (int s : sizes) {
    if (s < 1 || q % s != 0) throw PreconditionError(std::to_string(s) + " does not divide " + std::to_string(q));
    total += s;
  }
  if (total <= q) throw PreconditionError("sizes sum to " + std::to_string(total) + ", not above " + std::to_string(q));
  std::vector<int> out;
  for (std::size_t i : subsum_indices(q, sizes)) out.push_back(sizes[i]);
  return out;
}

bool outdegree_bound_check(std::int64_t v, std::int64_t k_prime) {
  if (v < 0 || k_prime < 0) return false;
  return v * (v - 1) / 2 > v * k_prime;
}

std::size_t reduce_min_family(int n) {
  if (n != 2 && n != 3 && n != 4 && n != 6) throw PreconditionError("reduce supports n in {2, 3, 4, 6}");
  return n == 2 ? 1 : 2;
}

std::size_t pk_woc_min_family(int p, int k) {
  const int q = prime_power(p, k);
  std::size_t best = 1;
  for (int m = 2; m < q; ++m)
    if (q % m != 0) best = std::max(best, static_cast<std::size_t>(q / m + 1));
  return best;
}

ReductionResult reduce(int n, const OracleFamily& fam, const std::vector<ElemSet>* forced_layers) {
  const std::size_t minimum = reduce_min_family(n);
  if (fam.arity() != n) throw PreconditionError("oracle arity does not match n");
  if (fam.members.size() < minimum) throw FamilyTooSmall(fam.members.size(), minimum);
  validate_family(fam.members, n);

  Run run(fam, n);
  for (int layer = 0;; ++layer) {
    ElemSet y;
    if (forced_layers) {
      if (layer >= static_cast<int>(forced_layers->size())) break;
      y = (*forced_layers)[static_cast<std::size_t>(layer)];
      std::sort(y.begin(), y.end());
    } else {
      const auto open = run.open_with_remainder();
      if (open.empty()) break;
      std::vector<ElemSet> groups;
      for (std::size_t i : open) groups.push_back(run.st[i].remainder);
      y = run.rec.extract(groups);
    }
    const auto traces = run.take_layer(y);
    std::size_t direct = 0;
    for (const auto& [i, t] : traces) {
      if (static_cast<int>(t.size()) >= n) {
        run.resolve(i, static_cast<int>(t.size()) == n ? t : run.rec.select(t), "direct");
        ++direct;
      } else {
        run.st[i].pieces.push_back({layer, t});
      }
    }
    std::size_t summed = 0;
    for (std::size_t i = 0; i < run.st.size(); ++i)
      if (!run.st[i].resolved && try_assemble(run, i, n, "sum")) ++summed;
    run.note("layer " + std::to_string(layer) + ": " + std::to_string(traces.size()) + " traces, " +
             std::to_string(direct) + " direct, " + std::to_string(summed) + " by sum");
    while (shrink_round(run, n)) {
    }
  }
  std::size_t open = 0;
  for (const MemberState& m : run.st) open += m.resolved ? 0 : 1;
  run.note("done: " + std::to_string(run.result.selection.assignments.size()) + " selected, " + std::to_string(open) +
           " unresolved");
  return std::move(run.result);
}

ReductionResult reduce_pk_woc(int p, int k, const OracleFamily& fam) {
  const int q = prime_power(p, k);
  const std::size_t minimum = pk_woc_min_family(p, k);
  if (fam.arity() != q) throw PreconditionError("oracle arity does not match p^k");
  if (fam.members.size() < minimum) throw FamilyTooSmall(fam.members.size(), minimum);
  validate_family(fam.members, q);

  Run run(fam, q);
  auto divides = [q](std::size_t m) { return q % static_cast<int>(m) == 0; };
  auto settle = [&](std::size_t i) {
    MemberState& m = run.st[i];
    if (m.resolved) return;
    std::vector<int> sizes;
    std::vector<std::size_t> which;
    for (std::size_t j = 0; j < m.pieces.size(); ++j)
      if (divides(m.pieces[j].elems.size())) {
        sizes.push_back(static_cast<int>(m.pieces[j].elems.size()));
        which.push_back(j);
      }
    const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
    if (total < q) return;
    ElemSet sel;
    if (total == q) {
      for (std::size_t j : which) sel = set_or(sel, m.pieces[j].elems);
    } else {
      for (std::size_t t : subsum_indices(q, sizes)) sel = set_or(sel, m.pieces[which[t]].elems);
    }
    run.resolve(i, std::move(sel), "subsum");
  };

  for (int round = 0;; ++round) {
    const auto open = run.open_with_remainder();
    if (open.empty()) break;
    std::vector<ElemSet> groups;
    for (std::size_t i : open) groups.push_back(run.st[i].remainder);
    const ElemSet y = run.rec.extract(groups);
    for (const auto& [i, t] : run.take_layer(y)) {
      if (static_cast<int>(t.size()) >= q) run.resolve(i, static_cast<int>(t.size()) == q ? t : run.rec.select(t), "direct");
      else run.st[i].pieces.push_back({round, t});
    }
    // Block chunking on pieces whose size does not divide q.
    for (bool changed = true; changed;) {
      changed = false;
      std::set<std::size_t> sizes;
      for (const MemberState& m : run.st)
        if (!m.resolved)
          for (const Piece& pc : m.pieces)
            if (!divides(pc.elems.size())) sizes.insert(pc.elems.size());
      for (std::size_t m : sizes) {
        std::vector<std::pair<std::size_t, std::size_t>> list;  // (member, piece)
        for (std::size_t i = 0; i < run.st.size(); ++i) {
          if (run.st[i].resolved) continue;
          const auto& ps = run.st[i].pieces;
          for (std::size_t j = 0; j < ps.size(); ++j)
            if (ps[j].elems.size() == m) {
              list.push_back({i, j});
              break;
            }
        }
        const std::size_t l = static_cast<std::size_t>(q) / m + 1;
        std::size_t blocks = 0;
        for (std::size_t start = 0; start + l <= list.size(); start += l) {
          ElemSet u;
          for (std::size_t t = start; t < start + l; ++t) u = set_or(u, run.st[list[t].first].pieces[list[t].second].elems);
          const ElemSet g = run.rec.select(u);
          for (std::size_t t = start; t < start + l; ++t) {
            const auto [i, j] = list[t];
            const ElemSet part = set_and(g, run.st[i].pieces[j].elems);
            if (!part.empty() && part.size() < m) {
              run.split(i, j, part);
              changed = true;
            }
          }
          ++blocks;
        }
        if (blocks)
          run.note("round " + std::to_string(round) + ": " + std::to_string(blocks) + " blocks of " + std::to_string(l) +
                   " pieces of size " + std::to_string(m));
        if (changed) break;
      }
    }
    for (std::size_t i = 0; i < run.st.size(); ++i) settle(i);
  }
  std::size_t open = 0;
  for (const MemberState& m : run.st) open += m.resolved ? 0 : 1;
  run.note("done: " + std::to_string(run.result.selection.assignments.size()) + " selected, " + std::to_string(open) +
           " unresolved");
  return std::move(run.result);
}

EdgeGrid build_edge_grid(const std::vector<std::pair<ElemSet, ElemSet>>& traces, int first_edge_id) {
  EdgeGrid grid;
  int next = first_edge_id;
  for (std::size_t g = 0; g < traces.size(); ++g) {
    const auto& [y, z] = traces[g];
    if (y.size() != 3 || z.size() != 2)
      throw PreconditionError("edge grid needs traces of sizes (3, 2), got (" + std::to_string(y.size()) + ", " +
                              std::to_string(z.size()) + ")");
    GridMember m;
    m.member = g;
    m.y = y;
    m.z = z;
    m.rows.assign(y.size(), {});
    m.columns.assign(z.size(), {});
    for (std::size_t a = 0; a < y.size(); ++a)
      for (std::size_t b = 0; b < z.size(); ++b) {
        const int id = next--;
        m.edges.push_back(id);
        m.rows[a].push_back(id);
        m.columns[b].push_back(id);
        grid.edge_owner[id] = {g, y[a], z[b]};
      }
    for (auto& r : m.rows) std::sort(r.begin(), r.end());
    for (auto& c : m.columns) std::sort(c.begin(), c.end());
    m.column_degrees.assign(z.size(), 0);
    grid.members.push_back(std::move(m));
  }
  return grid;
}

void compute_degrees(EdgeGrid& grid, const std::function<ElemSet(const ElemSet&)>& select) {
  for (std::size_t j = 0; j < grid.members.size(); ++j) {
    GridMember& gm = grid.members[j];
    for (std::size_t c = 0; c < gm.columns.size(); ++c) {
      std::size_t deg = 0;
      for (std::size_t i = 0; i < grid.members.size(); ++i) {
        if (i == j) continue;
        const auto& rows = grid.members[i].rows;
        for (std::size_t a = 0; a < rows.size(); ++a)
          for (std::size_t a2 = a + 1; a2 < rows.size(); ++a2) {
            ElemSet f = set_or(rows[a], rows[a2]);
            const ElemSet s = set_or(gm.columns[c], f);
            const ElemSet left = set_minus(s, select(s));
            if (left.size() != 1) throw OracleViolation("edge selection must leave out exactly one edge");
            if (std::binary_search(f.begin(), f.end(), left[0])) ++deg;
          }
      }
      gm.column_degrees[c] = deg;
    }
  }
}

}  // namespace rcw
