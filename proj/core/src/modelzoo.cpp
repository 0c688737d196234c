#include "rcw/modelzoo.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>

#include "json.hpp"
#include "rcw/log.hpp"

namespace rcw {

namespace {

using json = nlohmann::json;

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// The prime p if q = p^a with a >= 1, else 0.
int prime_base(int q) {
  if (q < 2) return 0;
  int p = 2;
  while (q % p != 0) ++p;
  while (q % p == 0) q /= p;
  return q == 1 ? p : 0;
}

SubsetCode block_mask(const ZooBlock& b) { return SubsetCode(SubsetCode::full(b.size).bits() << b.first); }

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

// --- components of fix(E) ---------------------------------------------------

enum class CompKind { cyclic, fixed, sym };

struct Component {
  CompKind kind;
  std::vector<int> atoms;  // cyclic: in cycle order
};

std::vector<Component> components(const ZooModel& m, SubsetCode e) {
  std::vector<Component> out;
  Component fixed{CompKind::fixed, {}};
  for (const ZooBlock& b : m.blocks) {
    const SubsetCode bm = block_mask(b);
    if (m.kind == ZooKind::bfm) {
      Component sym{CompKind::sym, {}};
      for (int a : bm.indices()) (e.contains(a) ? fixed.atoms : sym.atoms).push_back(a);
      if (!sym.atoms.empty()) out.push_back(std::move(sym));
    } else if (!(bm & e).empty()) {
      for (int a : bm.indices()) fixed.atoms.push_back(a);
    } else {
      out.push_back({CompKind::cyclic, bm.indices()});
    }
  }
  std::sort(fixed.atoms.begin(), fixed.atoms.end());
  if (!fixed.atoms.empty()) out.push_back(std::move(fixed));
  return out;
}

// Rotations of Z_q preserving a q-bit pattern.
std::vector<int> rotation_stabilizer(std::uint64_t pattern, int q) {
  const std::uint64_t full = (std::uint64_t{1} << q) - 1;
  std::vector<int> out;
  for (int r = 0; r < q; ++r) {
    const std::uint64_t rot = r == 0 ? pattern : (((pattern << r) | (pattern >> (q - r))) & full);
    if (rot == pattern) out.push_back(r);
  }
  return out;
}

std::vector<SubsetCode> component_orbits(const Component& c, SubsetCode l) {
  std::vector<SubsetCode> out;
  if (c.kind == CompKind::fixed) {
    for (int a : c.atoms)
      if (l.contains(a)) out.push_back(SubsetCode::singleton(a));
  } else if (c.kind == CompKind::sym) {
    SubsetCode part;
    for (int a : c.atoms)
      if (l.contains(a)) part = part.with(a);
    if (!part.empty()) out.push_back(part);
  } else {
    const int q = static_cast<int>(c.atoms.size());
    std::uint64_t pattern = 0;
    for (int i = 0; i < q; ++i)
      if (l.contains(c.atoms[static_cast<std::size_t>(i)])) pattern |= std::uint64_t{1} << i;
    const std::vector<int> rots = rotation_stabilizer(pattern, q);
    std::uint64_t seen = 0;
    for (int i = 0; i < q; ++i) {
      if (!((pattern >> i) & 1U) || ((seen >> i) & 1U)) continue;
      SubsetCode orbit;
      for (int r : rots) {
        const int j = (i + r) % q;
        seen |= std::uint64_t{1} << j;
        orbit = orbit.with(c.atoms[static_cast<std::size_t>(j)]);
      }
      out.push_back(orbit);
    }
  }
  return out;
}

// One way a set can meet a component: the multiset of stabilizer orbit
// sizes, one realizing subset and how many subsets share the multiset.
struct Option {
  std::vector<int> orbits;
  int total = 0;
  SubsetCode rep;
  std::uint64_t count = 0;
};

const std::vector<Option>& cyclic_patterns(int q) {
  // Options on positions 0..q-1; callers map them onto atoms.
  static std::mutex mu;
  static std::map<int, std::vector<Option>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  if (q > 20) throw BoundExceeded("cyclic block of size " + std::to_string(q) + " is above 20");
  std::map<std::pair<int, int>, Option> by_shape;  // (|S|, orbit size)
  for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << q); ++pat) {
    const int s = std::popcount(pat);
    const int d = s == 0 ? 1 : static_cast<int>(rotation_stabilizer(pat, q).size());
    auto [pos, fresh] = by_shape.try_emplace({s, d});
    Option& o = pos->second;
    if (fresh) {
      o.orbits.assign(static_cast<std::size_t>(s / d), d);
      o.total = s;
      o.rep = SubsetCode(pat);
    }
    ++o.count;
  }
  std::vector<Option> out;
  for (auto& [k, o] : by_shape) out.push_back(std::move(o));
  return cache.emplace(q, std::move(out)).first->second;
}

std::vector<Option> options_for(const Component& c) {
  std::vector<Option> out;
  const int f = static_cast<int>(c.atoms.size());
  if (c.kind == CompKind::cyclic) {
    for (const Option& o : cyclic_patterns(f)) {
      Option mapped = o;
      SubsetCode rep;
      o.rep.for_each([&](int i) { rep = rep.with(c.atoms[static_cast<std::size_t>(i)]); });
      mapped.rep = rep;
      out.push_back(std::move(mapped));
    }
    return out;
  }
  for (int k = 0; k <= f; ++k) {
    Option o;
    o.total = k;
    if (c.kind == CompKind::fixed) o.orbits.assign(static_cast<std::size_t>(k), 1);
    else if (k > 0) o.orbits = {k};
    for (int i = 0; i < k; ++i) o.rep = o.rep.with(c.atoms[static_cast<std::size_t>(i)]);
    o.count = binom(f, k);
    out.push_back(std::move(o));
  }
  return out;
}

std::uint64_t add_sums(std::uint64_t bits, const std::vector<int>& orbits, std::uint64_t mask) {
  for (int s : orbits) bits |= (bits << s) & mask;
  return bits;
}

// Least-size set of more than n atoms whose orbit sizes cannot sum to n.
std::optional<SubsetCode> nrc_failure(const std::vector<Component>& comps, int n) {
  const std::uint64_t mask = (std::uint64_t{1} << (n + 1)) - 1;
  const std::uint64_t goal = std::uint64_t{1} << n;
  using Key = std::pair<int, std::uint64_t>;  // (size, sums)
  std::vector<std::vector<Option>> opts;
  for (const Component& c : comps) opts.push_back(options_for(c));
  std::vector<std::map<Key, std::pair<Key, std::size_t>>> layers(comps.size() + 1);
  layers[0][{0, 1}] = {{0, 0}, 0};
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (const auto& [key, back] : layers[i]) {
      const auto [size, bits] = key;
      for (std::size_t o = 0; o < opts[i].size(); ++o) {
        const Option& op = opts[i][o];
        // Past n points only the empty option can keep a failure minimal.
        if (size > n && op.total > 0) continue;
        const std::uint64_t nb = add_sums(bits, op.orbits, mask);
        if (nb & goal) continue;
        layers[i + 1].try_emplace({size + op.total, nb}, key, o);
      }
    }
  }
  for (const auto& [key, back] : layers.back()) {
    if (key.first <= n) continue;
    SubsetCode l;
    Key k = key;
    for (std::size_t i = comps.size(); i-- > 0;) {
      const auto& [prev, o] = layers[i + 1].at(k);
      l = l | opts[i][o].rep;
      k = prev;
    }
    return l;
  }
  return std::nullopt;
}

// An n-set with no fixed point, i.e. every stabilizer orbit longer than 1.
std::optional<SubsetCode> choice_failure(const std::vector<Component>& comps, int n) {
  std::vector<std::vector<Option>> opts;
  for (const Component& c : comps) {
    std::vector<Option> keep;
    for (Option& o : options_for(c))
      if (std::none_of(o.orbits.begin(), o.orbits.end(), [](int s) { return s == 1; })) keep.push_back(std::move(o));
    opts.push_back(std::move(keep));
  }
  std::vector<std::map<int, std::pair<int, std::size_t>>> layers(comps.size() + 1);
  layers[0][0] = {0, 0};
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (const auto& [size, back] : layers[i])
      for (std::size_t o = 0; o < opts[i].size(); ++o) {
        const int ns = size + opts[i][o].total;
        if (ns <= n) layers[i + 1].try_emplace(ns, size, o);
      }
  if (n < 1 || !layers.back().count(n)) return std::nullopt;
  SubsetCode l;
  int k = n;
  for (std::size_t i = comps.size(); i-- > 0;) {
    const auto& [prev, o] = layers[i + 1].at(k);
    l = l | opts[i][o].rep;
    k = prev;
  }
  return l;
}

// Number of (n+1)-sets with an invariant n-subset.
std::uint64_t count_selectable(const std::vector<Component>& comps, int n) {
  const std::uint64_t mask = (std::uint64_t{1} << (n + 1)) - 1;
  std::map<std::pair<int, std::uint64_t>, std::uint64_t> cur{{{0, 1}, 1}};
  for (const Component& c : comps) {
    std::map<std::pair<int, std::uint64_t>, std::uint64_t> next;
    for (const auto& [key, cnt] : cur)
      for (const Option& o : options_for(c)) {
        const int ns = key.first + o.total;
        if (ns > n + 1) continue;
        next[{ns, add_sums(key.second, o.orbits, mask)}] += cnt * o.count;
      }
    cur = std::move(next);
  }
  std::uint64_t total = 0;
  for (const auto& [key, cnt] : cur)
    if (key.first == n + 1 && ((key.second >> n) & 1U)) total += cnt;
  return total;
}

// --- support enumeration ----------------------------------------------------

// Blocks untouched by the base support, grouped into interchangeable types.
struct KillPlan {
  std::vector<std::vector<int>> types;  // per type: candidate kill atoms in order
};

KillPlan kill_plan(const ZooModel& m) {
  KillPlan plan;
  if (m.kind == ZooKind::bfm) {
    std::vector<int> free;
    for (int a = 0; a < m.atom_count; ++a)
      if (!m.support.contains(a)) free.push_back(a);
    // Any atom of the pool is as good as another.
    for (int a : free) plan.types.push_back({a});
    if (!plan.types.empty()) {
      std::vector<int> all;
      for (auto& t : plan.types) all.push_back(t[0]);
      plan.types = {all};
    }
    return plan;
  }
  std::map<std::pair<int, int>, std::size_t> index;  // (size, line) -> type
  for (const ZooBlock& b : m.blocks) {
    if (!(block_mask(b) & m.support).empty()) continue;
    const std::pair<int, int> key{b.size, b.line.value_or(-1)};
    auto [it, fresh] = index.try_emplace(key, plan.types.size());
    if (fresh) plan.types.emplace_back();
    plan.types[it->second].push_back(b.first);
  }
  return plan;
}

// Every kill vector with total at most budget, by total then lexicographically.
void for_each_kill(const KillPlan& plan, int budget, const std::function<bool(SubsetCode)>& f) {
  const std::size_t t = plan.types.size();
  for (int total = 0; total <= budget; ++total) {
    std::vector<int> counts(t, 0);
    std::function<bool(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i == t) {
        if (left != 0) return true;
        SubsetCode e;
        for (std::size_t j = 0; j < t; ++j)
          for (int k = 0; k < counts[j]; ++k) e = e.with(plan.types[j][static_cast<std::size_t>(k)]);
        return f(e);
      }
      const int cap = std::min<int>(left, static_cast<int>(plan.types[i].size()));
      for (int c = 0; c <= cap; ++c) {
        counts[i] = c;
        if (!rec(i + 1, left - c)) return false;
      }
      counts[i] = 0;
      return true;
    };
    if (!rec(0, total)) return;
  }
}

std::vector<ZooModel> lines_of(const ZooModel& m) {
  if (m.kind != ZooKind::vlines) return {m};
  std::map<int, ZooModel> by_line;
  for (const ZooBlock& b : m.blocks) {
    auto [it, fresh] = by_line.try_emplace(*b.line, m);
    if (fresh) it->second.blocks.clear();
    it->second.blocks.push_back(b);
  }
  std::vector<ZooModel> out;
  for (auto& [k, line] : by_line) out.push_back(std::move(line));
  return out;
}

ZooModel shrink(const ZooModel& m) {
  ZooModel s = m;
  if (m.kind == ZooKind::bfm) {
    if (m.atom_count < 2) throw PreconditionError("model too small to shrink");
    s.atom_count -= 1;
    s.blocks[0].size -= 1;
  } else {
    if (m.blocks.size() < 2) throw PreconditionError("model too small to shrink");
    s.atom_count -= s.blocks.back().size;
    s.blocks.pop_back();
  }
  s.support = s.support & SubsetCode::full(s.atom_count);
  return s;
}

std::string describe(const ZooModel& m, SubsetCode w) {
  if (m.kind == ZooKind::bfm) return std::to_string(w.size()) + " atoms outside E";
  std::vector<std::string> parts;
  for (const ZooBlock& b : m.blocks) {
    const int meet = (block_mask(b) & w).size();
    if (meet == 0) continue;
    parts.push_back(meet == b.size ? "a full block of size " + std::to_string(b.size)
                                   : std::to_string(meet) + " of a block of size " + std::to_string(b.size));
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + ", all outside E";
}

}  // namespace

std::string zoo_kind_name(ZooKind k) {
  switch (k) {
    case ZooKind::vfin: return "vfin";
    case ZooKind::vlines: return "vlines";
    case ZooKind::bfm: return "bfm";
  }
  return "?";
}

ZooKind parse_zoo_kind(std::string_view name) {
  if (name == "vfin") return ZooKind::vfin;
  if (name == "vlines") return ZooKind::vlines;
  if (name == "bfm") return ZooKind::bfm;
  throw ParseError("unknown model '" + std::string(name) + "'");
}

std::string zoo_principle_name(ZooPrinciple p) {
  switch (p) {
    case ZooPrinciple::nrc_fin: return "nrc_fin";
    case ZooPrinciple::c_n: return "c_n";
    case ZooPrinciple::ncfin_minus: return "ncfin_minus";
    case ZooPrinciple::rc: return "rc";
  }
  return "?";
}

ZooPrinciple parse_zoo_principle(std::string_view name) {
  if (name == "nrc_fin") return ZooPrinciple::nrc_fin;
  if (name == "c_n") return ZooPrinciple::c_n;
  if (name == "ncfin_minus") return ZooPrinciple::ncfin_minus;
  if (name == "rc") return ZooPrinciple::rc;
  throw ParseError("unknown principle '" + std::string(name) + "'");
}

std::vector<Perm> ZooModel::generators() const {
  std::vector<Perm> out;
  for (const ZooBlock& b : blocks) {
    if (kind == ZooKind::bfm) {
      const std::vector<int> free = (block_mask(b) - support).indices();
      for (std::size_t i = 0; i < free.size(); ++i)
        for (std::size_t j = i + 1; j < free.size(); ++j) out.push_back(Perm::from_cycles(atom_count, {{free[i], free[j]}}));
    } else if ((block_mask(b) & support).empty() && b.size > 1) {
      out.push_back(Perm::from_cycles(atom_count, {block_mask(b).indices()}));
    }
  }
  return out;
}

PermGroup ZooModel::group(std::size_t cap) const { return PermGroup::closure(atom_count, generators(), cap); }

ZooModel make_model(ZooKind kind, const ZooParams& params, int cap, SubsetCode support) {
  if (cap < 1 || cap > kZooAtomCap) throw PreconditionError("atom cap must lie in 1..64");
  ZooModel m;
  m.kind = kind;
  auto over = [&](int atoms) {
    throw BoundExceeded(zoo_kind_name(kind) + " needs " + std::to_string(atoms) + " atoms, cap is " + std::to_string(cap));
  };
  if (kind == ZooKind::vfin) {
    if (params.blocks < 0) throw PreconditionError("negative block count");
    int p = 2;
    for (int i = 0; params.blocks == 0 || i < params.blocks; ++i) {
      while (!is_prime(p)) ++p;
      if (m.atom_count + p > cap) {
        if (params.blocks == 0) break;
        over(m.atom_count + p);
      }
      m.blocks.push_back({m.atom_count, p, std::nullopt, std::nullopt});
      m.atom_count += p;
      ++p;
    }
    if (m.blocks.empty()) over(2);
  } else if (kind == ZooKind::vlines) {
    if (params.line_sizes.empty()) throw PreconditionError("vlines needs at least one line size");
    std::vector<int> primes;
    int per_round = 0;
    for (int q : params.line_sizes) {
      const int p = prime_base(q);
      if (p == 0) throw PreconditionError(std::to_string(q) + " is not a prime power");
      if (std::find(primes.begin(), primes.end(), p) != primes.end()) throw PreconditionError("line primes must be distinct");
      primes.push_back(p);
      per_round += q;
    }
    const int b = params.blocks_per_line > 0 ? params.blocks_per_line : cap / per_round;
    if (b < 1 || b * per_round > cap) over(std::max(b, 1) * per_round);
    for (std::size_t line = 0; line < params.line_sizes.size(); ++line)
      for (int pos = 0; pos < b; ++pos) {
        m.blocks.push_back({m.atom_count, params.line_sizes[line], static_cast<int>(line), pos});
        m.atom_count += params.line_sizes[line];
      }
  } else {
    if (params.atoms < 1) throw PreconditionError("bfm needs at least one atom");
    if (params.atoms > cap) over(params.atoms);
    m.blocks.push_back({0, params.atoms, std::nullopt, std::nullopt});
    m.atom_count = params.atoms;
  }
  if (!support.subset_of(SubsetCode::full(m.atom_count))) throw PreconditionError("support lies outside the atoms");
  m.support = support;
  return m;
}

std::string model_to_json(const ZooModel& m) {
  json j;
  j["name"] = zoo_kind_name(m.kind);
  j["atom_count"] = m.atom_count;
  j["support"] = m.support.indices();
  json blocks = json::array();
  for (const ZooBlock& b : m.blocks) {
    json jb;
    jb["first"] = b.first;
    jb["size"] = b.size;
    jb["line"] = b.line ? json(*b.line) : json(nullptr);
    jb["position"] = b.position ? json(*b.position) : json(nullptr);
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  return j.dump(2) + "\n";
}

ZooModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    ZooModel m;
    m.kind = parse_zoo_kind(j.at("name").get<std::string>());
    m.atom_count = j.at("atom_count").get<int>();
    if (m.atom_count < 1 || m.atom_count > kZooAtomCap) throw ParseError("atom_count outside 1..64");
    int next = 0;
    for (const json& jb : j.at("blocks")) {
      ZooBlock b;
      b.first = jb.at("first").get<int>();
      b.size = jb.at("size").get<int>();
      if (jb.contains("line") && !jb.at("line").is_null()) b.line = jb.at("line").get<int>();
      if (jb.contains("position") && !jb.at("position").is_null()) b.position = jb.at("position").get<int>();
      if (b.first != next || b.size < 1) throw ParseError("blocks must tile the atoms in order");
      if (m.kind == ZooKind::vfin && !is_prime(b.size)) throw ParseError("vfin blocks must have prime size");
      if (m.kind == ZooKind::vlines && (prime_base(b.size) == 0 || !b.line))
        throw ParseError("vlines blocks need a prime-power size and a line");
      next += b.size;
      m.blocks.push_back(b);
    }
    if (next != m.atom_count) throw ParseError("blocks do not cover atom_count");
    if (m.kind == ZooKind::bfm && m.blocks.size() != 1) throw ParseError("bfm has a single block");
    std::vector<int> sup = j.at("support").get<std::vector<int>>();
    for (int a : sup)
      if (a < 0 || a >= m.atom_count) throw ParseError("support atom out of range");
    m.support = SubsetCode::from_indices(sup);
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model descriptor: ") + e.what());
  }
}

std::vector<SubsetCode> stabilizer_orbits(const ZooModel& m, SubsetCode l, SubsetCode extra_support) {
  if (!l.subset_of(SubsetCode::full(m.atom_count))) throw PreconditionError("set lies outside the atoms");
  std::vector<SubsetCode> out;
  for (const Component& c : components(m, m.support | extra_support))
    for (SubsetCode o : component_orbits(c, l)) out.push_back(o);
  std::sort(out.begin(), out.end(), [](SubsetCode a, SubsetCode b) { return a.min_element() < b.min_element(); });
  return out;
}

ZooVerdict evaluate(const ZooModel& m, ZooPrinciple p, int n, int e_max) {
  if (n < 1 || n > 24) throw PreconditionError("n must lie in 1..24");
  if (e_max < 0) throw PreconditionError("negative support budget");
  ZooVerdict v;
  v.model = zoo_kind_name(m.kind);
  v.principle = p;
  v.n = n;
  v.e_max = e_max;
  const int budget = e_max - m.support.size();
  if (budget < 0) throw PreconditionError("the model's own support exceeds the budget");

  if (p == ZooPrinciple::ncfin_minus) {
    const ZooModel small = shrink(m);
    for_each_kill(kill_plan(small), budget, [&](SubsetCode e) {
      ++v.supports_tested;
      const std::uint64_t lo = count_selectable(components(small, small.support | e), n);
      const std::uint64_t hi = count_selectable(components(m, m.support | e), n);
      if (v.supports_tested == 1 || hi > lo) {
        v.count_small = lo;
        v.count_large = hi;
        v.support = m.support | e;
      }
      v.holds_at_bound = hi > lo;
      return !v.holds_at_bound;
    });
    v.witness_template = v.holds_at_bound ? "" : "selectable (n+1)-sets do not grow with the instance for any E";
    return v;
  }

  // rc: a union of at least half the blocks on whose n-subsets choice works.
  auto rc_failure = [&](SubsetCode e) -> std::optional<SubsetCode> {
    const auto comps = components(m, m.support | e);
    std::vector<std::size_t> blocks;
    for (std::size_t i = 0; i < m.blocks.size(); ++i) blocks.push_back(i);
    const std::size_t need = (m.blocks.size() + 1) / 2;
    std::optional<SubsetCode> first;
    // Blocks of one size and line are interchangeable: choose how many of each.
    std::map<std::pair<int, int>, std::vector<SubsetCode>> kinds;
    for (const ZooBlock& b : m.blocks) kinds[{b.size, b.line.value_or(-1)}].push_back(block_mask(b));
    std::vector<std::vector<SubsetCode>> groups;
    for (auto& [k, masks] : kinds) groups.push_back(masks);
    std::vector<std::size_t> take(groups.size(), 0);
    bool found_good = false;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t count) {
      if (found_good) return;
      if (i == groups.size()) {
        if (count < need) return;
        // Prefer blocks already fixed by E so they cost nothing.
        SubsetCode y;
        for (std::size_t g = 0; g < groups.size(); ++g) {
          std::vector<SubsetCode> order = groups[g];
          std::stable_sort(order.begin(), order.end(), [&](SubsetCode a, SubsetCode b) {
            return !(a & (m.support | e)).empty() && (b & (m.support | e)).empty();
          });
          for (std::size_t k = 0; k < take[g]; ++k) y = y | order[k];
        }
        std::vector<Component> sub;
        for (const Component& c : comps) {
          Component r{c.kind, {}};
          for (int a : c.atoms)
            if (y.contains(a)) r.atoms.push_back(a);
          if (!r.atoms.empty() && (r.kind != CompKind::cyclic || r.atoms.size() == c.atoms.size())) sub.push_back(r);
        }
        const auto bad = choice_failure(sub, n);
        if (!bad) found_good = true;
        else if (!first) first = bad;
        return;
      }
      for (std::size_t t = 0; t <= groups[i].size(); ++t) {
        take[i] = t;
        rec(i + 1, count + t);
      }
    };
    rec(0, 0);
    if (found_good) return std::nullopt;
    return first;
  };

  for_each_kill(kill_plan(m), budget, [&](SubsetCode e) {
    ++v.supports_tested;
    const SubsetCode full_e = m.support | e;
    std::optional<SubsetCode> bad;
    if (p == ZooPrinciple::nrc_fin) {
      // One line at a time: a large subset of the atoms may keep to a single line.
      for (const ZooModel& line : lines_of(m)) {
        bad = nrc_failure(components(line, full_e), n);
        if (bad) break;
      }
    }
    else if (p == ZooPrinciple::c_n) bad = choice_failure(components(m, full_e), n);
    else bad = rc_failure(e);
    if (!bad) {
      v.holds_at_bound = true;
      v.support = full_e;
      v.witnesses.clear();
      return false;
    }
    if (e.empty()) v.witness = *bad;
    v.witnesses.emplace_back(full_e, *bad);
    return true;
  });
  if (!v.holds_at_bound)
    v.witness_template = "for every support E with |E| <= " + std::to_string(e_max) + ": " + describe(m, v.witness);
  log().debug("zoo {} {}({}) e_max={}: {} after {} supports", v.model, zoo_principle_name(p), n, e_max,
              v.holds_at_bound ? "holds" : "fails", v.supports_tested);
  return v;
}

std::optional<Certificate> zoo_certificate(const ZooModel& m, const ZooVerdict& v) {
  if (v.holds_at_bound || v.witness.empty() || v.principle == ZooPrinciple::ncfin_minus) return std::nullopt;
  // Domain: the witness plus every free block it meets.
  SubsetCode domain = v.witness;
  if (m.kind != ZooKind::bfm)
    for (const ZooBlock& b : m.blocks)
      if (!(block_mask(b) & v.witness).empty() && (block_mask(b) & m.support).empty()) domain = domain | block_mask(b);
  if (domain.size() > 24) return std::nullopt;
  const std::vector<int> atoms = domain.indices();
  auto local = [&](int a) { return static_cast<int>(std::lower_bound(atoms.begin(), atoms.end(), a) - atoms.begin()); };
  const int d = static_cast<int>(atoms.size());

  Certificate c;
  c.claim.kind = ClaimKind::zoo_failure;
  c.claim.model = v.model;
  c.claim.principle = zoo_principle_name(v.principle);
  c.claim.n = v.n;
  c.domain_size = d;
  if (m.kind == ZooKind::bfm) {
    const std::vector<int> free = (v.witness - m.support).indices();
    for (std::size_t i = 0; i + 1 < free.size(); ++i)
      c.group_generators.push_back(Perm::from_cycles(d, {{local(free[i]), local(free[i + 1])}}).to_string());
  } else {
    for (const ZooBlock& b : m.blocks) {
      const SubsetCode bm = block_mask(b);
      if (!bm.subset_of(domain) || !(bm & m.support).empty() || b.size < 2) continue;
      std::vector<int> cyc;
      for (int a : bm.indices()) cyc.push_back(local(a));
      c.group_generators.push_back(Perm::from_cycles(d, {cyc}).to_string());
    }
  }
  SubsetCode target;
  v.witness.for_each([&](int a) { target = target.with(local(a)); });
  c.target_set = target;
  c.support_template = v.witness_template;
  return c;
}

PartialSelection bfm_partial_choice(const ZooModel& m, const std::vector<SubsetCode>& family, SubsetCode support) {
  PartialSelection sel;
  sel.k = 1;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (SubsetCode o : stabilizer_orbits(m, family[i], support)) {
      if (o.size() == 1) {
        sel.assignments[i] = ElemSet{o.min_element()};
        break;
      }
    }
  }
  return sel;
}

}  // namespace rcw
