#include "rcw/fraisse.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "rcw/canonical.hpp"
#include "rcw/log.hpp"

namespace rcw {

namespace {

using Atoms = std::vector<int>;

std::string render(const Atoms& s) {
  if (s.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out;
}

Atoms parse_atoms(const std::string& tok) {
  Atoms out;
  if (tok == "-") return out;
  std::istringstream in(tok);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw ParseError("bad atom list '" + tok + "'");
    } catch (const std::logic_error&) {
      throw ParseError("bad atom list '" + tok + "'");
    }
  }
  return out;
}

// Visits every t-subset of {0..n-1} in lex order; f returns false to stop.
template <class F>
bool for_each_combination(int n, int t, F&& f) {
  if (t > n) return true;
  Atoms c(static_cast<std::size_t>(t));
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    if (!f(static_cast<const Atoms&>(c))) return false;
    int i = t - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - t + i) --i;
    if (i < 0) return true;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < t; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

template <class F>
bool for_each_subset_of(const Atoms& base, int t, F&& f) {
  Atoms pick(static_cast<std::size_t>(t));
  return for_each_combination(static_cast<int>(base.size()), t, [&](const Atoms& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) pick[i] = base[static_cast<std::size_t>(idx[i])];
    return f(static_cast<const Atoms&>(pick));
  });
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > SIZE_MAX / a) return SIZE_MAX;
  return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b) { return b > SIZE_MAX - a ? SIZE_MAX : a + b; }

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    // r * num / i stays exact because r * num is a multiple of i.
    if (r > SIZE_MAX / num) return SIZE_MAX;
    r = r * num / i;
  }
  return r;
}

std::size_t factorial(std::size_t n) {
  std::size_t r = 1;
  for (std::size_t i = 2; i <= n; ++i) r = saturating_mul(r, i);
  return r;
}

Atoms with_atom(Atoms s, int a) {
  s.insert(std::upper_bound(s.begin(), s.end(), a), a);
  return s;
}

Atoms mapped(const Atoms& s, const std::map<int, int>& f) {
  Atoms out;
  out.reserve(s.size());
  for (int x : s) out.push_back(f.at(x));
  std::sort(out.begin(), out.end());
  return out;
}

// The injective maps from a t-set into {0..t}, in lex order of image lists,
// are the length-t prefixes of the permutations of {0..t}.
template <class F>
void for_each_injection(int t, F&& f) {
  Atoms perm(static_cast<std::size_t>(t) + 1);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const Atoms image(perm.begin(), perm.begin() + t);
    f(image, perm.back());
  } while (std::next_permutation(perm.begin(), perm.end()));
}

void check_atom(const FraisseStage& stage, int a) {
  if (a < 0 || static_cast<std::size_t>(a) >= stage.atoms.size())
    throw DomainError("atom " + std::to_string(a) + " is not in the stage (size " + std::to_string(stage.atoms.size()) +
                      ")");
}

// Selected points of a closure, from the representative.
Atoms closure_sel(const FraisseStage& stage, int a) {
  const FraisseAtom& at = stage.atoms[static_cast<std::size_t>(a)];
  const auto& reps = fraisse_representatives(stage.n, static_cast<int>(at.ground.size()) + 1);
  const SelectionStructure& r = reps.at(at.model);
  const SubsetCode chosen = r.at(SubsetCode::full(r.domain_size()));
  Atoms out;
  for (std::size_t t = 0; t < at.ground.size(); ++t)
    if (chosen.contains(at.image[t])) out.push_back(at.ground[t]);
  if (chosen.contains(at.point)) out.push_back(a);
  return out;
}

std::string type_label(std::size_t ground_size, int n, int excluded_pos) {
  if (static_cast<int>(ground_size) < n) return "plain";
  return "x" + std::to_string(excluded_pos);
}

}  // namespace

const std::vector<SelectionStructure>& fraisse_representatives(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<SelectionStructure>> cache;
  if (n < 1 || m < 1 || m > n + 1) throw PreconditionError("representatives are built for 1 <= m <= n+1");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({n, m});
  if (it != cache.end()) return it->second;
  std::vector<SelectionStructure> reps;
  if (m <= n) {
    reps.emplace_back(m, n);
  } else {
    std::map<std::string, SelectionStructure> seen;
    for (const SelectionStructure& s : enumerate_structures(m, n)) {
      SelectionStructure c = canonical_form(s).structure;
      seen.emplace(c.render(), std::move(c));
    }
    for (auto& [key, s] : seen) reps.push_back(std::move(s));
  }
  return cache.emplace(std::make_pair(n, m), std::move(reps)).first->second;
}

FraisseStage fraisse_start(int n) {
  if (n < 1) throw PreconditionError("arity must be positive");
  FraisseStage s;
  s.n = n;
  return s;
}

std::size_t projected_new_atoms(const FraisseStage& prev) {
  const int s = prev.complete ? prev.index : prev.index - 1;
  const std::size_t fs = prev.sizes.back();
  std::size_t total = 0;
  for (int t = 0; t <= prev.n && static_cast<std::size_t>(t) <= fs; ++t) {
    if (t + 1 > s + 1) break;
    const std::size_t reps = fraisse_representatives(prev.n, t + 1).size();
    const std::size_t per_ground = saturating_mul(reps, factorial(static_cast<std::size_t>(t) + 1));
    total = saturating_add(total, saturating_mul(binomial(fs, static_cast<std::size_t>(t)), per_ground));
  }
  return total;
}

FraisseStage build_stage(const FraisseStage& prev, std::size_t atom_cap) {
  FraisseStage next = prev;
  if (prev.complete) {
    next.index = prev.index + 1;
    next.resume_at = 0;
  }
  next.complete = true;
  const int s = next.index - 1;
  const int fs = static_cast<int>(next.sizes.back());
  const int n = next.n;
  const std::size_t resume = next.resume_at;

  std::size_t l = 0;
  std::size_t ground_index = 0;
  for (int t = 0; t <= n && t <= fs && t + 1 <= s + 1; ++t) {
    const auto& reps = fraisse_representatives(n, t + 1);
    const std::size_t block = reps.size() * factorial(static_cast<std::size_t>(t) + 1);
    const bool finished = for_each_combination(fs, t, [&](const Atoms& a) {
      const std::size_t gi = ground_index++;
      if (l + block <= resume) {
        l += block;
        return true;
      }
      std::size_t emb = 0;
      for (std::size_t k = 0; k < reps.size(); ++k) {
        bool stop = false;
        for_each_injection(t, [&](const Atoms& image, int point) {
          const std::size_t this_l = l++;
          const std::size_t this_emb = emb++;
          if (stop || this_l < resume) return;
          if (next.atoms.size() >= atom_cap) {
            next.complete = false;
            next.resume_at = this_l;
            stop = true;
            return;
          }
          next.atoms.push_back({next.index, a, gi, k, this_emb, image, point});
        });
        if (stop) return false;
      }
      return true;
    });
    if (!finished) {
      log().info("fraisse n={} stage {} cut at {} atoms", n, next.index, next.atoms.size());
      throw PartialStageError("stage " + std::to_string(next.index) + " would exceed the atom cap of " +
                                  std::to_string(atom_cap) + " (" + std::to_string(fs) + " + " +
                                  std::to_string(projected_new_atoms(prev)) + " atoms)",
                              next);
    }
  }
  next.resume_at = 0;
  next.sizes.push_back(next.atoms.size());
  log().debug("fraisse n={} stage {}: {} atoms", n, next.index, next.atoms.size());
  return next;
}

FraisseStage build_stages(int n, int stages, std::size_t atom_cap) {
  FraisseStage s = fraisse_start(n);
  while (s.index < stages) s = build_stage(s, atom_cap);
  return s;
}

const std::vector<int>& ground(const FraisseStage& stage, int atom) {
  check_atom(stage, atom);
  return stage.atoms[static_cast<std::size_t>(atom)].ground;
}

std::vector<int> fraisse_sel(const FraisseStage& stage, const std::vector<int>& x) {
  const int n = stage.n;
  if (static_cast<int>(x.size()) <= n) throw PreconditionError("Sel needs more than n atoms");
  if (!std::is_sorted(x.begin(), x.end()) || std::adjacent_find(x.begin(), x.end()) != x.end())
    throw PreconditionError("Sel input must be sorted without repeats");
  check_atom(stage, x.front());
  check_atom(stage, x.back());
  const int top = x.back();
  const FraisseAtom& at = stage.atoms[static_cast<std::size_t>(top)];
  if (static_cast<int>(x.size()) == n + 1 && static_cast<int>(at.ground.size()) == n &&
      std::equal(at.ground.begin(), at.ground.end(), x.begin()))
    return closure_sel(stage, top);
  return Atoms(x.end() - n, x.end());
}

SelScanReport scan_stage(const FraisseStage& stage, std::size_t window) {
  SelScanReport rep;
  const int n = stage.n;
  for (std::size_t a = 0; a < stage.atoms.size(); ++a) {
    const FraisseAtom& at = stage.atoms[a];
    const std::string who = "atom " + std::to_string(a);
    if (at.stage < 1 || at.stage > stage.index) {
      rep.violations.push_back(who + ": bad stage");
      continue;
    }
    const std::size_t before = stage.sizes.at(static_cast<std::size_t>(at.stage - 1));
    if (a < before) rep.violations.push_back(who + ": created before its stage began");
    if (static_cast<int>(at.ground.size()) > n) rep.violations.push_back(who + ": ground larger than n");
    for (int g : at.ground)
      if (g < 0 || static_cast<std::size_t>(g) >= before) rep.violations.push_back(who + ": ground outside F_{s-1}");
    if (static_cast<int>(at.ground.size()) != n) continue;
    // The recorded embedding must be an isomorphism onto the representative.
    ++rep.closures;
    const SelectionStructure& r = fraisse_representatives(n, n + 1).at(at.model);
    std::map<int, int> to_r;
    for (std::size_t t = 0; t < at.ground.size(); ++t) to_r[at.ground[t]] = at.image[t];
    to_r[static_cast<int>(a)] = at.point;
    const Atoms closure = with_atom(at.ground, static_cast<int>(a));
    const Atoms sel = fraisse_sel(stage, closure);
    SubsetCode img;
    for (int x : sel) img = img.with(to_r.at(x));
    if (img != r.at(SubsetCode::full(n + 1))) rep.violations.push_back(who + ": closure not isomorphic to its model");
  }
  const int w = static_cast<int>(std::min(window, stage.atoms.size()));
  for (int size = n + 1; size <= n + 2; ++size) {
    for_each_combination(w, size, [&](const Atoms& x) {
      ++rep.window_sets;
      const Atoms sel = fraisse_sel(stage, x);
      if (static_cast<int>(sel.size()) != n || !std::includes(x.begin(), x.end(), sel.begin(), sel.end())) {
        rep.violations.push_back("Sel(" + render(x) + ") is not an n-subset");
        return true;
      }
      const FraisseAtom& at = stage.atoms[static_cast<std::size_t>(x.back())];
      const bool closure = size == n + 1 && std::equal(at.ground.begin(), at.ground.end(), x.begin()) &&
                           static_cast<int>(at.ground.size()) == n;
      if (!closure && !std::equal(sel.begin(), sel.end(), x.end() - n))
        rep.violations.push_back("Sel(" + render(x) + ") breaks the n-largest rule");
      return true;
    });
  }
  return rep;
}

std::string extension_type(const FraisseStage& stage, const std::vector<int>& gr, int atom) {
  check_atom(stage, atom);
  if (static_cast<int>(gr.size()) < stage.n) return "plain";
  if (static_cast<int>(gr.size()) > stage.n) throw PreconditionError("ground larger than n");
  if (!gr.empty() && gr.back() >= atom) throw PreconditionError("ground must precede the atom");
  const Atoms x = with_atom(gr, atom);
  const Atoms sel = fraisse_sel(stage, x);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::binary_search(sel.begin(), sel.end(), x[i])) return type_label(gr.size(), stage.n, static_cast<int>(i));
  throw Error("Sel selected every point");
}

ExtensionReport check_extension_property(const FraisseStage& stage) {
  if (stage.index < 1 || !stage.complete) throw PreconditionError("extension check needs a completed stage >= 1");
  const int n = stage.n;
  const int s = stage.index;
  const std::size_t lo = stage.sizes.at(static_cast<std::size_t>(s - 1));
  ExtensionReport rep;
  rep.stage = s;

  std::map<Atoms, std::set<std::string>> realized;
  for (std::size_t a = lo; a < stage.atoms.size(); ++a) {
    const auto& gr = stage.atoms[a].ground;
    realized[gr].insert(extension_type(stage, gr, static_cast<int>(a)));
  }
  for (int t = 0; t <= n && static_cast<std::size_t>(t) <= lo && t + 1 <= s; ++t) {
    // Types a representative of size t+1 offers over a t-set, from R alone.
    std::set<std::string> needed;
    for (const SelectionStructure& r : fraisse_representatives(n, t + 1)) {
      for_each_injection(t, [&](const Atoms& image, int point) {
        if (t < n) {
          needed.insert("plain");
          return;
        }
        const SubsetCode chosen = r.at(SubsetCode::full(t + 1));
        int excluded = 0;
        while (chosen.contains(excluded)) ++excluded;
        if (excluded == point) {
          needed.insert(type_label(static_cast<std::size_t>(t), n, t));
          return;
        }
        // Position of the excluded ground atom in increasing order is its index t'.
        for (int i = 0; i < t; ++i)
          if (image[static_cast<std::size_t>(i)] == excluded) needed.insert(type_label(static_cast<std::size_t>(t), n, i));
      });
    }
    for_each_combination(static_cast<int>(lo), t, [&](const Atoms& a) {
      ++rep.grounds;
      const auto it = realized.find(a);
      for (const std::string& ty : needed) {
        ++rep.types;
        if (it == realized.end() || !it->second.count(ty)) rep.misses.push_back({a, ty});
      }
      return true;
    });
  }
  return rep;
}

namespace {

// Sel is preserved on every X = Y u {a} with Y a subset of `dom` of size n or
// n+1. Larger sets select their n largest atoms, and preservation on all
// (n+2)-sets forces it on them.
bool preserves_with(const FraisseStage& stage, const Atoms& dom, const std::map<int, int>& f, int a) {
  const int n = stage.n;
  for (int t = n; t <= n + 1; ++t) {
    const bool ok = for_each_subset_of(dom, t, [&](const Atoms& y) {
      const Atoms x = with_atom(y, a);
      return mapped(fraisse_sel(stage, x), f) == fraisse_sel(stage, mapped(x, f));
    });
    if (!ok) return false;
  }
  return true;
}

Atoms keys(const std::map<int, int>& f) {
  Atoms out;
  for (const auto& [k, v] : f) out.push_back(k);
  return out;
}

}  // namespace

bool is_partial_isomorphism(const FraisseStage& stage, const std::map<int, int>& iso) {
  std::set<int> range;
  for (const auto& [k, v] : iso) {
    if (k < 0 || v < 0 || static_cast<std::size_t>(k) >= stage.size() || static_cast<std::size_t>(v) >= stage.size())
      return false;
    if (!range.insert(v).second) return false;
  }
  const int n = stage.n;
  const Atoms dom = keys(iso);
  for (int t = n + 1; t <= n + 2; ++t) {
    const bool ok = for_each_subset_of(dom, t, [&](const Atoms& x) {
      return mapped(fraisse_sel(stage, x), iso) == fraisse_sel(stage, mapped(x, iso));
    });
    if (!ok) return false;
  }
  return true;
}

ExtendResult extend_isomorphism(const FraisseStage& stage, const std::map<int, int>& iso, int steps) {
  if (!is_partial_isomorphism(stage, iso)) throw PreconditionError("input map is not an isomorphism of submodels");
  ExtendResult res;
  res.iso = iso;
  std::map<int, int> inv;
  for (const auto& [k, v] : iso) inv[v] = k;
  const int size = static_cast<int>(stage.size());
  auto least_missing = [size](const std::map<int, int>& m) {
    for (int a = 0; a < size; ++a)
      if (!m.count(a)) return a;
    return -1;
  };
  // One step on (f, g = f^-1): pair the least atom outside dom f.
  auto step = [&](std::map<int, int>& f, std::map<int, int>& g) {
    const int a = least_missing(f);
    if (a < 0) return false;
    const Atoms dom = keys(f);
    for (int b = 0; b < size; ++b) {
      if (g.count(b)) continue;
      f[a] = b;
      if (preserves_with(stage, dom, f, a)) {
        g[b] = a;
        return true;
      }
      f.erase(a);
    }
    res.horizon_exhausted = true;
    return false;
  };
  for (int r = 0; r < steps; ++r) {
    if (static_cast<int>(res.iso.size()) == size) break;
    const bool ok = r % 2 == 0 ? step(res.iso, inv) : step(inv, res.iso);
    if (!ok) {
      if (res.horizon_exhausted) break;
      continue;
    }
    ++res.rounds;
  }
  return res;
}

AcfResult acf_demo(const FraisseStage& stage, const std::vector<int>& member, const std::vector<int>& support,
                   std::size_t max_copies) {
  const int n = stage.n;
  Atoms mem = member, sup = support;
  std::sort(mem.begin(), mem.end());
  std::sort(sup.begin(), sup.end());
  for (int x : mem) check_atom(stage, x);
  for (int x : sup) check_atom(stage, x);
  Atoms common;
  std::set_intersection(mem.begin(), mem.end(), sup.begin(), sup.end(), std::back_inserter(common));
  if (!common.empty()) throw PreconditionError("member meets the support");
  if (mem.empty()) throw PreconditionError("member is empty");

  AcfResult res;
  Atoms pool;
  constexpr std::size_t kSearchPool = 256;
  for (int a = 0; a < static_cast<int>(stage.size()) && pool.size() < kSearchPool; ++a)
    if (!std::binary_search(mem.begin(), mem.end(), a) && !std::binary_search(sup.begin(), sup.end(), a)) pool.push_back(a);

  bool found = false;
  for_each_subset_of(pool, n - 1, [&](const Atoms& rp) {
    for (int r0 : pool) {
      if (std::binary_search(rp.begin(), rp.end(), r0)) continue;
      const Atoms ref = with_atom(rp, r0);
      for (int a0 : mem) {
        bool ok = true;
        for (int a : mem) {
          const Atoms sel = fraisse_sel(stage, with_atom(ref, a));
          if (a == a0 ? sel != with_atom(rp, a0) : sel != ref) {
            ok = false;
            break;
          }
        }
        if (ok) {
          res.reference = ref;
          res.r0 = r0;
          res.a0 = a0;
          found = true;
          return false;
        }
      }
    }
    return true;
  });
  if (!found) {
    res.reason = "not realizable at this stage";
    return res;
  }

  // b0 behaves like a0 over R u S u (member \ {a0}).
  Atoms base = res.reference;
  for (int x : sup) base = with_atom(base, x);
  for (int x : mem)
    if (x != res.a0 && !std::binary_search(base.begin(), base.end(), x)) base = with_atom(base, x);
  for (int b0 = 0; b0 < static_cast<int>(stage.size()) && res.copies.size() < max_copies; ++b0) {
    if (b0 == res.a0 || std::binary_search(base.begin(), base.end(), b0) || std::binary_search(mem.begin(), mem.end(), b0))
      continue;
    std::map<int, int> repl;
    for (int x : base) repl[x] = x;
    repl[res.a0] = b0;
    Atoms dom = base;
    if (preserves_with(stage, dom, repl, res.a0)) res.copies.push_back(b0);
  }
  res.realized = !res.copies.empty();
  if (!res.realized) res.reason = "no copy of a0 inside the stage";
  return res;
}

std::string dump_stage(const FraisseStage& stage) {
  std::ostringstream out;
  out << "fraisse n " << stage.n << " stage " << stage.index << " complete " << (stage.complete ? 1 : 0) << " resume "
      << stage.resume_at << "\n";
  out << "sizes";
  for (std::size_t s : stage.sizes) out << ' ' << s;
  out << "\n";
  for (std::size_t a = 0; a < stage.atoms.size(); ++a) {
    const FraisseAtom& at = stage.atoms[a];
    out << "atom " << a << " stage " << at.stage << " ground " << render(at.ground) << " from " << at.ground_index
        << " model " << at.model << " emb " << at.embedding << " image " << render(at.image) << " point " << at.point
        << "\n";
  }
  for (std::size_t a = 0; a < stage.atoms.size(); ++a) {
    const FraisseAtom& at = stage.atoms[a];
    if (static_cast<int>(at.ground.size()) != stage.n) continue;
    const Atoms x = with_atom(at.ground, static_cast<int>(a));
    out << "sel " << render(x) << " " << render(fraisse_sel(stage, x)) << "\n";
  }
  out << "end\n";
  return out.str();
}

FraisseStage load_stage(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto expect = [](std::istringstream& ls, const char* word) {
    std::string w;
    if (!(ls >> w) || w != word) throw ParseError(std::string("expected '") + word + "'");
  };
  FraisseStage st;
  int complete = 1;
  if (!std::getline(in, line)) throw ParseError("empty stage dump");
  {
    std::istringstream ls(line);
    expect(ls, "fraisse");
    expect(ls, "n");
    ls >> st.n;
    expect(ls, "stage");
    ls >> st.index;
    expect(ls, "complete");
    ls >> complete;
    expect(ls, "resume");
    ls >> st.resume_at;
    if (!ls || st.n < 1 || st.index < 0) throw ParseError("bad header");
    st.complete = complete != 0;
  }
  if (!std::getline(in, line)) throw ParseError("missing sizes");
  {
    std::istringstream ls(line);
    expect(ls, "sizes");
    st.sizes.clear();
    std::size_t v;
    while (ls >> v) st.sizes.push_back(v);
    if (st.sizes.empty() || st.sizes.front() != 0) throw ParseError("sizes must start at 0");
  }
  std::vector<std::pair<Atoms, Atoms>> sels;
  bool ended = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "atom") {
      std::size_t id;
      FraisseAtom at;
      std::string g, im;
      ls >> id;
      expect(ls, "stage");
      ls >> at.stage;
      expect(ls, "ground");
      ls >> g;
      expect(ls, "from");
      ls >> at.ground_index;
      expect(ls, "model");
      ls >> at.model;
      expect(ls, "emb");
      ls >> at.embedding;
      expect(ls, "image");
      ls >> im;
      expect(ls, "point");
      ls >> at.point;
      if (!ls || id != st.atoms.size()) throw ParseError("bad atom line: " + line);
      at.ground = parse_atoms(g);
      at.image = parse_atoms(im);
      const int t = static_cast<int>(at.ground.size());
      if (at.image.size() != at.ground.size() || t > st.n || at.point < 0 || at.point > t)
        throw ParseError("inconsistent atom line: " + line);
      if (at.model >= fraisse_representatives(st.n, t + 1).size()) throw ParseError("unknown model in: " + line);
      for (int x : at.ground)
        if (x < 0 || static_cast<std::size_t>(x) >= id) throw ParseError("ground atom out of range in: " + line);
      st.atoms.push_back(std::move(at));
    } else if (kind == "sel") {
      std::string x, y;
      ls >> x >> y;
      if (!ls) throw ParseError("bad sel line: " + line);
      sels.emplace_back(parse_atoms(x), parse_atoms(y));
    } else if (kind == "end") {
      ended = true;
      break;
    } else {
      throw ParseError("unexpected line: " + line);
    }
  }
  if (!ended) throw ParseError("missing end marker");
  if (st.sizes.back() > st.atoms.size() || static_cast<int>(st.sizes.size()) != st.index + (st.complete ? 1 : 0))
    throw ParseError("stage sizes do not match the atoms");
  std::size_t closures = 0;
  for (const auto& at : st.atoms) closures += static_cast<int>(at.ground.size()) == st.n ? 1 : 0;
  if (sels.size() != closures) throw ParseError("closure table has the wrong number of rows");
  for (const auto& [x, y] : sels) {
    if (static_cast<int>(x.size()) != st.n + 1 || fraisse_sel(st, x) != y)
      throw ParseError("closure table row " + render(x) + " does not match the atoms");
  }
  return st;
}

}  // namespace rcw
