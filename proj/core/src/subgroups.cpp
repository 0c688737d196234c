#include "rcw/subgroups.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <mutex>
#include <numeric>
#include <optional>
#include <limits>
#include <set>
#include <unordered_set>

#include "rcw/error.hpp"

namespace rcw {

namespace {

// Sym(n) with permutations indexed by lexicographic rank of their image list.
// Products use a packed 3-bit-per-point image word, so n <= 8 here.
class SymTable {
 public:
  explicit SymTable(int n) : n_(n) {
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 0);
    do {
      perms_.push_back(Perm::from_images(img));
      packed_.push_back(pack(perms_.back()));
    } while (std::next_permutation(img.begin(), img.end()));
    const Perm t = n >= 2 ? Perm::from_cycles(n, {{0, 1}}) : Perm::identity(n);
    std::vector<int> cyc(static_cast<std::size_t>(n));
    std::iota(cyc.begin(), cyc.end(), 0);
    const Perm c = n >= 2 ? Perm::from_cycles(n, {cyc}) : Perm::identity(n);
    inverse_.resize(size());
    odd_.resize(size());
    prime_power_.resize(size());
    conj_gens_ = {std::vector<std::uint32_t>(size()), std::vector<std::uint32_t>(size())};
    for (std::uint32_t r = 0; r < size(); ++r) {
      const Perm& p = perms_[r];
      inverse_[r] = rank_of(pack(p.inverse()));
      const auto cycles = p.cycles();
      std::size_t transpositions = 0;
      for (const auto& cyc : cycles) transpositions += cyc.size() - 1;
      odd_[r] = static_cast<std::uint8_t>(transpositions & 1U);
      std::size_t order = 1;
      for (const auto& cyc : cycles) order = std::lcm(order, cyc.size());
      std::size_t q = order;
      std::size_t prime = 0;
      for (std::size_t f = 2; f <= q; ++f)
        if (q % f == 0) {
          prime = f;
          break;
        }
      while (prime != 0 && q % prime == 0) q /= prime;
      prime_power_[r] = static_cast<std::uint8_t>(q == 1 ? 1 : 0);
      conj_gens_[0][r] = rank_of(pack(t * p * t.inverse()));
      conj_gens_[1][r] = rank_of(pack(c * p * c.inverse()));
    }
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(perms_.size()); }
  const Perm& perm(std::uint32_t r) const { return perms_[r]; }
  std::uint32_t inverse(std::uint32_t r) const { return inverse_[r]; }
  bool odd(std::uint32_t r) const { return odd_[r] != 0; }
  /// Order is a prime power (the identity included).
  bool prime_power(std::uint32_t r) const { return prime_power_[r] != 0; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return rank_of(compose(packed_[a], packed_[b]));
  }
  std::uint32_t conj(std::uint32_t c, std::uint32_t x) const {
    return rank_of(compose(compose(packed_[c], packed_[x]), packed_[inverse_[c]]));
  }
  const std::array<std::vector<std::uint32_t>, 2>& conj_gens() const { return conj_gens_; }

 private:
  std::uint32_t pack(const Perm& p) const {
    std::uint32_t w = 0;
    for (int i = 0; i < n_; ++i) w |= static_cast<std::uint32_t>(p(i)) << (3 * i);
    return w;
  }
  // (p*q)(x) = p(q(x))
  std::uint32_t compose(std::uint32_t p, std::uint32_t q) const {
    std::uint32_t w = 0;
    for (int i = 0; i < n_; ++i) {
      const std::uint32_t qi = (q >> (3 * i)) & 7U;
      w |= ((p >> (3 * qi)) & 7U) << (3 * i);
    }
    return w;
  }
  // Lehmer rank: lexicographic position of the image list.
  std::uint32_t rank_of(std::uint32_t w) const {
    std::uint32_t r = 0;
    std::uint32_t unused = (1U << n_) - 1;
    for (int i = 0; i < n_; ++i) {
      const std::uint32_t x = (w >> (3 * i)) & 7U;
      r = r * static_cast<std::uint32_t>(n_ - i) +
          static_cast<std::uint32_t>(std::popcount(unused & ((1U << x) - 1)));
      unused &= ~(1U << x);
    }
    return r;
  }

  int n_;
  std::vector<Perm> perms_;
  std::vector<std::uint32_t> packed_;
  std::vector<std::uint32_t> inverse_;
  std::vector<std::uint8_t> odd_;
  std::vector<std::uint8_t> prime_power_;
  std::array<std::vector<std::uint32_t>, 2> conj_gens_;
};

struct SetKey {
  std::uint64_t a;
  std::uint64_t b;
  std::size_t order;
  bool operator==(const SetKey&) const = default;
};

struct SetKeyHash {
  std::size_t operator()(const SetKey& k) const noexcept {
    return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ULL) ^ k.order);
  }
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Enumerator {
 public:
  explicit Enumerator(int n) : n_(n), sym_(n), mark_(sym_.size(), 0), in_h_(sym_.size(), 0) {
    salt_a_.resize(sym_.size());
    salt_b_.resize(sym_.size());
    for (std::uint32_t r = 0; r < sym_.size(); ++r) {
      salt_a_[r] = mix(r);
      salt_b_[r] = mix(r ^ 0x5bd1e995ULL);
    }
  }

  std::vector<PermGroup> run() {
    register_class({0});
    for (std::size_t head = 0; head < reps_.size(); ++head) extend(head);
    std::vector<PermGroup> out;
    out.reserve(reps_.size());
    for (const auto& elems : reps_) {
      std::vector<Perm> perms;
      perms.reserve(elems.size());
      for (std::uint32_t r : elems) perms.push_back(sym_.perm(r));
      out.push_back(PermGroup::from_elements(n_, std::move(perms)));
    }
    return out;
  }

 private:
  // Elements of <H, g> as a union of right cosets H*r (Dimino's method);
  // only coset representatives need to be multiplied by generators.
  std::vector<std::uint32_t> close(const std::vector<std::uint32_t>& h, const std::vector<std::uint32_t>& h_gens,
                                   std::uint32_t g) {
    ++stamp_;
    std::vector<std::uint32_t> elems = h;
    for (std::uint32_t x : h) mark_[x] = stamp_;
    std::vector<std::uint32_t> gens = h_gens;
    gens.push_back(g);
    // For n >= 5 the only subgroups of index < n are Sym(n) and Alt(n), so
    // past that size the result is determined by the generators' parity.
    const std::size_t small_index_bound = n_ >= 5 ? sym_.size() / static_cast<std::uint32_t>(n_) : sym_.size();
    bool any_odd = false;
    for (std::uint32_t x : gens) any_odd = any_odd || sym_.odd(x);
    std::vector<std::uint32_t> reps{0};
    for (std::size_t pos = 0; pos < reps.size(); ++pos) {
      if (elems.size() > small_index_bound) {
        elems.clear();
        for (std::uint32_t r = 0; r < sym_.size(); ++r)
          if (any_odd || !sym_.odd(r)) elems.push_back(r);
        return elems;
      }
      for (std::uint32_t s : gens) {
        const std::uint32_t y = sym_.mul(reps[pos], s);
        if (mark_[y] == stamp_) continue;
        reps.push_back(y);
        for (std::uint32_t x : h) {
          const std::uint32_t e = sym_.mul(x, y);
          mark_[e] = stamp_;
          elems.push_back(e);
        }
      }
    }
    return elems;
  }

  static std::vector<std::uint32_t> greedy_generators(const SymTable& sym, std::vector<std::uint32_t> sorted) {
    std::vector<std::uint32_t> gens;
    std::set<std::uint32_t> generated{0};
    for (std::uint32_t e : sorted) {
      if (generated.contains(e)) continue;
      gens.push_back(e);
      std::vector<std::uint32_t> queue(generated.begin(), generated.end());
      for (std::size_t h = 0; h < queue.size(); ++h)
        for (std::uint32_t s : gens) {
          const std::uint32_t y = sym.mul(s, queue[h]);
          if (generated.insert(y).second) queue.push_back(y);
        }
    }
    return gens;
  }

  // Order-independent fingerprint of an element set.
  SetKey key_of(const std::vector<std::uint32_t>& elems) const {
    SetKey k{0, 0, elems.size()};
    for (std::uint32_t r : elems) {
      k.a += salt_a_[r];
      k.b ^= salt_b_[r];
    }
    return k;
  }

  static std::uint32_t least_nonidentity(const std::vector<std::uint32_t>& elems) {
    std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
    for (std::uint32_t r : elems)
      if (r != 0 && r < m) m = r;
    return m;
  }

  // Records every conjugate of `elems` and stores the lex-least one as the
  // class representative. No-op if the class is already known.
  void register_class(std::vector<std::uint32_t> elems) {
    if (known_.contains(key_of(elems))) return;
    std::sort(elems.begin(), elems.end());
    std::vector<std::uint32_t> best = elems;
    std::uint32_t best_lead = least_nonidentity(best);
    std::vector<std::vector<std::uint32_t>> queue{elems};
    known_.insert(key_of(elems));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const auto& table : sym_.conj_gens()) {
        std::vector<std::uint32_t> next;
        next.reserve(queue[head].size());
        for (std::uint32_t r : queue[head]) next.push_back(table[r]);
        if (!known_.insert(key_of(next)).second) continue;
        // Sorted lists all start with the identity, so the least other
        // element decides most comparisons without sorting.
        const std::uint32_t lead = least_nonidentity(next);
        if (lead < best_lead) {
          best = next;
          std::sort(best.begin(), best.end());
          best_lead = lead;
        } else if (lead == best_lead) {
          std::vector<std::uint32_t> sorted = next;
          std::sort(sorted.begin(), sorted.end());
          if (sorted < best) best = std::move(sorted);
        }
        queue.push_back(std::move(next));
      }
      queue[head].clear();
      queue[head].shrink_to_fit();
    }
    reps_.push_back(std::move(best));
  }

  void extend(std::size_t index) {
    const std::vector<std::uint32_t> h = reps_[index];
    const std::vector<std::uint32_t> h_gens = greedy_generators(sym_, h);
    std::fill(in_h_.begin(), in_h_.end(), 0);
    for (std::uint32_t r : h) in_h_[r] = 1;

    // Normalizer in Sym(n), by direct test on H's generators.
    std::vector<std::uint32_t> normalizer;
    for (std::uint32_t c = 0; c < sym_.size(); ++c) {
      bool normalizes = true;
      for (std::uint32_t s : h_gens) {
        if (!in_h_[sym_.conj(c, s)]) {
          normalizes = false;
          break;
        }
      }
      if (normalizes) normalizer.push_back(c);
    }
    const std::vector<std::uint32_t> n_gens = greedy_generators(sym_, normalizer);

    // <H, g> is constant on H-cosets and moves by conjugation under N(H).
    std::vector<std::uint8_t> done(in_h_);
    for (std::uint32_t g = 0; g < sym_.size(); ++g) {
      if (done[g]) continue;
      std::vector<std::uint32_t> orbit{g};
      done[g] = 1;
      // Every subgroup is generated by its elements of prime-power order, so
      // if K = <H, x> has H maximal, some such element of K outside H also
      // generates it together with H. Orbits without one can be skipped.
      std::optional<std::uint32_t> generator;
      for (std::size_t head = 0; head < orbit.size(); ++head) {
        const std::uint32_t x = orbit[head];
        if (!generator && sym_.prime_power(x)) generator = x;
        auto visit = [&](std::uint32_t y) {
          if (!done[y]) {
            done[y] = 1;
            orbit.push_back(y);
          }
        };
        // <H, g> = <H, hg> = <H, g^-1>; conjugation by N(H) maps it to a
        // conjugate subgroup.
        for (std::uint32_t s : h_gens) visit(sym_.mul(s, x));
        visit(sym_.inverse(x));
        for (std::uint32_t c : n_gens) visit(sym_.conj(c, x));
      }
      if (generator) register_class(close(h, h_gens, *generator));
    }
  }

  int n_;
  SymTable sym_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint8_t> in_h_;
  std::vector<std::uint64_t> salt_a_;
  std::vector<std::uint64_t> salt_b_;
  std::unordered_set<SetKey, SetKeyHash> known_;
  std::vector<std::vector<std::uint32_t>> reps_;
};

void sort_groups(std::vector<PermGroup>& groups) {
  std::vector<std::pair<std::size_t, std::string>> keys;
  std::vector<std::size_t> idx(groups.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (const auto& g : groups) keys.emplace_back(g.order(), g.render());
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<PermGroup> out;
  out.reserve(groups.size());
  for (std::size_t i : idx) out.push_back(std::move(groups[i]));
  groups = std::move(out);
}

const std::vector<PermGroup>& all_classes(int degree) {
  static std::array<std::once_flag, kMaxSubgroupDegree + 1> flags;
  static std::array<std::vector<PermGroup>, kMaxSubgroupDegree + 1> cache;
  const auto d = static_cast<std::size_t>(degree);
  std::call_once(flags[d], [&] {
    auto groups = Enumerator(degree).run();
    sort_groups(groups);
    cache[d] = std::move(groups);
  });
  return cache[d];
}

void check_degree(int degree, int cap) {
  if (degree < 1 || degree > cap)
    throw BoundExceeded("subgroup enumeration supports degree 1.." + std::to_string(cap) + ", got " +
                        std::to_string(degree));
}

std::vector<PermGroup> apply_filter(const std::vector<PermGroup>& groups, SubgroupFilter filter) {
  std::vector<PermGroup> out;
  for (const auto& g : groups) {
    switch (filter) {
      case SubgroupFilter::all:
        out.push_back(g);
        break;
      case SubgroupFilter::fixed_point_free:
        if (g.is_fixed_point_free()) out.push_back(g);
        break;
      case SubgroupFilter::minimal_fixed_point_free:
        if (is_minimal_fixed_point_free(g)) out.push_back(g);
        break;
    }
  }
  return out;
}

void partitions(int remaining, int max_part, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    current.push_back(p);
    partitions(remaining - p, p, current, out);
    current.pop_back();
  }
}

}  // namespace

SubgroupFilter parse_subgroup_filter(std::string_view text) {
  if (text == "all") return SubgroupFilter::all;
  if (text == "fixed_point_free" || text == "fpf") return SubgroupFilter::fixed_point_free;
  if (text == "minimal_fixed_point_free" || text == "minimal") return SubgroupFilter::minimal_fixed_point_free;
  throw ParseError("unknown subgroup filter '" + std::string(text) + "'");
}

std::vector<PermGroup> enumerate_subgroups(int degree, SubgroupFilter filter) {
  check_degree(degree, kMaxSubgroupDegree);
  return apply_filter(all_classes(degree), filter);
}

std::size_t subgroup_class_count(int degree) {
  check_degree(degree, kMaxSubgroupDegree);
  return all_classes(degree).size();
}

std::vector<PermGroup> enumerate_cyclic_subgroups(int degree, SubgroupFilter filter) {
  check_degree(degree, kMaxCyclicDegree);
  std::vector<std::vector<int>> parts;
  std::vector<int> current;
  partitions(degree, degree, current, parts);
  std::vector<PermGroup> groups;
  for (const auto& part : parts) {
    std::vector<std::vector<int>> cycles;
    int next = 0;
    for (int len : part) {
      std::vector<int> cyc(static_cast<std::size_t>(len));
      std::iota(cyc.begin(), cyc.end(), next);
      next += len;
      if (len > 1) cycles.push_back(std::move(cyc));
    }
    groups.push_back(PermGroup::closure(degree, {Perm::from_cycles(degree, cycles)}));
  }
  sort_groups(groups);
  return apply_filter(groups, filter);
}

bool is_minimal_fixed_point_free(const PermGroup& g) {
  if (!g.is_fixed_point_free()) return false;
  const int n = g.degree();
  // Cyclic subgroups first: cheap and usually decisive.
  for (const Perm& x : g.elements()) {
    if (x.is_identity()) continue;
    const PermGroup c = PermGroup::closure(n, {x});
    if (c.order() < g.order() && c.is_fixed_point_free()) return false;
  }
  // Grow subgroups that still fix a point; any fixed-point-free proper
  // subgroup is reached through such a chain.
  std::set<std::vector<Perm>> seen;
  std::vector<PermGroup> queue{PermGroup(n)};
  seen.insert(queue.front().elements());
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const PermGroup current = queue[head];
    for (const Perm& x : g.elements()) {
      if (current.contains(x)) continue;
      std::vector<Perm> gens = current.generators();
      gens.push_back(x);
      PermGroup next = PermGroup::closure(n, gens);
      if (next.order() == g.order()) continue;
      if (!seen.insert(next.elements()).second) continue;
      if (next.is_fixed_point_free()) return false;
      queue.push_back(std::move(next));
    }
  }
  return true;
}

}  // namespace rcw
