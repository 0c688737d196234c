#include "rcw/equivariance.hpp"

#include <algorithm>

namespace rcw {

NoEquivariantSel::NoEquivariantSel(SubsetCode failing)
    : Error("no invariant subset exists for L = {" + failing.render() + "}"), failing_(failing) {}

std::vector<SubsetCode> subset_orbit_reps(const PermGroup& g, int min_size, int max_size) {
  const int d = g.degree();
  if (d > kMaxTableDomain)
    throw BoundExceeded("subset orbit enumeration is limited to " + std::to_string(kMaxTableDomain) + " points");
  std::vector<bool> seen(std::size_t{1} << d, false);
  std::vector<SubsetCode> reps;
  std::vector<SubsetCode> orbit;
  for (std::uint64_t mask = 0; mask < seen.size(); ++mask) {
    const SubsetCode l(mask);
    if (seen[mask] || l.size() < min_size || l.size() > max_size) continue;
    orbit.assign(1, l);
    seen[mask] = true;
    SubsetCode best = l;
    for (std::size_t head = 0; head < orbit.size(); ++head) {
      for (const Perm& s : g.generators()) {
        const SubsetCode next = s.apply(orbit[head]);
        if (seen[next.bits()]) continue;
        seen[next.bits()] = true;
        if (lex_less(next, best)) best = next;
        orbit.push_back(next);
      }
    }
    reps.push_back(best);
  }
  std::sort(reps.begin(), reps.end(), LexLess{});
  return reps;
}

namespace {

// Lex-least union of blocks of total size k. Blocks are sorted by least point,
// so taking a block whenever the rest can still be completed is lex-optimal.
std::optional<SubsetCode> least_block_union(const std::vector<SubsetCode>& blocks, int k,
                                            std::vector<int>* chosen_sizes) {
  const std::size_t b = blocks.size();
  // reach[i] = bitmask of sums achievable with blocks i..b-1.
  std::vector<std::vector<bool>> reach(b + 1, std::vector<bool>(static_cast<std::size_t>(k) + 1, false));
  reach[b][0] = true;
  for (std::size_t i = b; i-- > 0;) {
    const int sz = blocks[i].size();
    for (int t = 0; t <= k; ++t)
      reach[i][static_cast<std::size_t>(t)] =
          reach[i + 1][static_cast<std::size_t>(t)] || (t >= sz && reach[i + 1][static_cast<std::size_t>(t - sz)]);
  }
  if (!reach[0][static_cast<std::size_t>(k)]) return std::nullopt;
  SubsetCode out;
  int remaining = k;
  for (std::size_t i = 0; i < b && remaining > 0; ++i) {
    const int sz = blocks[i].size();
    if (sz <= remaining && reach[i + 1][static_cast<std::size_t>(remaining - sz)]) {
      out = out | blocks[i];
      remaining -= sz;
      if (chosen_sizes) chosen_sizes->push_back(sz);
    }
  }
  return out;
}

std::vector<int> block_sizes(const std::vector<SubsetCode>& blocks) {
  std::vector<int> sizes;
  for (SubsetCode b : blocks) sizes.push_back(b.size());
  return sizes;
}

}  // namespace

std::optional<SubsetCode> invariant_ksubset(const PermGroup& g, SubsetCode l, int k) {
  if (k <= 0 || k >= l.size())
    throw PreconditionError("invariant subset size must satisfy 0 < k < |L|, got k = " + std::to_string(k) +
                            " for |L| = " + std::to_string(l.size()));
  return least_block_union(orbits_on_points(g, l), k, nullptr);
}

SelExistence equivariant_sel_exists(const PermGroup& g, int arity) {
  if (arity < 1 || g.degree() <= arity)
    throw PreconditionError("equivariant selection needs 1 <= arity < degree");
  SelExistence out;
  out.exists = true;
  for (SubsetCode rep : subset_orbit_reps(g, arity + 1, g.degree())) {
    const PermGroup stab = setwise_stabilizer(g, rep);
    const auto blocks = orbits_on_points(stab, rep);
    OrbitEntry entry{rep, block_sizes(blocks), std::nullopt, std::nullopt};
    std::vector<int> chosen;
    if (auto s = least_block_union(blocks, arity, &chosen)) {
      entry.chosen_blocks = std::move(chosen);
      entry.selected = *s;
    } else if (out.exists) {
      out.exists = false;
      out.failing = rep;
    }
    out.certificate.orbit_reps.push_back(std::move(entry));
  }
  return out;
}

SelectionStructure build_equivariant_sel(const PermGroup& g, int arity, Transversal order) {
  const SelExistence ex = equivariant_sel_exists(g, arity);
  if (!ex.exists) throw NoEquivariantSel(*ex.failing);
  SelectionStructure sel(g.degree(), arity);
  const auto& elems = g.elements();
  for (const OrbitEntry& e : ex.certificate.orbit_reps) {
    auto place = [&](const Perm& p) {
      const SubsetCode target = p.apply(e.rep);
      if (!sel.is_set(target)) sel.set(target, p.apply(*e.selected));
    };
    if (order == Transversal::forward)
      std::for_each(elems.begin(), elems.end(), place);
    else
      std::for_each(elems.rbegin(), elems.rend(), place);
  }
  return sel;
}

ChoiceExistence equivariant_choice_exists(const PermGroup& g, int m) {
  if (m < 1 || m > g.degree()) throw PreconditionError("choice size must satisfy 1 <= m <= degree");
  for (SubsetCode rep : subset_orbit_reps(g, m, m)) {
    if ((setwise_stabilizer(g, rep).fixed_points() & rep).empty()) return {false, rep};
  }
  return {true, std::nullopt};
}

SelectionStructure compose_sel(const SelectionStructure& m, int k) {
  const int n = m.arity();
  if (k < 1 || k * n > m.domain_size() - 1)
    throw DomainError("composed arity " + std::to_string(k * n) + " must be at most domain size - 1 = " +
                      std::to_string(m.domain_size() - 1));
  SelectionStructure out(m.domain_size(), k * n);
  for (SubsetCode l : out.domain_subsets()) {
    SubsetCode rest = l;
    SubsetCode acc;
    for (int i = 0; i < k; ++i) {
      const SubsetCode s = m.at(rest);
      acc = acc | s;
      rest = rest - s;
    }
    out.set(l, acc);
  }
  return out;
}

}  // namespace rcw
