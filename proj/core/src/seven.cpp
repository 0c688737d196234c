#include "rcw/seven.hpp"

#include <algorithm>
#include <numeric>

#include "rcw/canonical.hpp"
#include "rcw/error.hpp"

namespace rcw {

namespace {

constexpr int kPoints = 7;

SubsetCode require_entry(const SelectionStructure& m, SubsetCode l) {
  if (!m.is_set(l)) throw PreconditionError("table entry for {" + l.render() + "} is missing");
  return m.at(l);
}

// g(T) = (S \ T) \ table(S \ T)
SubsetCode g_of(const SelectionStructure& m, SubsetCode t) {
  const SubsetCode rest = SubsetCode::full(kPoints) - t;
  return rest - require_entry(m, rest);
}

// Terminal patterns over local labels a,b,c,d = 0..3, listed as g(a..d),
// with the distinguished double transposition as two pairs.
struct Pattern {
  int g[4][2];
  int pairs[2][2];
};

constexpr Pattern kPatterns[4] = {
    {{{1, 3}, {0, 2}, {0, 1}, {0, 1}}, {{0, 1}, {2, 3}}},
    {{{2, 3}, {2, 3}, {0, 1}, {0, 1}}, {{0, 1}, {2, 3}}},
    {{{1, 2}, {2, 3}, {0, 3}, {0, 1}}, {{0, 2}, {1, 3}}},
    {{{2, 3}, {0, 3}, {0, 3}, {0, 1}}, {{0, 3}, {1, 2}}},
};

}  // namespace

SevenReport classify_seven(const SelectionStructure& m) {
  if (m.domain_size() != kPoints || m.arity() != 4)
    throw PreconditionError("classify_seven needs an arity-4 structure on 7 points");
  SevenReport r;
  const SubsetCode full = SubsetCode::full(kPoints);
  const SubsetCode f = require_entry(m, full);
  const auto f_pts = f.indices();
  std::copy(f_pts.begin(), f_pts.end(), r.labels.begin());
  const SubsetCode outside = full - f;

  // Local index of each label.
  std::array<int, kPoints> local{};
  local.fill(-1);
  for (int i = 0; i < 4; ++i) local[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])] = i;

  for (int i = 0; i < 4; ++i)
    r.g_values[static_cast<std::size_t>(i)] = g_of(m, SubsetCode::singleton(r.labels[static_cast<std::size_t>(i)]));
  for (SubsetCode v : r.g_values) {
    if (!(v & outside).empty()) {
      r.kind = SevenCase::natural_choice_outside;
      return r;
    }
  }

  // Local g as bitmasks over 0..3.
  std::array<unsigned, 4> g_local{};
  for (int i = 0; i < 4; ++i)
    r.g_values[static_cast<std::size_t>(i)].for_each(
        [&](int x) { g_local[static_cast<std::size_t>(i)] |= 1U << local[static_cast<std::size_t>(x)]; });
  auto map_mask = [](const std::array<int, 4>& s, unsigned mask) {
    unsigned out = 0;
    for (int i = 0; i < 4; ++i)
      if ((mask >> i) & 1U) out |= 1U << s[static_cast<std::size_t>(i)];
    return out;
  };
  auto to_domain = [&](const std::array<int, 4>& s) {
    std::vector<int> img(kPoints);
    std::iota(img.begin(), img.end(), 0);
    for (int i = 0; i < 4; ++i)
      img[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])] =
          r.labels[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
    return Perm::from_images(img);
  };

  std::array<int, 4> s{0, 1, 2, 3};
  unsigned moved_by_all = 0xF;  // points of F fixed by every preserving map
  do {
    bool preserves = true;
    for (int i = 0; i < 4 && preserves; ++i)
      preserves = g_local[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])] ==
                  map_mask(s, g_local[static_cast<std::size_t>(i)]);
    if (!preserves) continue;
    for (int i = 0; i < 4; ++i)
      if (s[static_cast<std::size_t>(i)] != i) moved_by_all &= ~(1U << i);
    const Perm p = to_domain(s);
    if (!p.is_identity()) r.preserving.push_back(p);
  } while (std::next_permutation(s.begin(), s.end()));
  std::sort(r.preserving.begin(), r.preserving.end());
  for (int i = 0; i < 4; ++i)
    if ((moved_by_all >> i) & 1U) r.fixed_points = r.fixed_points.with(r.labels[static_cast<std::size_t>(i)]);
  if (!r.fixed_points.empty()) {
    r.kind = SevenCase::fixed_point;
    return r;
  }

  r.kind = SevenCase::terminal;
  for (std::size_t c = 0; c < std::size(kPatterns) && r.terminal_case == 0; ++c) {
    std::array<int, 4> tau{0, 1, 2, 3};
    do {
      bool match = true;
      for (int i = 0; i < 4 && match; ++i) {
        const auto& pg = kPatterns[c].g[i];
        const unsigned pattern_mask = (1U << pg[0]) | (1U << pg[1]);
        match = g_local[static_cast<std::size_t>(tau[static_cast<std::size_t>(i)])] == map_mask(tau, pattern_mask);
      }
      if (!match) continue;
      r.terminal_case = static_cast<int>(c) + 1;
      SubsetCode u;
      for (const auto& pair : kPatterns[c].pairs) {
        const SubsetCode t =
            SubsetCode::from_indices({r.labels[static_cast<std::size_t>(tau[static_cast<std::size_t>(pair[0])])],
                                      r.labels[static_cast<std::size_t>(tau[static_cast<std::size_t>(pair[1])])]});
        u = u | g_of(m, t);
      }
      r.chosen = u.size() == 1 ? u.min_element() : g_of(m, u).min_element();
      break;
    } while (std::next_permutation(tau.begin(), tau.end()));
  }
  if (r.terminal_case == 0) throw Error("fixed-point-free preserving group outside the four terminal patterns");
  return r;
}

SelectionStructure make_seven_structure(const std::array<SubsetCode, 4>& g_values) {
  SelectionStructure m = SelectionStructure::largest_points(kPoints, 4);
  const SubsetCode full = SubsetCode::full(kPoints);
  for (int i = 0; i < 4; ++i) {
    const int l = 3 + i;
    const SubsetCode rest = full.without(l);
    const SubsetCode g = g_values[static_cast<std::size_t>(i)];
    if (g.size() != 2 || !g.subset_of(rest))
      throw PreconditionError("g value {" + g.render() + "} is not a pair avoiding " + std::to_string(l));
    m.set(rest, rest - g);
  }
  return m;
}

std::optional<int> equivariant_choose(const SelectionStructure& m) {
  const CanonicalForm cf = canonical_form(m);
  const SubsetCode fixed = automorphism_group(cf.structure).fixed_points();
  if (fixed.empty()) return std::nullopt;
  return cf.relabeling.inverse()(fixed.min_element());
}

}  // namespace rcw
