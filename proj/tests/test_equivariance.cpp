#include <map>
#include <set>

#include "doctest.h"
#include "rcw/canonical.hpp"
#include "rcw/equivariance.hpp"
#include "rcw/error.hpp"
#include "rcw/group.hpp"
#include "rcw/seven.hpp"
#include "rcw/subgroups.hpp"
#include "test_util.hpp"

using namespace rcw;
using namespace rcw::testing;

namespace {

std::vector<Perm> stabilizer_elements(const PermGroup& g, SubsetCode l) {
  std::vector<Perm> out;
  for (const Perm& p : g.elements())
    if (p.apply(l) == l) out.push_back(p);
  return out;
}

bool brute_invariant_exists(const std::vector<Perm>& stab, SubsetCode l, int k) {
  const auto idx = l.indices();
  bool found = false;
  for_each_k_subset(static_cast<int>(idx.size()), k, [&](SubsetCode local) {
    if (found) return;
    SubsetCode t;
    local.for_each([&](int i) { t = t.with(idx[static_cast<std::size_t>(i)]); });
    found = std::all_of(stab.begin(), stab.end(), [&](const Perm& p) { return p.apply(t) == t; });
  });
  return found;
}

bool brute_sel_exists(const PermGroup& g, int arity) {
  const int d = g.degree();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
    const SubsetCode l(bits);
    if (l.size() <= arity) continue;
    if (!brute_invariant_exists(stabilizer_elements(g, l), l, arity)) return false;
  }
  return true;
}

PermGroup group_of(int degree, std::initializer_list<const char*> gens) {
  std::vector<Perm> ps;
  for (const char* s : gens) ps.push_back(Perm::parse(s, degree));
  return PermGroup::closure(degree, ps);
}

}  // namespace

TEST_CASE("invariant_ksubset matches brute force") {
  for (int d = 2; d <= 5; ++d) {
    for (const PermGroup& g : enumerate_subgroups(d, SubgroupFilter::all)) {
      for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << d); ++bits) {
        const SubsetCode l(bits);
        const PermGroup st = setwise_stabilizer(g, l);
        const auto stab = st.elements();
        for (int k = 1; k < l.size(); ++k) {
          const auto got = invariant_ksubset(st, l, k);
          CHECK(got.has_value() == brute_invariant_exists(stab, l, k));
          if (got) {
            CHECK(got->size() == k);
            CHECK(got->subset_of(l));
            for (const Perm& p : stab) CHECK(p.apply(*got) == *got);
          }
        }
      }
    }
  }
}

TEST_CASE("invariant_ksubset returns the lex-least invariant subset") {
  const PermGroup g = group_of(6, {"(0 1)(2 3)"});
  const SubsetCode l = SubsetCode::full(6);
  CHECK(*invariant_ksubset(g, l, 1) == S({4}));
  CHECK(*invariant_ksubset(g, l, 2) == S({0, 1}));
  CHECK(*invariant_ksubset(g, l, 3) == S({0, 1, 4}));
  CHECK_THROWS_AS(invariant_ksubset(g, l, 0), PreconditionError);
  CHECK_THROWS_AS(invariant_ksubset(g, l, 6), PreconditionError);
}

TEST_CASE("equivariant selection existence matches brute force up to degree 6") {
  for (int d = 2; d <= 6; ++d) {
    for (const PermGroup& g : enumerate_subgroups(d, SubgroupFilter::all)) {
      for (int arity = 1; arity < d; ++arity) {
        const SelExistence ex = equivariant_sel_exists(g, arity);
        INFO("degree ", d, " group ", g.render(), " arity ", arity);
        REQUIRE(ex.exists == brute_sel_exists(g, arity));
        CHECK(ex.failing.has_value() == !ex.exists);
        if (ex.failing) {
          CHECK_FALSE(brute_invariant_exists(stabilizer_elements(g, *ex.failing), *ex.failing, arity));
        }
      }
    }
  }
}

TEST_CASE("built selections are total and equivariant in both transversal orders") {
  for (int d = 3; d <= 6; ++d) {
    for (const PermGroup& g : enumerate_subgroups(d, SubgroupFilter::all)) {
      for (int arity = 1; arity < d; ++arity) {
        if (!equivariant_sel_exists(g, arity).exists) {
          CHECK_THROWS_AS(build_equivariant_sel(g, arity), NoEquivariantSel);
          continue;
        }
        for (Transversal t : {Transversal::forward, Transversal::reversed}) {
          const SelectionStructure s = build_equivariant_sel(g, arity, t);
          CHECK(s.is_total());
          CHECK_NOTHROW(s.validate());
          CHECK(is_equivariant(s, g.elements()));
        }
      }
    }
  }
}

TEST_CASE("orbit representatives are lex-least and cover every subset once") {
  const PermGroup g = group_of(6, {"(0 1 2)(3 4 5)", "(0 3)(1 4)(2 5)"});
  const auto reps = subset_orbit_reps(g, 2, 4);
  std::set<SubsetCode, LexLess> seen;
  for (SubsetCode r : reps) {
    const auto orbit = orbit_of_subset(g, r);
    for (SubsetCode x : orbit) {
      CHECK_FALSE(lex_less(x, r));
      CHECK(seen.insert(x).second);
    }
  }
  CHECK(seen.size() == 15 + 20 + 15);
  CHECK(std::is_sorted(reps.begin(), reps.end(), LexLess{}));
}

TEST_CASE("a transitive cyclic group has no invariant proper subset of the whole domain") {
  const PermGroup c7 = group_of(7, {"(0 1 2 3 4 5 6)"});
  const SelExistence ex = equivariant_sel_exists(c7, 4);
  CHECK_FALSE(ex.exists);
  CHECK(*ex.failing == SubsetCode::full(7));
  // Orbits of sizes 3 and 4 leave the 4-orbit as the only choice on the whole set.
  const PermGroup g = group_of(7, {"(0 1 2)(3 4 5 6)"});
  CHECK(*invariant_ksubset(g, SubsetCode::full(7), 4) == S({3, 4, 5, 6}));
}

TEST_CASE("composed selections have the product arity and stay equivariant") {
  const PermGroup g = group_of(7, {"(0 1)(2 3)"});
  REQUIRE(equivariant_sel_exists(g, 2).exists);
  const SelectionStructure s1 = build_equivariant_sel(g, 2);
  const SelectionStructure s2 = compose_sel(s1, 2);
  CHECK(s2.arity() == 4);
  CHECK(s2.is_total());
  CHECK(is_equivariant(s2, g.elements()));
  for (SubsetCode l : s2.domain_subsets()) {
    const SubsetCode first = s1.at(l);
    CHECK(s2.at(l) == (first | s1.at(l - first)));
  }
}

TEST_CASE("choice existence: a point fixed by each stabilizer") {
  const PermGroup c6 = group_of(6, {"(0 1 2 3 4 5)"});
  // {0,2,4} is stabilized by the rotation of order 3, which fixes none of it.
  const ChoiceExistence ce = equivariant_choice_exists(c6, 3);
  CHECK_FALSE(ce.exists);
  CHECK(ce.failing.has_value());
  const PermGroup c5 = group_of(5, {"(0 1 2 3 4)"});
  CHECK(equivariant_choice_exists(c5, 2).exists);
}

TEST_CASE("seven-point classification over all 81 configurations") {
  // g(l) is a pair inside F \ {l}: three choices for each of the four labels.
  const std::array<int, 4> f{3, 4, 5, 6};
  std::map<SevenCase, int> counts;
  std::set<int> terminal_cases;
  for (int code = 0; code < 81; ++code) {
    std::array<SubsetCode, 4> gv;
    int c = code;
    for (int i = 0; i < 4; ++i) {
      std::vector<int> rest;
      for (int x : f)
        if (x != f[static_cast<std::size_t>(i)]) rest.push_back(x);
      const int drop = c % 3;
      c /= 3;
      rest.erase(rest.begin() + drop);
      gv[static_cast<std::size_t>(i)] = SubsetCode::from_indices(rest);
    }
    const SevenReport r = classify_seven(make_seven_structure(gv));
    ++counts[r.kind];
    CHECK(r.labels == f);
    CHECK(r.g_values == gv);

    // Independent preserving count over Sym(F).
    std::set<Perm> preserving;
    for (const Perm& p : all_perms(4)) {
      std::vector<int> img{0, 1, 2, 3, 4, 5, 6};
      for (int i = 0; i < 4; ++i) img[static_cast<std::size_t>(f[static_cast<std::size_t>(i)])] = f[static_cast<std::size_t>(p(i))];
      const Perm sigma = Perm::from_images(img);
      bool ok = true;
      for (int i = 0; i < 4; ++i)
        ok = ok && gv[static_cast<std::size_t>(p(i))] == sigma.apply(gv[static_cast<std::size_t>(i)]);
      if (ok && !sigma.is_identity()) preserving.insert(sigma);
    }
    CHECK(std::vector<Perm>(preserving.begin(), preserving.end()) == r.preserving);

    SubsetCode common = SubsetCode::from_indices({3, 4, 5, 6});
    for (const Perm& p : preserving) common = common & p.fixed_points();
    if (r.kind == SevenCase::terminal) {
      CHECK(common.empty());
      CHECK(r.terminal_case >= 1);
      CHECK(r.terminal_case <= 4);
      REQUIRE(r.chosen.has_value());
      CHECK(*r.chosen >= 0);
      CHECK(*r.chosen < 7);
      terminal_cases.insert(r.terminal_case);
    } else {
      CHECK(r.kind == SevenCase::fixed_point);
      CHECK(r.fixed_points == common);
      CHECK_FALSE(common.empty());
    }
  }
  CHECK(counts[SevenCase::natural_choice_outside] == 0);
  // Three classes under relabeling of F, of sizes 12, 3 and 6.
  CHECK(counts[SevenCase::terminal] == 21);
  CHECK(terminal_cases == std::set<int>{1, 2, 3});
}

TEST_CASE("terminal cases and their preserving permutations") {
  // labels a, b, c, d = 3, 4, 5, 6; patterns listed as g(a), g(b), g(c), g(d)
  const int a = 3, b = 4, c = 5, d = 6;
  auto P = [](const char* s) { return Perm::parse(s, 7); };
  auto involutions = [](const SevenReport& r) {
    std::vector<Perm> out;
    for (const Perm& p : r.preserving)
      if ((p * p).is_identity()) out.push_back(p);
    return out;
  };

  const SevenReport r1 = classify_seven(make_seven_structure({S({b, d}), S({a, c}), S({a, b}), S({a, b})}));
  CHECK(r1.terminal_case == 1);
  CHECK(r1.preserving == std::vector<Perm>{P("(3 4)(5 6)")});

  const SevenReport r2 = classify_seven(make_seven_structure({S({c, d}), S({c, d}), S({a, b}), S({a, b})}));
  CHECK(r2.terminal_case == 2);
  std::vector<Perm> expect2{P("(3 4)"), P("(5 6)"), P("(3 4)(5 6)"), P("(3 5)(4 6)"), P("(3 6)(4 5)")};
  std::sort(expect2.begin(), expect2.end());
  CHECK(involutions(r2) == expect2);
  // The two 4-cycles (a c b d) and (a d b c) preserve g as well.
  CHECK(r2.preserving.size() == 7);
  CHECK(std::count(r2.preserving.begin(), r2.preserving.end(), P("(3 5 4 6)")) == 1);

  const SevenReport r3 = classify_seven(make_seven_structure({S({b, c}), S({c, d}), S({a, d}), S({a, b})}));
  CHECK(r3.terminal_case == 3);
  CHECK(involutions(r3) == std::vector<Perm>{P("(3 5)(4 6)")});
  // (a b c d) and its inverse preserve g too.
  CHECK(r3.preserving.size() == 3);

  // Pattern 4 is pattern 1 under a -> a, b -> d, c -> b, d -> c.
  const SevenReport r4 = classify_seven(make_seven_structure({S({c, d}), S({a, d}), S({a, d}), S({a, b})}));
  CHECK(r4.terminal_case == 1);
  CHECK(r4.preserving == std::vector<Perm>{P("(3 6)(4 5)")});
}

TEST_CASE("seven-point classification is equivariant") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const SelectionStructure m = random_structure(7, 4, rng);
    const Perm pi = random_perm(7, rng);
    const SevenReport r = classify_seven(m);
    const SevenReport s = classify_seven(m.relabel(pi));
    CHECK(r.kind == s.kind);
    CHECK(r.terminal_case == s.terminal_case);
    CHECK(r.preserving.size() == s.preserving.size());
    CHECK(pi.apply(r.fixed_points) == s.fixed_points);
    CHECK(r.chosen.has_value() == s.chosen.has_value());
    if (r.chosen && s.chosen) CHECK(pi(*r.chosen) == *s.chosen);
  }
  // Terminal structures specifically, under random relabelings.
  const SelectionStructure t = make_seven_structure({S({5, 6}), S({5, 6}), S({3, 4}), S({3, 4})});
  const SevenReport base = classify_seven(t);
  for (int trial = 0; trial < 100; ++trial) {
    const Perm pi = random_perm(7, rng);
    const SevenReport s = classify_seven(t.relabel(pi));
    CHECK(s.terminal_case == 2);
    CHECK(*s.chosen == pi(*base.chosen));
  }
}

TEST_CASE("classification rejects incomplete or wrong-shaped structures") {
  CHECK_THROWS_AS(classify_seven(SelectionStructure(7, 4)), PreconditionError);
  CHECK_THROWS_AS(classify_seven(SelectionStructure::largest_points(6, 4)), PreconditionError);
  CHECK_THROWS_AS(make_seven_structure({S({3}), S({3, 5}), S({3, 4}), S({3, 4})}), PreconditionError);
}

TEST_CASE("equivariant_choose commutes with relabeling") {
  std::mt19937_64 rng(11);
  int chosen_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4 + static_cast<int>(trial % 3);
    const SelectionStructure m = trial % 2 ? random_structure(n, 2, rng) : SelectionStructure::largest_points(n, 2);
    const auto x = equivariant_choose(m);
    CHECK(x.has_value() == !automorphism_group(m).fixed_points().empty());
    if (x) {
      ++chosen_count;
      CHECK(automorphism_group(m).fixed_points().contains(*x));
    }
    for (int j = 0; j < 3; ++j) {
      const Perm pi = random_perm(n, rng);
      const auto y = equivariant_choose(m.relabel(pi));
      REQUIRE(y.has_value() == x.has_value());
      if (x) CHECK(*y == pi(*x));
    }
  }
  CHECK(chosen_count > 0);
}
