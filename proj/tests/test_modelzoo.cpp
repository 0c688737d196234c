#include "doctest.h"

#include <map>
#include <thread>

#include "rcw/modelzoo.hpp"
#include "rcw/verify.hpp"
#include "test_util.hpp"

using namespace rcw;
using rcw::testing::S;

namespace {

template <class F>
void k_subsets_of(SubsetCode set, int k, F&& f) {
  const std::vector<int> idx = set.indices();
  for_each_k_subset(static_cast<int>(idx.size()), k, [&](SubsetCode pick) {
    SubsetCode out;
    pick.for_each([&](int i) { out = out.with(idx[static_cast<std::size_t>(i)]); });
    f(out);
  });
}

ZooModel vfin(int blocks, SubsetCode support = {}) {
  ZooParams p;
  p.blocks = blocks;
  return make_model(ZooKind::vfin, p, kZooAtomCap, support);
}

ZooModel vlines(std::vector<int> sizes, int per_line = 0, SubsetCode support = {}) {
  ZooParams p;
  p.line_sizes = std::move(sizes);
  p.blocks_per_line = per_line;
  return make_model(ZooKind::vlines, p, kZooAtomCap, support);
}

ZooModel bfm(int atoms, SubsetCode support = {}) {
  ZooParams p;
  p.atoms = atoms;
  return make_model(ZooKind::bfm, p, kZooAtomCap, support);
}

// Brute force over the closed group: an L of more than n atoms whose
// setwise stabilizer leaves no n-subset of L invariant.
// For vlines each line is scanned on its own.
bool brute_nrc_fails(const ZooModel& m, int n) {
  const PermGroup g = m.group();
  std::map<int, SubsetCode> lines;
  for (const ZooBlock& b : m.blocks)
    for (int a = b.first; a < b.first + b.size; ++a) lines[b.line.value_or(0)] = lines[b.line.value_or(0)].with(a);
  for (const auto& [line, x] : lines)
    for (std::uint64_t bits = 0; bits <= x.bits(); ++bits) {
      const SubsetCode l(bits);
      if (l.size() <= n || !l.subset_of(x)) continue;
    const PermGroup st = setwise_stabilizer(g, l);
    bool found = false;
    k_subsets_of(l, n, [&](SubsetCode s) {
      if (found) return;
      found = std::all_of(st.elements().begin(), st.elements().end(), [&](const Perm& p) { return p.apply(s) == s; });
    });
      if (!found) return true;
    }
  return false;
}

// An n-set whose stabilizer has no fixed point in it.
bool brute_choice_fails(const ZooModel& m, int n) {
  const PermGroup g = m.group();
  bool bad = false;
  k_subsets_of(SubsetCode::full(m.atom_count), n, [&](SubsetCode l) {
    if (bad) return;
    const SubsetCode fixed = setwise_stabilizer(g, l).fixed_points();
    bad = (fixed & l).empty();
  });
  return bad;
}

}  // namespace

TEST_CASE("model construction examples") {
  const ZooModel v = vfin(3);
  REQUIRE(v.blocks.size() == 3);
  CHECK(v.blocks[0].size == 2);
  CHECK(v.blocks[1].size == 3);
  CHECK(v.blocks[2].size == 5);
  CHECK(v.atom_count == 10);
  CHECK(v.group().order() == 30);

  CHECK(bfm(6).group().order() == 720);

  const ZooModel l = vlines({4, 3}, 2);
  CHECK(l.blocks.size() == 4);
  CHECK(l.atom_count == 14);
  const auto gens = l.generators();
  REQUIRE(gens.size() == 4);
  SubsetCode moved;
  for (const Perm& p : gens) {
    SubsetCode mine;
    for (int a = 0; a < l.atom_count; ++a)
      if (p.apply(SubsetCode::singleton(a)) != SubsetCode::singleton(a)) mine = mine.with(a);
    CHECK((mine & moved).empty());
    moved = moved | mine;
  }
  CHECK(moved.size() == 14);
  CHECK(l.blocks[0].line == 0);
  CHECK(l.blocks[3].line == 1);
  CHECK(l.blocks[3].position == 1);

  // Filling to the cap: 2+3+5+7+11+13+17 = 58 and the next prime overflows.
  CHECK(vfin(0).blocks.size() == 7);
  CHECK(vfin(0).atom_count == 58);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(vfin(8), BoundExceeded);
  CHECK_THROWS_AS(bfm(65), BoundExceeded);
  CHECK_THROWS_AS(make_model(ZooKind::bfm, ZooParams{0, {}, 0, 70}, 70), PreconditionError);
  CHECK_THROWS_AS(vlines({6}), PreconditionError);
  CHECK_THROWS_AS(vlines({2, 4}), PreconditionError);
  CHECK_THROWS_AS(vlines({4, 3}, 10), BoundExceeded);
  CHECK_THROWS_AS(vfin(2, S({7})), PreconditionError);
  CHECK_THROWS_AS(parse_zoo_kind("vfinn"), ParseError);
  CHECK_THROWS_AS(parse_zoo_principle("nrc"), ParseError);
}

TEST_CASE("support drops generators that touch it") {
  const ZooModel v = vfin(3, S({3}));
  CHECK(v.generators().size() == 2);
  CHECK(v.group().order() == 10);
  const ZooModel b = bfm(5, S({0, 1}));
  CHECK(b.group().order() == 6);
  CHECK((b.group().fixed_points() & S({0, 1})) == S({0, 1}));
}

TEST_CASE("stabilizer orbits agree with the closed group") {
  std::mt19937_64 rng(7);
  const std::vector<ZooModel> models = {vfin(3), vfin(3, S({2})), vlines({4}, 3), vlines({4, 3}, 1, S({4})),
                                        bfm(6), bfm(6, S({5}))};
  for (const ZooModel& m : models) {
    const PermGroup g = m.group();
    for (int trial = 0; trial < 200; ++trial) {
      const SubsetCode l(rng() & SubsetCode::full(m.atom_count).bits());
      auto expect = orbits_on_points(setwise_stabilizer(g, l), l);
      std::sort(expect.begin(), expect.end(), [](SubsetCode a, SubsetCode b) { return a.min_element() < b.min_element(); });
      CHECK(stabilizer_orbits(m, l) == expect);
    }
  }
}

TEST_CASE("fixed-support verdicts match a brute-force scan") {
  const std::vector<ZooModel> models = {vfin(3), vfin(3, S({0})), vfin(3, S({5})), vlines({4}, 3), vlines({2, 3}, 2),
                                        vlines({4}, 3, S({0})), bfm(7), bfm(7, S({0, 1}))};
  for (const ZooModel& m : models) {
    const int budget = m.support.size();
    for (int n = 1; n <= 6; ++n) {
      CAPTURE(model_to_json(m));
      CAPTURE(n);
      const ZooVerdict nrc = evaluate(m, ZooPrinciple::nrc_fin, n, budget);
      CHECK(nrc.supports_tested == 1);
      CHECK(nrc.holds_at_bound == !brute_nrc_fails(m, n));
      const ZooVerdict cn = evaluate(m, ZooPrinciple::c_n, n, budget);
      CHECK(cn.holds_at_bound == !brute_choice_fails(m, n));
    }
  }
}

TEST_CASE("vfin: choice holds and nrc_fin fails for n <= 7") {
  const ZooModel v = vfin(6);
  for (int n = 1; n <= 7; ++n) {
    CAPTURE(n);
    const ZooVerdict c = evaluate(v, ZooPrinciple::c_n, n);
    CHECK(c.holds_at_bound);
    CHECK(evaluate(v, ZooPrinciple::rc, n).holds_at_bound);
    const ZooVerdict r = evaluate(v, ZooPrinciple::nrc_fin, n);
    CHECK_FALSE(r.holds_at_bound);
    CHECK(r.witnesses.size() == r.supports_tested);
    for (const auto& [e, w] : r.witnesses) {
      CHECK((e & w).empty());
      CHECK(w.size() > n);
    }
  }
  // nrc_fin(3): the witness for empty support is the whole block of size 5.
  const ZooVerdict r3 = evaluate(v, ZooPrinciple::nrc_fin, 3);
  CHECK(r3.witness == SubsetCode(SubsetCode::full(5).bits() << 5));
  CHECK(stabilizer_orbits(v, r3.witness).size() == 1);
  CHECK(r3.witness_template.find("full block of size 5") != std::string::npos);
}

TEST_CASE("vfin c_n(2) needs the 2-block in the support") {
  const ZooModel v = vfin(6);
  CHECK_FALSE(evaluate(v, ZooPrinciple::c_n, 2, 0).holds_at_bound);
  const ZooVerdict c = evaluate(v, ZooPrinciple::c_n, 2, 4);
  REQUIRE(c.holds_at_bound);
  CHECK_FALSE((c.support & S({0, 1})).empty());
}

TEST_CASE("vlines nrc_fin follows divisibility") {
  for (int q : {2, 3, 4}) {
    const ZooModel m = vlines({q});
    for (int n = 1; n <= 12; ++n) {
      CAPTURE(q);
      CAPTURE(n);
      CHECK(evaluate(m, ZooPrinciple::nrc_fin, n).holds_at_bound == (n % q == 0));
    }
  }
  const ZooModel four = vlines({4});
  CHECK_FALSE(evaluate(four, ZooPrinciple::nrc_fin, 2).holds_at_bound);
  CHECK_FALSE(evaluate(four, ZooPrinciple::nrc_fin, 3).holds_at_bound);
  CHECK(evaluate(four, ZooPrinciple::nrc_fin, 4).holds_at_bound);
  CHECK(evaluate(four, ZooPrinciple::nrc_fin, 8).holds_at_bound);
}

TEST_CASE("vlines with two lines needs the product") {
  const ZooModel m = vlines({2, 3});
  for (int n = 1; n <= 12; ++n) {
    CAPTURE(n);
    CHECK(evaluate(m, ZooPrinciple::nrc_fin, n).holds_at_bound == (n % 6 == 0));
  }
}

TEST_CASE("bfm nrc_fin fails for n <= 6") {
  const ZooModel b = bfm(12);
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    const ZooVerdict r = evaluate(b, ZooPrinciple::nrc_fin, n);
    CHECK_FALSE(r.holds_at_bound);
    CHECK(r.witness.size() == n + 1);
    CHECK(stabilizer_orbits(b, r.witness).size() == 1);
    for (const auto& [e, w] : r.witnesses) CHECK((e & w).empty());
  }
}

TEST_CASE("bfm ncfin_minus grows with the model") {
  const ZooModel b = bfm(12);
  for (int n = 1; n <= 4; ++n) {
    CAPTURE(n);
    const ZooVerdict r = evaluate(b, ZooPrinciple::ncfin_minus, n);
    CHECK(r.holds_at_bound);
    CHECK(r.count_large > r.count_small);
    CHECK_FALSE(r.support.empty());
  }
  // Without any support nothing has a fixed point.
  CHECK_FALSE(evaluate(b, ZooPrinciple::ncfin_minus, 3, 0).holds_at_bound);
}

TEST_CASE("verdicts are monotone in the support budget") {
  const std::vector<ZooModel> models = {vfin(6), vlines({4}), vlines({3}), bfm(12)};
  for (const ZooModel& m : models)
    for (ZooPrinciple p : {ZooPrinciple::nrc_fin, ZooPrinciple::c_n, ZooPrinciple::rc, ZooPrinciple::ncfin_minus})
      for (int n = 1; n <= 5; ++n) {
        bool before = false;
        for (int e = 0; e <= 3; ++e) {
          const bool now = evaluate(m, p, n, e).holds_at_bound;
          CAPTURE(zoo_principle_name(p));
          CAPTURE(n);
          CAPTURE(e);
          CHECK((!before || now));
          before = now;
        }
      }
}

TEST_CASE("failing verdicts carry verifiable certificates") {
  struct Case {
    ZooModel model;
    ZooPrinciple principle;
    int n;
  };
  const std::vector<Case> cases = {{vfin(6), ZooPrinciple::nrc_fin, 3}, {vfin(6), ZooPrinciple::nrc_fin, 2},
                                   {vfin(6), ZooPrinciple::c_n, 5},     {vlines({4}), ZooPrinciple::nrc_fin, 3},
                                   {vlines({3}), ZooPrinciple::nrc_fin, 4}, {bfm(12), ZooPrinciple::nrc_fin, 5},
                                   {bfm(12), ZooPrinciple::c_n, 3},     {bfm(12), ZooPrinciple::rc, 3}};
  for (const Case& c : cases) {
    CAPTURE(zoo_principle_name(c.principle));
    CAPTURE(c.n);
    const ZooVerdict v = evaluate(c.model, c.principle, c.n, 0);
    REQUIRE_FALSE(v.holds_at_bound);
    const auto cert = zoo_certificate(c.model, v);
    REQUIRE(cert.has_value());
    const std::string text = serialize_certificate(*cert);
    const VerifyResult ok = verify_certificate(text);
    CHECK_MESSAGE(ok.accepted, ok.detail);

    // A certificate whose group fixes every point is rejected.
    Certificate bad = *cert;
    bad.group_generators.clear();
    CHECK_FALSE(verify_certificate(serialize_certificate(bad)).accepted);
  }
  CHECK_FALSE(zoo_certificate(vfin(6), evaluate(vfin(6), ZooPrinciple::c_n, 3)).has_value());
}

TEST_CASE("bfm partial choice") {
  const ZooModel b = bfm(9);
  const SubsetCode e = S({0, 1, 2});
  std::vector<SubsetCode> singles;
  for (int a = 0; a < 9; ++a) singles.push_back(SubsetCode::singleton(a));
  CHECK(bfm_partial_choice(b, singles, e).assignments.size() == 9);

  std::vector<SubsetCode> outside;
  k_subsets_of(SubsetCode::full(9) - e, 3, [&](SubsetCode l) { outside.push_back(l); });
  CHECK(bfm_partial_choice(b, outside, e).assignments.empty());

  const std::vector<SubsetCode> meeting = {S({0, 3, 4}), S({1, 5, 6}), S({2, 7, 8})};
  const PartialSelection sel = bfm_partial_choice(b, meeting, e);
  REQUIRE(sel.assignments.size() == 3);
  CHECK(sel.assignments.at(0) == ElemSet{0});
  CHECK(sel.assignments.at(1) == ElemSet{1});
  CHECK(sel.assignments.at(2) == ElemSet{2});
  CHECK(sel.k == 1);
}

TEST_CASE("model descriptor round trip") {
  for (const ZooModel& m : {vfin(4, S({2})), vlines({4, 3}, 2), bfm(10, S({1, 9}))}) {
    const std::string text = model_to_json(m);
    CHECK(model_from_json(text) == m);
    CHECK(model_to_json(model_from_json(text)) == text);
  }
  CHECK_THROWS_AS(model_from_json("{"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"name":"vfin","atom_count":5,"support":[],"blocks":[{"first":0,"size":4}]})"),
                  ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"name":"bfm","atom_count":3,"support":[5],"blocks":[{"first":0,"size":3}]})"),
                  ParseError);
}

TEST_CASE("concurrent evaluation matches serial") {
  const ZooModel m = vlines({3});
  std::vector<bool> serial;
  for (int n = 1; n <= 8; ++n) serial.push_back(evaluate(m, ZooPrinciple::nrc_fin, n).holds_at_bound);
  std::vector<int> par(8, -1);
  std::vector<std::thread> ts;
  for (int n = 1; n <= 8; ++n)
    ts.emplace_back([&, n] { par[static_cast<std::size_t>(n - 1)] = evaluate(m, ZooPrinciple::nrc_fin, n).holds_at_bound; });
  for (auto& t : ts) t.join();
  for (std::size_t i = 0; i < 8; ++i) CHECK(par[i] == static_cast<int>(serial[i]));
}
