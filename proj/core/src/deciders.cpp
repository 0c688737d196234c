#include "rcw/deciders.hpp"

#include "rcw/equivariance.hpp"
#include "rcw/error.hpp"
#include "rcw/log.hpp"
#include "rcw/parallel.hpp"
#include "rcw/subgroups.hpp"

namespace rcw {

namespace {

std::vector<std::string> generator_strings(const PermGroup& g) {
  std::vector<std::string> out;
  for (const Perm& p : g.generators()) out.push_back(p.to_string());
  return out;
}

std::vector<PermGroup> candidates(int degree, Mode mode, SubgroupFilter filter) {
  return mode == Mode::complete ? enumerate_subgroups(degree, filter) : enumerate_cyclic_subgroups(degree, filter);
}

}  // namespace

std::string mode_name(Mode mode) { return mode == Mode::complete ? "complete" : "cyclic_only"; }

Mode parse_mode(std::string_view text) {
  if (text == "complete") return Mode::complete;
  if (text == "cyclic" || text == "cyclic_only") return Mode::cyclic_only;
  throw ParseError("unknown mode '" + std::string(text) + "' (expected complete or cyclic)");
}

std::string verdict_kind_name(VerdictKind kind) {
  return kind == VerdictKind::fails ? "fails" : "holds_at_bound";
}

Verdict decide_local_rc(int n, int m, Mode mode, unsigned jobs) {
  if (n < 1 || m < 2) throw PreconditionError("rc decision needs n >= 1 and m >= 2");
  const int cap = mode == Mode::complete ? kMaxSubgroupDegree : kMaxCyclicDegree;
  if (m > cap)
    throw BoundExceeded("m = " + std::to_string(m) + " exceeds the " + mode_name(mode) + " bound of " +
                        std::to_string(cap));
  Verdict v;
  v.bound = m;
  v.mode = mode;
  const auto groups = candidates(m, mode, SubgroupFilter::fixed_point_free);
  log().info("rc n={} m={} mode={}: {} fixed-point-free candidates", n, m, mode_name(mode), groups.size());

  std::optional<std::size_t> witness;
  if (m <= n) {
    // No subset exceeds the arity, so the empty table is equivariant.
    v.examined.push_back({m, groups.front().render(), groups.front().order(), true});
    witness = 0;
  } else {
    const auto admits = parallel_map<char>(groups.size(), jobs, [&](std::size_t i) {
      return static_cast<char>(equivariant_sel_exists(groups[i], n).exists);
    });
    for (std::size_t i = 0; i < groups.size(); ++i) {
      v.examined.push_back({m, groups[i].render(), groups[i].order(), admits[i] != 0});
      log().debug("  {} order {}: {}", groups[i].render(), groups[i].order(), admits[i] ? "admits" : "no");
      if (admits[i] && !witness) witness = i;
    }
  }

  const std::string head = "rc n=" + std::to_string(n) + " m=" + std::to_string(m) + " mode=" + mode_name(mode) + ": ";
  if (!witness) {
    v.kind = VerdictKind::holds_at_bound;
    v.summary = head + "holds_at_bound (" + std::to_string(groups.size()) +
                " fixed-point-free classes examined, none admits an equivariant selection)";
    return v;
  }
  const PermGroup& g = groups[*witness];
  Certificate c;
  c.claim.kind = ClaimKind::rc_failure;
  c.claim.n = n;
  c.claim.m = m;
  c.domain_size = m;
  c.group_generators = generator_strings(g);
  c.target_set = SubsetCode::full(m);
  c.support_template = default_support_template();
  if (m > n) attach_table(c, build_equivariant_sel(g, n), equivariant_sel_exists(g, n).certificate);
  v.kind = VerdictKind::fails;
  v.witness = std::move(c);
  v.summary = head + "fails (witness " + g.render() + ", order " + std::to_string(g.order()) +
              (m <= n ? ", empty table" : "") + ")";
  return v;
}

Verdict decide_local_nrc(int m, int k, int bound, Mode mode, unsigned jobs) {
  if (m < 1 || k < 1) throw PreconditionError("nrc decision needs m, k >= 1");
  const int cap = mode == Mode::complete ? kMaxSubgroupDegree : kMaxTableDomain;
  if (bound > cap)
    throw BoundExceeded("bound " + std::to_string(bound) + " exceeds the " + mode_name(mode) + " limit of " +
                        std::to_string(cap));
  Verdict v;
  v.bound = bound;
  v.mode = mode;
  const std::string head = "nrc m=" + std::to_string(m) + " k=" + std::to_string(k) + " bound=" +
                           std::to_string(bound) + " mode=" + mode_name(mode) + ": ";
  std::size_t total = 0;
  for (int d = std::max(m, k) + 1; d <= bound; ++d) {
    const auto groups = candidates(d, mode, SubgroupFilter::all);
    total += groups.size();
    struct Outcome {
      char source = 0;
      char target = 0;
    };
    const auto outcomes = parallel_map<Outcome>(groups.size(), jobs, [&](std::size_t i) {
      Outcome o;
      o.source = static_cast<char>(equivariant_sel_exists(groups[i], m).exists);
      if (o.source) o.target = static_cast<char>(equivariant_sel_exists(groups[i], k).exists);
      return o;
    });
    std::optional<std::size_t> witness;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const bool fails = outcomes[i].source && !outcomes[i].target;
      v.examined.push_back({d, groups[i].render(), groups[i].order(), fails});
      if (fails && !witness) witness = i;
    }
    log().info("nrc m={} k={} d={}: {} groups", m, k, d, groups.size());
    if (!witness) continue;
    const PermGroup& g = groups[*witness];
    const SelExistence source = equivariant_sel_exists(g, m);
    Certificate c;
    c.claim.kind = ClaimKind::nrc_failure;
    c.claim.n = m;
    c.claim.k = k;
    c.domain_size = d;
    c.group_generators = generator_strings(g);
    c.target_set = *equivariant_sel_exists(g, k).failing;
    c.support_template = default_support_template();
    attach_table(c, build_equivariant_sel(g, m), source.certificate);
    v.kind = VerdictKind::fails;
    v.witness = std::move(c);
    v.summary = head + "fails (witness d=" + std::to_string(d) + ", " + g.render() + ", target {" +
                v.witness->target_set.render() + "})";
    return v;
  }
  v.kind = VerdictKind::holds_at_bound;
  v.summary = head + "holds_at_bound (" + std::to_string(total) + " groups examined)";
  return v;
}

std::vector<Verdict> implication_matrix(int n, int m_lo, int m_hi, Mode mode, unsigned jobs) {
  if (m_lo > m_hi) throw PreconditionError("empty m range");
  std::vector<Verdict> out;
  for (int m = m_lo; m <= m_hi; ++m) out.push_back(decide_local_rc(n, m, mode, jobs));
  return out;
}

}  // namespace rcw
