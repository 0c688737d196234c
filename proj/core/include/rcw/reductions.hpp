#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "rcw/error.hpp"

namespace rcw {

/// A finite set of element ids, sorted ascending without repeats.
using ElemSet = std::vector<int>;

/// The family is below the minimum size at which the reduction can be
/// guaranteed to produce anything.
class FamilyTooSmall : public PreconditionError {
 public:
  FamilyTooSmall(std::size_t size, std::size_t minimum);
  std::size_t size() const { return size_; }
  std::size_t minimum() const { return minimum_; }

 private:
  std::size_t size_;
  std::size_t minimum_;
};

/// An oracle returned something outside its contract.
class OracleViolation : public Error {
 public:
  using Error::Error;
};

/// Finite stand-in for an application of nRC_fin. `extract` receives the
/// current pool split by member and returns a subset of the pool meeting
/// every non-empty part (the finite version of "an infinite subset");
/// `select` maps any set of more than `arity` ids to an `arity`-subset and
/// must answer the same way every time it sees the same set.
struct Oracle {
  int arity = 0;
  std::function<ElemSet(const ElemSet&)> select;
  std::function<ElemSet(const std::vector<ElemSet>&)> extract;
};

/// Seeded adversarial oracle. The seed picks a strategy (hash-random,
/// smallest ids, largest ids, or mixed) and every choice is a pure function
/// of (seed, input).
Oracle seeded_oracle(int arity, std::uint64_t seed);

/// Selects the lexicographically least `arity` ids; extracts the whole pool.
Oracle lex_least_oracle(int arity);

/// One recorded oracle call.
struct OracleCall {
  std::string op;  // "select" or "extract"
  std::vector<ElemSet> input;
  ElemSet output;
  friend bool operator==(const OracleCall&, const OracleCall&) = default;
};

/// Answers from a recorded trace; throws OracleViolation on an unseen input.
Oracle replay_oracle(int arity, const std::vector<OracleCall>& calls);

std::string write_oracle_trace(const std::vector<OracleCall>& calls);
std::vector<OracleCall> read_oracle_trace(std::string_view text);

struct OracleFamily {
  std::vector<ElemSet> members;
  Oracle oracle;
  int arity() const { return oracle.arity; }
};

/// Members as JSON arrays of non-negative ids: {"members": [[0,1,2],[3,4,5]]}.
std::vector<ElemSet> parse_family(std::string_view text);
std::string write_family(const std::vector<ElemSet>& members);

/// Pairwise disjoint members with sizes drawn from [arity+1, arity+3].
std::vector<ElemSet> random_family(int arity, std::size_t count, std::uint64_t seed);

struct PartialSelection {
  int k = 0;
  std::map<std::size_t, ElemSet> assignments;
  friend bool operator==(const PartialSelection&, const PartialSelection&) = default;
};

/// Every assignment has size k and lies inside its member.
bool is_valid_selection(const std::vector<ElemSet>& members, const PartialSelection& sel);

struct ReductionResult {
  PartialSelection selection;
  /// Which rule resolved each assigned member: "direct", "sum", "digraph",
  /// "edge_grid", "subsum".
  std::map<std::size_t, std::string> rule;
  /// Case decisions in the order they were taken.
  std::vector<std::string> notes;
  std::vector<OracleCall> calls;
};

/// Greedy largest-first sub-multiset of `sizes` summing to p^k. Requires p
/// prime, every size a divisor of p^k and the total above p^k.
std::vector<int> subsum_divisors(int p, int k, const std::vector<int>& sizes);

/// Whether a digraph on v vertices with an edge in at least one direction
/// for every pair cannot have all outdegrees at most k', i.e.
/// v(v-1)/2 > v k'.
bool outdegree_bound_check(std::int64_t v, std::int64_t k_prime);

/// Smallest family for which reduce(n, ...) runs: 1 for n = 2, otherwise 2
/// (the digraph and edge-grid kernels compare members in pairs).
std::size_t reduce_min_family(int n);

/// Smallest family for reduce_pk_woc: the largest block length l = floor(q/m)+1
/// over sizes 1 < m < q not dividing q = p^k (1 if there are none).
std::size_t pk_woc_min_family(int p, int k);

/// Runs the finitized selection argument for n in {2, 3, 4, 6}. Traces come
/// from repeated oracle extractions unless `forced_layers` gives them (each
/// layer is a set of ids; they must be pairwise disjoint).
ReductionResult reduce(int n, const OracleFamily& fam,
                       const std::vector<ElemSet>* forced_layers = nullptr);

/// p^k-selections on the well-ordered family by repeated extraction, block
/// chunking of pieces whose size does not divide p^k, and subsum_divisors.
ReductionResult reduce_pk_woc(int p, int k, const OracleFamily& fam);

/// Edges of one member: rows F_a (a in the 3-set) and columns G_b (b in the
/// 2-set) over E = Y x Z. Edge ids are assigned by build_edge_grid.
struct GridMember {
  std::size_t member = 0;
  ElemSet y;
  ElemSet z;
  std::vector<int> edges;                        // row-major: a index * |z| + b index
  std::vector<std::vector<int>> rows;            // F_a
  std::vector<std::vector<int>> columns;         // G_b
  std::vector<std::size_t> column_degrees;
};

struct EdgeGrid {
  std::vector<GridMember> members;
  /// Edge id -> (grid member index, a, b).
  std::map<int, std::tuple<std::size_t, int, int>> edge_owner;
};

/// Requires |y| = 3 and |z| = 2 for every entry. Edge ids are negative and
/// start at `first_edge_id`, counting down.
EdgeGrid build_edge_grid(const std::vector<std::pair<ElemSet, ElemSet>>& traces, int first_edge_id = -1000000);

/// deg(G_b) for every column: the number of unions F_a u F_a' of other
/// members for which the single edge left out by select(G_b u F_a u F_a')
/// falls in that union. `select` must have arity 6.
void compute_degrees(EdgeGrid& grid, const std::function<ElemSet(const ElemSet&)>& select);

}  // namespace rcw
