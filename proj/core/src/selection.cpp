#include "rcw/selection.hpp"

#include <bit>

#include "rcw/error.hpp"

namespace rcw {

SubsetCode largest_k(SubsetCode l, int k) {
  std::uint64_t bits = l.bits();
  std::uint64_t out = 0;
  for (int i = 0; i < k && bits != 0; ++i) {
    const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(bits));
    out |= top;
    bits &= ~top;
  }
  return SubsetCode(out);
}

SubsetCode smallest_k(SubsetCode l, int k) {
  std::uint64_t bits = l.bits();
  std::uint64_t out = 0;
  for (int i = 0; i < k && bits != 0; ++i) {
    const std::uint64_t low = bits & (~bits + 1);
    out |= low;
    bits &= ~low;
  }
  return SubsetCode(out);
}

SelectionStructure::SelectionStructure(int domain_size, int arity)
    : domain_size_(domain_size), arity_(arity) {
  if (domain_size < 0 || domain_size > kMaxTableDomain)
    throw DomainError("selection table domain must be <= " + std::to_string(kMaxTableDomain) + " points");
  if (arity < 1) throw DomainError("arity must be >= 1");
  table_.assign(std::size_t{1} << domain_size, SubsetCode{});
}

void SelectionStructure::set(SubsetCode l, SubsetCode value) {
  if (!in_domain(l)) throw PreconditionError("{" + l.render() + "} is not in the table's domain");
  if (!value.subset_of(l) || value.size() != arity_)
    throw PreconditionError("value {" + value.render() + "} is not a " + std::to_string(arity_) +
                            "-subset of {" + l.render() + "}");
  table_[static_cast<std::size_t>(l.bits())] = value;
}

bool SelectionStructure::is_total() const {
  for (std::uint64_t m = 0; m < table_.size(); ++m) {
    const SubsetCode l(m);
    if (l.size() > arity_ && !is_set(l)) return false;
  }
  return true;
}

void SelectionStructure::validate() const {
  for (std::uint64_t m = 0; m < table_.size(); ++m) {
    const SubsetCode l(m);
    const SubsetCode v = table_[m];
    if (l.size() > arity_) {
      if (v.size() != arity_ || !v.subset_of(l))
        throw PreconditionError("entry for {" + l.render() + "} is not a valid " + std::to_string(arity_) + "-subset");
    } else if (!v.empty()) {
      throw PreconditionError("entry present for undersized set {" + l.render() + "}");
    }
  }
}

std::vector<SubsetCode> SelectionStructure::domain_subsets() const {
  std::vector<SubsetCode> out;
  for (std::uint64_t m = 0; m < table_.size(); ++m)
    if (std::popcount(m) > arity_) out.emplace_back(m);
  return out;
}

std::size_t SelectionStructure::entry_count() const {
  std::size_t count = 0;
  for (std::uint64_t m = 0; m < table_.size(); ++m)
    if (std::popcount(m) > arity_) ++count;
  return count;
}

SelectionStructure SelectionStructure::relabel(const Perm& pi) const {
  if (pi.degree() != domain_size_) throw DomainError("relabeling degree mismatch");
  SelectionStructure out(domain_size_, arity_);
  for (std::uint64_t m = 0; m < table_.size(); ++m) {
    if (std::popcount(m) <= arity_) continue;
    const SubsetCode l(m);
    out.table_[static_cast<std::size_t>(pi.apply(l).bits())] = pi.apply(table_[m]);
  }
  return out;
}

bool SelectionStructure::is_automorphism(const Perm& pi) const {
  if (pi.degree() != domain_size_) return false;
  for (std::uint64_t m = 0; m < table_.size(); ++m) {
    if (std::popcount(m) <= arity_) continue;
    const SubsetCode l(m);
    if (pi.apply(table_[m]) != at(pi.apply(l))) return false;
  }
  return true;
}

SelectionStructure SelectionStructure::largest_points(int domain_size, int arity) {
  SelectionStructure s(domain_size, arity);
  for (std::uint64_t m = 0; m < s.table_.size(); ++m)
    if (std::popcount(m) > arity) s.table_[m] = largest_k(SubsetCode(m), arity);
  return s;
}

SelectionStructure SelectionStructure::smallest_points(int domain_size, int arity) {
  SelectionStructure s(domain_size, arity);
  for (std::uint64_t m = 0; m < s.table_.size(); ++m)
    if (std::popcount(m) > arity) s.table_[m] = smallest_k(SubsetCode(m), arity);
  return s;
}

std::string SelectionStructure::render() const {
  std::string out;
  for (std::uint64_t m = 0; m < table_.size(); ++m) {
    if (std::popcount(m) <= arity_) continue;
    out += SubsetCode(m).render() + " -> " + table_[m].render() + "\n";
  }
  return out;
}

}  // namespace rcw
