#include "rcw/canonical.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "rcw/error.hpp"

namespace rcw {

namespace {

void check_search_domain(const SelectionStructure& m) {
  if (m.domain_size() > kMaxSearchDomain)
    throw BoundExceeded("search over relabelings is limited to " + std::to_string(kMaxSearchDomain) + " points");
}

// inv[x][s] = number of size-s sets whose selected subset contains x.
std::vector<std::vector<int>> point_invariants(const SelectionStructure& m) {
  const int n = m.domain_size();
  std::vector<std::vector<int>> inv(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n + 1), 0));
  for (SubsetCode l : m.domain_subsets()) {
    const auto s = static_cast<std::size_t>(l.size());
    m.at(l).for_each([&](int x) { ++inv[static_cast<std::size_t>(x)][s]; });
  }
  return inv;
}

// Maps the bits of `s` (all assigned) through `image`.
std::uint64_t map_bits(SubsetCode s, const std::vector<int>& image) {
  std::uint64_t out = 0;
  s.for_each([&](int x) { out |= std::uint64_t{1} << image[static_cast<std::size_t>(x)]; });
  return out;
}

class AutomorphismSearch {
 public:
  explicit AutomorphismSearch(const SelectionStructure& m)
      : m_(m), n_(m.domain_size()), inv_(point_invariants(m)), image_(static_cast<std::size_t>(n_), -1) {}

  std::vector<Perm> run() {
    recurse(0, 0);
    return found_;
  }

 private:
  bool consistent(int j) const {
    // Every L inside {0..j} that contains j and is in the table's domain.
    const std::uint64_t lower = (std::uint64_t{1} << j) - 1;
    for (std::uint64_t sub = lower;; sub = (sub - 1) & lower) {
      const SubsetCode l(sub | (std::uint64_t{1} << j));
      if (l.size() > m_.arity()) {
        const SubsetCode image_l(map_bits(l, image_));
        if (map_bits(m_.at(l), image_) != m_.at(image_l).bits()) return false;
      }
      if (sub == 0) break;
    }
    return true;
  }

  void recurse(int j, std::uint64_t used) {
    if (j == n_) {
      found_.push_back(Perm::from_images(image_));
      return;
    }
    for (int y = 0; y < n_; ++y) {
      if ((used >> y) & 1U) continue;
      if (inv_[static_cast<std::size_t>(y)] != inv_[static_cast<std::size_t>(j)]) continue;
      image_[static_cast<std::size_t>(j)] = y;
      if (consistent(j)) recurse(j + 1, used | (std::uint64_t{1} << y));
    }
    image_[static_cast<std::size_t>(j)] = -1;
  }

  const SelectionStructure& m_;
  int n_;
  std::vector<std::vector<int>> inv_;
  std::vector<int> image_;
  std::vector<Perm> found_;
};

class CanonicalSearch {
 public:
  explicit CanonicalSearch(const SelectionStructure& m)
      : m_(m),
        n_(m.domain_size()),
        inv_(point_invariants(m)),
        order_(static_cast<std::size_t>(n_)),
        new_of_old_(static_cast<std::size_t>(n_), -1),
        current_(std::size_t{1} << n_, 0),
        best_(std::size_t{1} << n_, std::numeric_limits<std::uint64_t>::max()) {
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return inv_[static_cast<std::size_t>(a)] < inv_[static_cast<std::size_t>(b)];
    });
  }

  Perm run() {
    recurse(0, 0);
    return best_relabeling_;
  }

 private:
  // Fills current_ for new masks containing label j; returns -1/0/+1 versus best_.
  int fill_segment(int j) {
    const std::uint64_t lo = std::uint64_t{1} << j;
    const std::uint64_t hi = lo << 1;
    int cmp = 0;
    std::vector<int> old_of_new(static_cast<std::size_t>(j + 1));
    for (int x = 0; x < n_; ++x) {
      const int label = new_of_old_[static_cast<std::size_t>(x)];
      if (label >= 0 && label <= j) old_of_new[static_cast<std::size_t>(label)] = x;
    }
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      const SubsetCode new_l(mask);
      if (new_l.size() <= m_.arity()) continue;
      const SubsetCode old_l(map_bits(new_l, old_of_new));
      const std::uint64_t value = map_bits(m_.at(old_l), new_of_old_);
      current_[mask] = value;
      if (cmp == 0 && value != best_[mask]) cmp = value < best_[mask] ? -1 : 1;
    }
    return cmp;
  }

  // Invariant: on entry best_ agrees with current_ on every segment below j.
  void recurse(int j, std::uint64_t used) {
    if (j == n_) {
      best_relabeling_ = Perm::from_images(new_of_old_);
      return;
    }
    const auto& wanted = inv_[static_cast<std::size_t>(order_[static_cast<std::size_t>(j)])];
    const std::uint64_t lo = std::uint64_t{1} << j;
    for (int x = 0; x < n_; ++x) {
      if ((used >> x) & 1U) continue;
      if (inv_[static_cast<std::size_t>(x)] != wanted) continue;
      new_of_old_[static_cast<std::size_t>(x)] = j;
      const int cmp = fill_segment(j);
      if (cmp < 0) {
        std::copy(current_.begin() + static_cast<std::ptrdiff_t>(lo),
                  current_.begin() + static_cast<std::ptrdiff_t>(lo << 1),
                  best_.begin() + static_cast<std::ptrdiff_t>(lo));
        std::fill(best_.begin() + static_cast<std::ptrdiff_t>(lo << 1), best_.end(),
                  std::numeric_limits<std::uint64_t>::max());
      }
      if (cmp <= 0) recurse(j + 1, used | (std::uint64_t{1} << x));
      new_of_old_[static_cast<std::size_t>(x)] = -1;
    }
  }

  const SelectionStructure& m_;
  int n_;
  std::vector<std::vector<int>> inv_;
  std::vector<int> order_;
  std::vector<int> new_of_old_;
  std::vector<std::uint64_t> current_;
  std::vector<std::uint64_t> best_;
  Perm best_relabeling_;
};

}  // namespace

PermGroup automorphism_group(const SelectionStructure& m) {
  check_search_domain(m);
  AutomorphismSearch search(m);
  return PermGroup::from_elements(m.domain_size(), search.run());
}

CanonicalForm canonical_form(const SelectionStructure& m) {
  check_search_domain(m);
  CanonicalSearch search(m);
  Perm relabeling = search.run();
  return CanonicalForm{m.relabel(relabeling), relabeling};
}

std::uint64_t count_structures(int domain_size, int arity) {
  if (domain_size > kMaxTableDomain) return std::numeric_limits<std::uint64_t>::max();
  // For each size s > arity: C(N, s) subsets, each with C(s, arity) choices.
  auto binom = [](int a, int b) {
    std::uint64_t r = 1;
    for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
    return r;
  };
  const auto max = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (int s = arity + 1; s <= domain_size; ++s) {
    const std::uint64_t choices = binom(s, arity);
    const std::uint64_t count = binom(domain_size, s);
    for (std::uint64_t i = 0; i < count; ++i) {
      if (total > max / choices) return max;
      total *= choices;
    }
  }
  return total;
}

StructureEnumerator::StructureEnumerator(int domain_size, int arity, std::uint64_t cap)
    : domain_size_(domain_size), arity_(arity) {
  total_ = count_structures(domain_size, arity);
  if (total_ > cap)
    throw BoundExceeded("structure enumeration would produce " +
                        (total_ == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                            : std::to_string(total_)) +
                        " structures; cap is " + std::to_string(cap));
  SelectionStructure probe(domain_size, arity);
  subsets_ = probe.domain_subsets();
  if (subsets_.empty()) {
    // No subset exceeds the arity: nothing to enumerate.
    total_ = 0;
    done_ = true;
    return;
  }
  for (SubsetCode l : subsets_) {
    std::vector<SubsetCode> opts;
    const auto idx = l.indices();
    for_each_k_subset(l.size(), arity, [&](SubsetCode local) {
      std::uint64_t bits = 0;
      local.for_each([&](int i) { bits |= std::uint64_t{1} << idx[static_cast<std::size_t>(i)]; });
      opts.emplace_back(bits);
    });
    std::sort(opts.begin(), opts.end(), LexLess{});
    choices_.push_back(std::move(opts));
  }
  digits_.assign(subsets_.size(), 0);
}

bool StructureEnumerator::next(SelectionStructure& out) {
  if (done_) return false;
  if (started_) {
    std::size_t i = 0;
    for (; i < digits_.size(); ++i) {
      if (++digits_[i] < choices_[i].size()) break;
      digits_[i] = 0;
    }
    if (i == digits_.size()) {
      done_ = true;
      return false;
    }
  }
  started_ = true;
  if (out.domain_size() != domain_size_ || out.arity() != arity_) out = SelectionStructure(domain_size_, arity_);
  for (std::size_t i = 0; i < subsets_.size(); ++i) out.set(subsets_[i], choices_[i][digits_[i]]);
  return true;
}

std::vector<SelectionStructure> enumerate_structures(int domain_size, int arity, std::uint64_t cap) {
  StructureEnumerator e(domain_size, arity, cap);
  std::vector<SelectionStructure> out;
  SelectionStructure s;
  while (e.next(s)) out.push_back(s);
  return out;
}

}  // namespace rcw
