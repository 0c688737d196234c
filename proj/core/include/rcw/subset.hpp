#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rcw {

inline constexpr int kMaxDomain = 64;

/// A finite set of point indices over a domain of at most 64 points,
/// stored as a characteristic bit vector.
class SubsetCode {
 public:
  constexpr SubsetCode() = default;
  constexpr explicit SubsetCode(std::uint64_t bits) : bits_(bits) {}

  static SubsetCode from_indices(std::span<const int> indices);
  static SubsetCode from_indices(std::initializer_list<int> indices) {
    return from_indices(std::span<const int>(indices.begin(), indices.size()));
  }
  /// {0, ..., n-1}
  static constexpr SubsetCode full(int n) {
    return SubsetCode(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }
  static constexpr SubsetCode singleton(int i) { return SubsetCode(std::uint64_t{1} << i); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1U; }
  constexpr bool subset_of(SubsetCode other) const { return (bits_ & ~other.bits_) == 0; }
  /// Largest index + 1, i.e. the smallest domain this set fits in.
  constexpr int span_size() const { return 64 - std::countl_zero(bits_); }
  constexpr int min_element() const { return std::countr_zero(bits_); }

  std::vector<int> indices() const;

  /// Strictly increasing comma-separated index list; the empty set renders as "".
  std::string render() const;
  static SubsetCode parse(std::string_view text);

  constexpr SubsetCode operator|(SubsetCode o) const { return SubsetCode(bits_ | o.bits_); }
  constexpr SubsetCode operator&(SubsetCode o) const { return SubsetCode(bits_ & o.bits_); }
  constexpr SubsetCode operator-(SubsetCode o) const { return SubsetCode(bits_ & ~o.bits_); }
  constexpr SubsetCode with(int i) const { return SubsetCode(bits_ | (std::uint64_t{1} << i)); }
  constexpr SubsetCode without(int i) const { return SubsetCode(bits_ & ~(std::uint64_t{1} << i)); }

  friend constexpr bool operator==(SubsetCode a, SubsetCode b) = default;

  template <typename F>
  void for_each(F&& f) const {
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) f(std::countr_zero(b));
  }

 private:
  std::uint64_t bits_ = 0;
};

/// Lexicographic order on the strictly increasing index lists. This is the
/// tie-breaking order used for every deterministic choice in the library.
constexpr bool lex_less(SubsetCode a, SubsetCode b) {
  const std::uint64_t diff = a.bits() ^ b.bits();
  if (diff == 0) return false;
  const int j = std::countr_zero(diff);
  const std::uint64_t at_or_above = ~((std::uint64_t{1} << j) - 1);
  if (a.contains(j)) {
    // b agrees with a below j and lacks j; b is smaller iff it ends there.
    return (b.bits() & at_or_above) != 0;
  }
  return (a.bits() & at_or_above) == 0;
}

struct LexLess {
  constexpr bool operator()(SubsetCode a, SubsetCode b) const { return lex_less(a, b); }
};

/// Iterates all k-subsets of {0..n-1} as masks in increasing numeric order.
template <typename F>
void for_each_k_subset(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  if (k == 0) {
    f(SubsetCode{});
    return;
  }
  std::uint64_t m = (k == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << k) - 1);
  const std::uint64_t limit = (n == 64) ? 0 : (std::uint64_t{1} << n);
  while (true) {
    f(SubsetCode(m));
    // Gosper's hack
    const std::uint64_t c = m & (~m + 1);
    const std::uint64_t r = m + c;
    if (r == 0) break;
    m = (((r ^ m) >> 2) / c) | r;
    if (n < 64 && m >= limit) break;
  }
}

}  // namespace rcw

template <>
struct std::hash<rcw::SubsetCode> {
  std::size_t operator()(rcw::SubsetCode s) const noexcept {
    return std::hash<std::uint64_t>{}(s.bits());
  }
};
