#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcw/subset.hpp"

namespace rcw {

/// A permutation of {0, ..., degree-1}, degree <= 64. Value type; composition
/// follows function notation: (p * q)(x) == p(q(x)).
class Perm {
 public:
  Perm() = default;
  static Perm identity(int degree);
  /// Throws DomainError unless images is a bijection on {0..size-1}.
  static Perm from_images(std::span<const int> images);
  /// Disjoint cycles on the given degree; each cycle lists points in order.
  static Perm from_cycles(int degree, const std::vector<std::vector<int>>& cycles);
  /// Parses "(0 1 2)(3 4)"; "()" is the identity. Commas between points are accepted.
  static Perm parse(std::string_view text, int degree);

  int degree() const { return degree_; }
  int operator()(int x) const { return images_[static_cast<std::size_t>(x)]; }
  SubsetCode apply(SubsetCode s) const {
    std::uint64_t out = 0;
    s.for_each([&](int i) { out |= std::uint64_t{1} << images_[static_cast<std::size_t>(i)]; });
    return SubsetCode(out);
  }

  Perm inverse() const;
  bool is_identity() const;
  SubsetCode support() const;
  SubsetCode fixed_points() const;
  /// Non-trivial cycles, each starting at its least point, ordered by that point.
  std::vector<std::vector<int>> cycles() const;
  /// Cycle lengths including fixed points, sorted decreasing.
  std::vector<int> cycle_type() const;
  std::string to_string() const;
  std::vector<int> images() const;

  friend Perm operator*(const Perm& p, const Perm& q);
  friend bool operator==(const Perm& a, const Perm& b) {
    return a.degree_ == b.degree_ && a.images_ == b.images_;
  }
  /// Lexicographic on image lists; degree first.
  friend std::strong_ordering operator<=>(const Perm& a, const Perm& b);

  std::size_t hash() const;

 private:
  std::array<std::uint8_t, kMaxDomain> images_{};
  std::uint8_t degree_ = 0;
};

}  // namespace rcw

template <>
struct std::hash<rcw::Perm> {
  std::size_t operator()(const rcw::Perm& p) const noexcept { return p.hash(); }
};
