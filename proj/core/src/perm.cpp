#include "rcw/perm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "rcw/error.hpp"

namespace rcw {

std::vector<int> SubsetCode::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for_each([&](int i) { out.push_back(i); });
  return out;
}

SubsetCode SubsetCode::from_indices(std::span<const int> indices) {
  std::uint64_t bits = 0;
  for (int i : indices) {
    if (i < 0 || i >= kMaxDomain) throw DomainError("subset index out of range: " + std::to_string(i));
    bits |= std::uint64_t{1} << i;
  }
  return SubsetCode(bits);
}

std::string SubsetCode::render() const {
  std::string out;
  for_each([&](int i) {
    if (!out.empty()) out += ',';
    out += std::to_string(i);
  });
  return out;
}

SubsetCode SubsetCode::parse(std::string_view text) {
  std::uint64_t bits = 0;
  int last = -1;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  if (pos == text.size()) return SubsetCode{};
  while (true) {
    skip_ws();
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{}) throw ParseError("bad subset text: " + std::string(text));
    pos = static_cast<std::size_t>(ptr - text.data());
    if (value < 0 || value >= kMaxDomain || value <= last)
      throw ParseError("subset indices must be strictly increasing and < 64: " + std::string(text));
    bits |= std::uint64_t{1} << value;
    last = value;
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != ',') throw ParseError("bad subset text: " + std::string(text));
    ++pos;
  }
  return SubsetCode(bits);
}

Perm Perm::identity(int degree) {
  if (degree < 0 || degree > kMaxDomain) throw DomainError("degree out of range");
  Perm p;
  p.degree_ = static_cast<std::uint8_t>(degree);
  for (int i = 0; i < degree; ++i) p.images_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  return p;
}

Perm Perm::from_images(std::span<const int> images) {
  const int n = static_cast<int>(images.size());
  if (n > kMaxDomain) throw DomainError("degree exceeds 64");
  Perm p;
  p.degree_ = static_cast<std::uint8_t>(n);
  std::uint64_t seen = 0;
  for (int i = 0; i < n; ++i) {
    const int v = images[static_cast<std::size_t>(i)];
    if (v < 0 || v >= n || ((seen >> v) & 1U)) throw DomainError("images do not form a permutation");
    seen |= std::uint64_t{1} << v;
    p.images_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
  }
  return p;
}

Perm Perm::from_cycles(int degree, const std::vector<std::vector<int>>& cycles) {
  Perm p = identity(degree);
  std::uint64_t used = 0;
  for (const auto& cycle : cycles) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int a = cycle[i];
      const int b = cycle[(i + 1) % cycle.size()];
      if (a < 0 || a >= degree) throw DomainError("cycle point out of range: " + std::to_string(a));
      if ((used >> a) & 1U) throw DomainError("cycles are not disjoint");
      used |= std::uint64_t{1} << a;
      p.images_[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(b);
    }
  }
  return p;
}

Perm Perm::parse(std::string_view text, int degree) {
  std::vector<std::vector<int>> cycles;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  while (pos < text.size()) {
    if (text[pos] != '(') throw ParseError("expected '(' in cycle text: " + std::string(text));
    ++pos;
    std::vector<int> cycle;
    while (true) {
      skip_ws();
      if (pos >= text.size()) throw ParseError("unterminated cycle: " + std::string(text));
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      if (text[pos] == ',') {
        ++pos;
        continue;
      }
      int value = 0;
      auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
      if (ec != std::errc{}) throw ParseError("bad point in cycle text: " + std::string(text));
      pos = static_cast<std::size_t>(ptr - text.data());
      cycle.push_back(value);
    }
    if (cycle.size() > 1) cycles.push_back(std::move(cycle));
    skip_ws();
  }
  try {
    return from_cycles(degree, cycles);
  } catch (const DomainError& e) {
    throw ParseError(std::string(e.what()) + " in: " + std::string(text));
  }
}

Perm Perm::inverse() const {
  Perm p;
  p.degree_ = degree_;
  for (int i = 0; i < degree_; ++i) p.images_[images_[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
  return p;
}

bool Perm::is_identity() const {
  for (int i = 0; i < degree_; ++i)
    if (images_[static_cast<std::size_t>(i)] != i) return false;
  return true;
}

SubsetCode Perm::support() const {
  std::uint64_t bits = 0;
  for (int i = 0; i < degree_; ++i)
    if (images_[static_cast<std::size_t>(i)] != i) bits |= std::uint64_t{1} << i;
  return SubsetCode(bits);
}

SubsetCode Perm::fixed_points() const { return SubsetCode::full(degree_) - support(); }

std::vector<std::vector<int>> Perm::cycles() const {
  std::vector<std::vector<int>> out;
  std::uint64_t seen = 0;
  for (int i = 0; i < degree_; ++i) {
    if ((seen >> i) & 1U) continue;
    std::vector<int> cycle;
    for (int x = i; !((seen >> x) & 1U); x = images_[static_cast<std::size_t>(x)]) {
      seen |= std::uint64_t{1} << x;
      cycle.push_back(x);
    }
    if (cycle.size() > 1) out.push_back(std::move(cycle));
  }
  return out;
}

std::vector<int> Perm::cycle_type() const {
  std::vector<int> type;
  std::uint64_t seen = 0;
  for (int i = 0; i < degree_; ++i) {
    if ((seen >> i) & 1U) continue;
    int len = 0;
    for (int x = i; !((seen >> x) & 1U); x = images_[static_cast<std::size_t>(x)]) {
      seen |= std::uint64_t{1} << x;
      ++len;
    }
    type.push_back(len);
  }
  std::sort(type.rbegin(), type.rend());
  return type;
}

std::string Perm::to_string() const {
  const auto cs = cycles();
  if (cs.empty()) return "()";
  std::string out;
  for (const auto& c : cs) {
    out += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(c[i]);
    }
    out += ')';
  }
  return out;
}

std::vector<int> Perm::images() const {
  return std::vector<int>(images_.begin(), images_.begin() + degree_);
}

Perm operator*(const Perm& p, const Perm& q) {
  if (p.degree_ != q.degree_) throw DomainError("composing permutations of different degree");
  Perm r;
  r.degree_ = p.degree_;
  for (int i = 0; i < p.degree_; ++i)
    r.images_[static_cast<std::size_t>(i)] = p.images_[q.images_[static_cast<std::size_t>(i)]];
  return r;
}

std::strong_ordering operator<=>(const Perm& a, const Perm& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  for (int i = 0; i < a.degree_; ++i) {
    if (auto c = a.images_[static_cast<std::size_t>(i)] <=> b.images_[static_cast<std::size_t>(i)]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t Perm::hash() const {
  std::uint64_t h = 1469598103934665603ULL ^ degree_;
  for (int i = 0; i < degree_; ++i) {
    h ^= images_[static_cast<std::size_t>(i)];
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace rcw
