#include "rcw/group.hpp"

#include <algorithm>
#include <unordered_set>

#include "rcw/error.hpp"

namespace rcw {

namespace {

void check_domain(const PermGroup& g, SubsetCode l) {
  if (!l.subset_of(SubsetCode::full(g.degree())))
    throw DomainError("subset " + l.render() + " is not over the group's domain of size " +
                      std::to_string(g.degree()));
}

}  // namespace

PermGroup::PermGroup(int degree) : degree_(degree), elements_{Perm::identity(degree)} {}

PermGroup PermGroup::closure(int degree, std::vector<Perm> generators, std::size_t cap) {
  if (degree < 0 || degree > kMaxDomain) throw DomainError("degree out of range");
  PermGroup g(degree);
  for (const Perm& p : generators) {
    if (p.degree() != degree)
      throw DomainError("generator " + p.to_string() + " has degree " + std::to_string(p.degree()) +
                        ", expected " + std::to_string(degree));
  }
  std::erase_if(generators, [](const Perm& p) { return p.is_identity(); });
  g.generators_ = std::move(generators);

  std::unordered_set<Perm> seen{Perm::identity(degree)};
  std::vector<Perm> queue{Perm::identity(degree)};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Perm current = queue[head];
    for (const Perm& s : g.generators_) {
      Perm next = s * current;
      if (seen.insert(next).second) {
        if (seen.size() > cap)
          throw BoundExceeded("group closure exceeds element cap of " + std::to_string(cap));
        queue.push_back(std::move(next));
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  g.elements_ = std::move(queue);
  return g;
}

PermGroup PermGroup::from_elements(int degree, std::vector<Perm> elements) {
  PermGroup g(degree);
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (elements.empty() || !elements.front().is_identity())
    throw PreconditionError("element list must contain the identity");
  g.elements_ = std::move(elements);
  // Greedy generators: add each element not yet generated.
  std::unordered_set<Perm> generated{Perm::identity(degree)};
  for (const Perm& e : g.elements_) {
    if (generated.contains(e)) continue;
    g.generators_.push_back(e);
    std::vector<Perm> queue(generated.begin(), generated.end());
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Perm current = queue[head];
      for (const Perm& s : g.generators_) {
        Perm next = s * current;
        if (generated.insert(next).second) queue.push_back(std::move(next));
      }
    }
  }
  if (generated.size() != g.elements_.size())
    throw PreconditionError("element list is not closed under composition");
  return g;
}

bool PermGroup::contains(const Perm& p) const {
  return p.degree() == degree_ && std::binary_search(elements_.begin(), elements_.end(), p);
}

SubsetCode PermGroup::fixed_points() const {
  SubsetCode fixed = SubsetCode::full(degree_);
  for (const Perm& s : generators_) fixed = fixed & s.fixed_points();
  return fixed;
}

bool PermGroup::is_cyclic() const {
  const std::size_t n = order();
  for (const Perm& e : elements_) {
    std::size_t k = 1;
    for (Perm p = e; !p.is_identity(); p = p * e) ++k;
    if (k == n) return true;
  }
  return false;
}

std::string PermGroup::render() const {
  std::string out = "<";
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (i) out += ", ";
    out += generators_[i].to_string();
  }
  return out + ">";
}

std::vector<SubsetCode> orbit_of_subset(const PermGroup& g, SubsetCode l) {
  check_domain(g, l);
  std::vector<SubsetCode> orbit;
  orbit.reserve(g.order());
  for (const Perm& p : g.elements()) orbit.push_back(p.apply(l));
  std::sort(orbit.begin(), orbit.end(), LexLess{});
  orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
  return orbit;
}

PermGroup setwise_stabilizer(const PermGroup& g, SubsetCode l) {
  check_domain(g, l);
  std::vector<Perm> stab;
  for (const Perm& p : g.elements())
    if (p.apply(l) == l) stab.push_back(p);
  return PermGroup::from_elements(g.degree(), std::move(stab));
}

std::vector<SubsetCode> orbits_on_points(const PermGroup& g, SubsetCode l) {
  check_domain(g, l);
  for (const Perm& s : g.generators()) {
    if (s.apply(l) != l)
      throw PreconditionError("generator " + s.to_string() + " does not map {" + l.render() + "} to itself");
  }
  std::vector<SubsetCode> blocks;
  SubsetCode remaining = l;
  while (!remaining.empty()) {
    const int x = remaining.min_element();
    SubsetCode block = SubsetCode::singleton(x);
    // Closing under the generators suffices for a finite group.
    for (SubsetCode frontier = block; !frontier.empty();) {
      SubsetCode next;
      frontier.for_each([&](int y) {
        for (const Perm& s : g.generators()) next = next.with(s(y));
      });
      frontier = next - block;
      block = block | next;
    }
    blocks.push_back(block);
    remaining = remaining - block;
  }
  return blocks;
}

}  // namespace rcw
