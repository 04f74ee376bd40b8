#pragma once

#include <algorithm>
#include <functional>
#include <type_traits>
#include <vector>

#include "chns/octree/octant.hpp"

namespace chns::octree {

/// Complete linear octree: SFC-sorted leaves tiling the lattice brick.
template <int Dim>
struct Octree {
  Lattice<Dim> lattice;
  std::vector<Octant<Dim>> leaves;

  std::size_t size() const { return leaves.size(); }

  int max_level() const {
    int m = 0;
    for (const auto& o : leaves) m = std::max(m, o.level);
    return m;
  }

  /// Index of the leaf containing the finest lattice cell anchored at p.
  std::size_t locate(const Point<Dim>& p) const {
    Octant<Dim> q{p, lattice.max_depth};
    auto it = std::upper_bound(leaves.begin(), leaves.end(), q,
                               [](const auto& a, const auto& b) { return morton_less<Dim>(a, b); });
    CHNS_REQUIRE(it != leaves.begin(), InvariantError, "point outside the tree");
    const std::size_t idx = static_cast<std::size_t>(it - leaves.begin()) - 1;
    CHNS_REQUIRE(lattice.is_ancestor_or_self(leaves[idx], q), InvariantError,
                 "leaves do not tile the domain");
    return idx;
  }

  /// Half-open range of leaves that are descendants of (or equal to) o.
  std::pair<std::size_t, std::size_t> descendant_range(const Octant<Dim>& o) const {
    auto less = [](const auto& a, const auto& b) { return morton_less<Dim>(a, b); };
    auto lo = std::lower_bound(leaves.begin(), leaves.end(), o, less);
    auto hi = std::upper_bound(lo, leaves.end(), lattice.last_descendant(o), less);
    return {static_cast<std::size_t>(lo - leaves.begin()), static_cast<std::size_t>(hi - leaves.begin())};
  }
};

namespace detail {

/// Offsets in {-1,0,1}^Dim with 1..Dim-1 nonzero entries: face neighbors in 2D,
/// face and edge neighbors in 3D.
template <int Dim>
const std::vector<std::array<int, Dim>>& balance_directions() {
  static const std::vector<std::array<int, Dim>> dirs = [] {
    std::vector<std::array<int, Dim>> out;
    int total = 1;
    for (int d = 0; d < Dim; ++d) total *= 3;
    for (int i = 0; i < total; ++i) {
      std::array<int, Dim> v{};
      int rem = i, nz = 0;
      for (int d = 0; d < Dim; ++d) {
        v[d] = rem % 3 - 1;
        rem /= 3;
        if (v[d] != 0) ++nz;
      }
      if (nz >= 1 && nz <= Dim - 1) out.push_back(v);
    }
    return out;
  }();
  return dirs;
}

/// Same-size neighbor of o in direction dir; false if it leaves the domain.
template <int Dim>
bool neighbor(const Lattice<Dim>& lat, const Octant<Dim>& o, const std::type_identity_t<std::array<int, Dim>>& dir, Octant<Dim>& out) {
  const Coord s = lat.size(o.level);
  out = o;
  for (int d = 0; d < Dim; ++d) {
    if (dir[d] < 0) {
      if (o.anchor[d] < s) return false;
      out.anchor[d] -= s;
    } else if (dir[d] > 0) {
      if (o.anchor[d] + s >= lat.upper(d)) return false;
      out.anchor[d] += s;
    }
  }
  return true;
}

template <int Dim>
void refine_marked(Octree<Dim>& t, const std::vector<char>& mark) {
  std::vector<Octant<Dim>> next;
  next.reserve(t.leaves.size() + 8 * static_cast<std::size_t>(std::count(mark.begin(), mark.end(), 1)));
  for (std::size_t i = 0; i < t.leaves.size(); ++i) {
    if (mark[i]) {
      for (int c = 0; c < (1 << Dim); ++c) next.push_back(t.lattice.child(t.leaves[i], c));
    } else {
      next.push_back(t.leaves[i]);
    }
  }
  t.leaves.swap(next);
}

}  // namespace detail

/// Top-down refinement while pred holds; leaves come out in SFC order.
template <int Dim>
Octree<Dim> construct_tree(const Lattice<Dim>& lattice, const std::function<bool(const Octant<Dim>&)>& pred) {
  Octree<Dim> t;
  t.lattice = lattice;
  std::function<void(const Octant<Dim>&)> rec = [&](const Octant<Dim>& o) {
    if (o.level < lattice.max_depth && pred(o)) {
      for (int c = 0; c < (1 << Dim); ++c) rec(lattice.child(o, c));
    } else {
      t.leaves.push_back(o);
    }
  };
  for (const auto& r : lattice.root_cells()) rec(r);
  return t;
}

template <int Dim>
Octree<Dim> construct_tree(const std::array<double, Dim>& extent,
                           const std::function<bool(const Octant<Dim>&)>& pred, int max_depth) {
  return construct_tree(Lattice<Dim>::make(max_depth, extent), pred);
}

template <int Dim>
Octree<Dim> uniform_tree(const Lattice<Dim>& lattice, int level) {
  return construct_tree<Dim>(lattice, [level](const Octant<Dim>& o) { return o.level < level; });
}

/// Leaves that have a face (or 3D edge) neighbor two or more levels coarser.
template <int Dim>
std::vector<char> coarse_neighbor_marks(const Octree<Dim>& t, bool& any) {
  std::vector<char> mark(t.leaves.size(), 0);
  any = false;
  for (const auto& b : t.leaves) {
    if (b.level < 2) continue;
    for (const auto& dir : detail::balance_directions<Dim>()) {
      Octant<Dim> n;
      if (!detail::neighbor(t.lattice, b, dir, n)) continue;
      const std::size_t j = t.locate(n.anchor);
      if (t.leaves[j].level < b.level - 1) {
        mark[j] = 1;
        any = true;
      }
    }
  }
  return mark;
}

template <int Dim>
bool is_balanced(const Octree<Dim>& t) {
  bool any = false;
  coarse_neighbor_marks(t, any);
  return !any;
}

/// Refines until adjacent leaves differ by at most one level. Never coarsens.
template <int Dim>
Octree<Dim> enforce_2to1_balance(Octree<Dim> t) {
  for (;;) {
    bool any = false;
    auto mark = coarse_neighbor_marks(t, any);
    if (!any) break;
    detail::refine_marked(t, mark);
  }
  return t;
}

}  // namespace chns::octree
