#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "chns/octree/octree.hpp"

namespace chns::octree {

/// A hanging position constrained to the corners of the coarse face or edge it sits on.
template <int Dim>
struct HangingNode {
  Point<Dim> coord{};
  int n = 0;
  std::array<int, 4> owner{};
  std::array<double, 4> weight{};
};

/// Unique non-hanging nodes in SFC order plus the hanging-node constraints.
template <int Dim>
struct NodeTable {
  Lattice<Dim> lattice;
  std::vector<Point<Dim>> coords;
  std::vector<HangingNode<Dim>> hanging;
  int order = 1;

  std::size_t size() const { return coords.size(); }

  /// Index of the non-hanging node at p, or -1.
  long find(const Point<Dim>& p) const {
    auto it = std::lower_bound(coords.begin(), coords.end(), p,
                               [](const auto& a, const auto& b) { return morton_less<Dim>(a, b); });
    if (it == coords.end() || *it != p) return -1;
    return static_cast<long>(it - coords.begin());
  }

  const HangingNode<Dim>* find_hanging(const Point<Dim>& p) const {
    auto it = std::lower_bound(hanging.begin(), hanging.end(), p, [](const auto& a, const auto& b) {
      return morton_less<Dim>(a.coord, b);
    });
    if (it == hanging.end() || it->coord != p) return nullptr;
    return &*it;
  }

  std::array<double, Dim> position(std::size_t i) const { return lattice.to_physical(coords[i]); }

  bool on_boundary(std::size_t i, int axis, int side) const {
    return side == 0 ? coords[i][axis] == 0 : coords[i][axis] == lattice.upper(axis);
  }

  /// Value at a hanging position from owner values of a scalar or interleaved field.
  double hanging_value(const HangingNode<Dim>& h, const std::vector<double>& f, int ndof = 1, int comp = 0) const {
    double v = 0.0;
    for (int k = 0; k < h.n; ++k) v += h.weight[k] * f[static_cast<std::size_t>(h.owner[k]) * ndof + comp];
    return v;
  }
};

namespace detail {

template <int Dim>
struct NodeEntry {
  Point<Dim> p;
  bool regular;
  // for cancellation entries: owner corners of the emitting leaf
  int n;
  std::array<Point<Dim>, 4> owner;
};

// Non-corner half-lattice points on the boundary of o: edge midpoints and
// (3D) face centers, with the corners of the edge/face that own them.
template <int Dim>
void emit_cancellation(const Lattice<Dim>& lat, const Octant<Dim>& o, std::vector<NodeEntry<Dim>>& out) {
  const Coord half = lat.size(o.level) / 2;
  int total = 1;
  for (int d = 0; d < Dim; ++d) total *= 3;
  for (int i = 0; i < total; ++i) {
    std::array<int, Dim> t{};
    int rem = i, mids = 0;
    bool on_bdry = false;
    for (int d = 0; d < Dim; ++d) {
      t[d] = rem % 3;
      rem /= 3;
      if (t[d] == 1) ++mids;
      else on_bdry = true;
    }
    if (mids == 0 || !on_bdry) continue;
    NodeEntry<Dim> e;
    e.regular = false;
    for (int d = 0; d < Dim; ++d) e.p[d] = o.anchor[d] + static_cast<Coord>(t[d]) * half;
    // owners: all combinations of lower/upper along the midpoint axes
    e.n = 1 << mids;
    for (int k = 0; k < e.n; ++k) {
      Point<Dim> q{};
      int bit = 0;
      for (int d = 0; d < Dim; ++d) {
        if (t[d] == 1) {
          q[d] = o.anchor[d] + ((k >> bit) & 1 ? 2 * half : 0);
          ++bit;
        } else {
          q[d] = e.p[d];
        }
      }
      e.owner[static_cast<std::size_t>(k)] = q;
    }
    out.push_back(e);
  }
}

}  // namespace detail

/// Enumerates nodes via corner and cancellation entries: a position carrying
/// both kinds is hanging, regular-only is a node, cancellation-only is dropped.
template <int Dim>
NodeTable<Dim> build_node_table(const Octree<Dim>& tree, int order = 1) {
  CHNS_REQUIRE(order == 1, ContractError, "only linear elements are supported");
  CHNS_REQUIRE(is_balanced(tree), InvariantError,
               "tree is not 2:1 balanced; hanging chains deeper than one level are not supported");
  const auto& lat = tree.lattice;
  std::vector<detail::NodeEntry<Dim>> entries;
  entries.reserve(tree.leaves.size() * (std::size_t{1} << Dim) * 2);
  for (const auto& o : tree.leaves) {
    for (int c = 0; c < (1 << Dim); ++c) {
      detail::NodeEntry<Dim> e;
      e.p = lat.corner(o, c);
      e.regular = true;
      e.n = 0;
      entries.push_back(e);
    }
    if (o.level < lat.max_depth) detail::emit_cancellation(lat, o, entries);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.p != b.p) return morton_less<Dim>(a.p, b.p);
    return a.regular < b.regular;  // cancellation entries first
  });

  NodeTable<Dim> table;
  table.lattice = lat;
  table.order = order;
  std::vector<const detail::NodeEntry<Dim>*> hang_src;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    bool reg = false;
    while (j < entries.size() && entries[j].p == entries[i].p) {
      reg = reg || entries[j].regular;
      ++j;
    }
    const bool canc = !entries[i].regular;
    if (reg && !canc) {
      table.coords.push_back(entries[i].p);
    } else if (reg && canc) {
      hang_src.push_back(&entries[i]);
    }
    i = j;
  }
  table.hanging.reserve(hang_src.size());
  for (const auto* e : hang_src) {
    HangingNode<Dim> h;
    h.coord = e->p;
    h.n = e->n;
    const double w = 1.0 / e->n;
    for (int k = 0; k < e->n; ++k) {
      const long id = table.find(e->owner[static_cast<std::size_t>(k)]);
      CHNS_REQUIRE(id >= 0, InvariantError, "hanging node owner is itself hanging (unbalanced tree)");
      h.owner[static_cast<std::size_t>(k)] = static_cast<int>(id);
      h.weight[static_cast<std::size_t>(k)] = w;
    }
    table.hanging.push_back(h);
  }
  return table;
}

}  // namespace chns::octree
