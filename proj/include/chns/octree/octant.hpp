#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chns/common/errors.hpp"

namespace chns::octree {

using Coord = std::uint32_t;

template <int Dim>
using Point = std::array<Coord, Dim>;

/// A cell of the tree. The anchor is the lower corner on the finest lattice
/// (cells of size extent / 2^max_depth); level 0 is a root cell.
template <int Dim>
struct Octant {
  Point<Dim> anchor{};
  int level = 0;

  friend bool operator==(const Octant&, const Octant&) = default;
};

namespace detail {

// true when the most significant set bit of x is below that of y
inline bool msb_less(Coord x, Coord y) { return x < y && x < (x ^ y); }

}  // namespace detail

/// Z-order comparison of lattice points; axis 0 is the least significant
/// interleaved bit.
template <int Dim>
bool morton_less(const Point<Dim>& a, const Point<Dim>& b) {
  int axis = -1;
  Coord best = 0;
  for (int d = 0; d < Dim; ++d) {
    Coord x = a[d] ^ b[d];
    if (x != 0 && !detail::msb_less(x, best)) {
      axis = d;
      best = x;
    }
  }
  if (axis < 0) return false;
  return a[axis] < b[axis];
}

/// SFC order on octants: Morton order of anchors, ancestors before descendants.
template <int Dim>
bool morton_less(const Octant<Dim>& a, const Octant<Dim>& b) {
  if (a.anchor == b.anchor) return a.level < b.level;
  return morton_less<Dim>(a.anchor, b.anchor);
}

/// Geometry of the integer lattice: a brick of roots[d] root cells per axis,
/// each refined to at most max_depth levels, mapped affinely onto the domain box.
template <int Dim>
struct Lattice {
  int max_depth = 1;
  std::array<int, Dim> roots{};
  std::array<double, Dim> origin{};
  std::array<double, Dim> extent{};

  static Lattice make(int max_depth, std::array<double, Dim> extent,
                      std::array<int, Dim> roots = filled(1), std::array<double, Dim> origin = {}) {
    CHNS_REQUIRE(max_depth >= 1, ConfigError, "max_depth must be >= 1");
    CHNS_REQUIRE(max_depth <= 30, ConfigError,
                 "max_depth " + std::to_string(max_depth) + " exceeds the 30-level lattice capacity");
    for (int d = 0; d < Dim; ++d) {
      CHNS_REQUIRE(roots[d] >= 1, ConfigError, "root count per axis must be >= 1");
      CHNS_REQUIRE(extent[d] > 0.0, ConfigError, "domain extent must be positive");
      // node coordinates reach roots * 2^max_depth inclusive
      const std::uint64_t top = static_cast<std::uint64_t>(roots[d]) << max_depth;
      CHNS_REQUIRE(top <= (std::uint64_t{1} << 31), ConfigError,
                   "roots * 2^max_depth overflows the 32-bit anchor lattice");
    }
    Lattice l;
    l.max_depth = max_depth;
    l.roots = roots;
    l.origin = origin;
    l.extent = extent;
    return l;
  }

  static std::array<int, Dim> filled(int v) {
    std::array<int, Dim> a{};
    a.fill(v);
    return a;
  }

  Coord size(int level) const { return Coord{1} << (max_depth - level); }
  Coord root_size() const { return size(0); }
  Coord upper(int d) const { return static_cast<Coord>(roots[d]) * root_size(); }

  /// Physical length of one lattice unit along axis d.
  double unit(int d) const { return extent[d] / (static_cast<double>(roots[d]) * root_size()); }

  double to_physical(int d, Coord c) const { return origin[d] + unit(d) * static_cast<double>(c); }

  std::array<double, Dim> to_physical(const Point<Dim>& p) const {
    std::array<double, Dim> x{};
    for (int d = 0; d < Dim; ++d) x[d] = to_physical(d, p[d]);
    return x;
  }

  std::array<double, Dim> cell_lengths(int level) const {
    std::array<double, Dim> h{};
    for (int d = 0; d < Dim; ++d) h[d] = unit(d) * static_cast<double>(size(level));
    return h;
  }

  Octant<Dim> child(const Octant<Dim>& o, int c) const {
    Octant<Dim> ch = o;
    ch.level = o.level + 1;
    const Coord half = size(ch.level);
    for (int d = 0; d < Dim; ++d)
      if (c & (1 << d)) ch.anchor[d] += half;
    return ch;
  }

  Octant<Dim> parent(const Octant<Dim>& o) const {
    Octant<Dim> p = o;
    p.level = o.level - 1;
    const Coord mask = ~(size(p.level) - 1);
    for (int d = 0; d < Dim; ++d) p.anchor[d] &= mask;
    return p;
  }

  /// Index of o among its siblings (Morton child number).
  int child_number(const Octant<Dim>& o) const {
    int c = 0;
    const Coord s = size(o.level);
    for (int d = 0; d < Dim; ++d)
      if (o.anchor[d] & s) c |= 1 << d;
    return c;
  }

  Point<Dim> corner(const Octant<Dim>& o, int c) const {
    Point<Dim> p = o.anchor;
    const Coord s = size(o.level);
    for (int d = 0; d < Dim; ++d)
      if (c & (1 << d)) p[d] += s;
    return p;
  }

  bool is_ancestor_or_self(const Octant<Dim>& a, const Octant<Dim>& b) const {
    if (a.level > b.level) return false;
    const Coord s = size(a.level);
    for (int d = 0; d < Dim; ++d)
      if (b.anchor[d] < a.anchor[d] || b.anchor[d] >= a.anchor[d] + s) return false;
    return true;
  }

  /// Point lies in the closed box of o.
  bool incident(const Octant<Dim>& o, const Point<Dim>& p) const {
    const Coord s = size(o.level);
    for (int d = 0; d < Dim; ++d)
      if (p[d] < o.anchor[d] || p[d] > o.anchor[d] + s) return false;
    return true;
  }

  bool valid(const Octant<Dim>& o) const {
    if (o.level < 0 || o.level > max_depth) return false;
    const Coord s = size(o.level);
    for (int d = 0; d < Dim; ++d)
      if (o.anchor[d] % s != 0 || o.anchor[d] >= upper(d)) return false;
    return true;
  }

  /// Last finest-level cell inside o in SFC order (its upper corner cell).
  Octant<Dim> last_descendant(const Octant<Dim>& o) const {
    Octant<Dim> l;
    l.level = max_depth;
    const Coord s = size(o.level);
    for (int d = 0; d < Dim; ++d) l.anchor[d] = o.anchor[d] + s - 1;
    return l;
  }

  std::vector<Octant<Dim>> root_cells() const;
};

template <int Dim>
std::vector<Octant<Dim>> Lattice<Dim>::root_cells() const {
  std::vector<Octant<Dim>> out;
  int total = 1;
  for (int d = 0; d < Dim; ++d) total *= roots[d];
  out.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    Octant<Dim> o;
    int rem = i;
    for (int d = 0; d < Dim; ++d) {
      o.anchor[d] = static_cast<Coord>(rem % roots[d]) * root_size();
      rem /= roots[d];
    }
    out.push_back(o);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return morton_less<Dim>(a, b); });
  return out;
}

}  // namespace chns::octree
