#pragma once

#include <cmath>

#include "chns/cases/case_spec.hpp"
#include "chns/octree/refine.hpp"

namespace chns::cases {

inline constexpr double kBandThreshold = 0.95;

template <int Dim>
bool touches_wall(const octree::Lattice<Dim>& lat, const octree::Octant<Dim>& o) {
  const auto s = lat.size(o.level);
  for (int d = 0; d < Dim; ++d)
    if (o.anchor[d] == 0 || o.anchor[d] + s == lat.upper(d)) return true;
  return false;
}

/// Level a leaf should have given its nodal phi values.
template <int Dim>
int target_level(const octree::Lattice<Dim>& lat, const octree::Octant<Dim>& o,
                 const std::array<double, (1 << Dim)>& phi, const AmrLevels& lv) {
  for (double v : phi)
    if (std::abs(v) <= kBandThreshold) return lv.interface;
  return touches_wall(lat, o) ? lv.wall : lv.bkg;
}

/// One-level refine/coarsen flags toward the interface, wall and bulk levels.
template <int Dim>
octree::RefinementFlags interface_refine_indicator(const core::Mesh<Dim>& m, const core::Vec& phi, const AmrLevels& lv) {
  octree::RefinementFlags flags(m.tree.leaves.size(), octree::Flag::Keep);
  octree::for_each_leaf<Dim>(m.tree, m.table, [&](const octree::Element<Dim>& e) {
    const int t = target_level(m.tree.lattice, e.oct, e.corner_values(phi), lv);
    if (e.oct.level < t)
      flags[e.index] = octree::Flag::Refine;
    else if (e.oct.level > t)
      flags[e.index] = octree::Flag::Coarsen;
  });
  return flags;
}

/// Number of leaves touching the band (|phi| <= 0.95 at a corner) that are not at the interface level.
template <int Dim>
std::size_t band_leaves_below_target(const core::Mesh<Dim>& m, const core::Vec& phi, const AmrLevels& lv) {
  std::size_t n = 0;
  octree::for_each_leaf<Dim>(m.tree, m.table, [&](const octree::Element<Dim>& e) {
    const auto c = e.corner_values(phi);
    for (double v : c)
      if (std::abs(v) <= kBandThreshold) {
        if (e.oct.level != lv.interface) ++n;
        break;
      }
  });
  return n;
}

}  // namespace chns::cases
