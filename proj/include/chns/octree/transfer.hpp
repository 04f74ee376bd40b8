#pragma once

#include <vector>

#include "chns/fem/shape.hpp"
#include "chns/octree/traversal.hpp"

namespace chns::octree {

/// Moves a nodal field between two trees that differ by at most one level per
/// leaf. Refined regions evaluate the old element interpolant at the new nodes;
/// coarsened regions inject the coincident child values.
template <int Dim>
std::vector<double> intergrid_transfer(const Octree<Dim>& old_tree, const NodeTable<Dim>& old_table,
                                       const Octree<Dim>& new_tree, const NodeTable<Dim>& new_table,
                                       const std::vector<double>& field, int ndof = 1) {
  constexpr int nc = Element<Dim>::nc;
  const std::size_t nd = static_cast<std::size_t>(ndof);
  CHNS_REQUIRE(field.size() == old_table.size() * nd, ContractError, "field length does not match the old node table");
  const auto& lat = old_tree.lattice;

  std::vector<double> corner(old_tree.leaves.size() * nc * nd);
  for_each_leaf<Dim>(old_tree, old_table, [&](const Element<Dim>& e) {
    e.gather(field, ndof, &corner[e.index * nc * nd]);
  });
  auto old_value = [&](std::size_t leaf, int c, std::size_t k) { return corner[(leaf * nc + static_cast<std::size_t>(c)) * nd + k]; };

  std::vector<double> out(new_table.size() * nd, 0.0);
  for_each_leaf<Dim>(new_tree, new_table, [&](const Element<Dim>& e) {
    const auto& L = e.oct;
    const std::size_t k0 = old_tree.locate(L.anchor);
    const auto& O = old_tree.leaves[k0];
    for (int c = 0; c < nc; ++c) {
      const CornerRef& r = e.ref[static_cast<std::size_t>(c)];
      if (r.n != 1) continue;
      double* dst = &out[static_cast<std::size_t>(r.id[0]) * nd];
      if (O.level <= L.level) {
        CHNS_REQUIRE(L.level - O.level <= 1, ContractError,
                     "mesh changed by more than one level; split the adaptation into several passes");
        // reference coordinates of the new corner inside the old element
        std::array<double, Dim> xi{};
        const Point<Dim> p = lat.corner(L, c);
        const double s = static_cast<double>(lat.size(O.level));
        for (int d = 0; d < Dim; ++d) xi[d] = 2.0 * static_cast<double>(p[d] - O.anchor[d]) / s - 1.0;
        const auto N = fem::shape_values<Dim>(xi);
        for (std::size_t k = 0; k < nd; ++k) {
          double v = 0.0;
          for (int a = 0; a < nc; ++a) v += N[static_cast<std::size_t>(a)] * old_value(k0, a, k);
          dst[k] = v;
        }
      } else {
        CHNS_REQUIRE(O.level - L.level == 1, ContractError,
                     "mesh changed by more than one level; split the adaptation into several passes");
        const auto range = old_tree.descendant_range(L);
        CHNS_REQUIRE(range.second - range.first == static_cast<std::size_t>(nc), ContractError,
                     "mesh changed by more than one level; split the adaptation into several passes");
        // corner c of the parent is corner c of child c
        const std::size_t kc = range.first + static_cast<std::size_t>(c);
        for (std::size_t k = 0; k < nd; ++k) dst[k] = old_value(kc, c, k);
      }
    }
  });
  return out;
}

}  // namespace chns::octree
