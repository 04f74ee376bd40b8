#pragma once

#include <vector>

#include "chns/octree/octree.hpp"

namespace chns::octree {

enum class Flag : unsigned char { Keep, Refine, Coarsen };

using RefinementFlags = std::vector<Flag>;

/// Applies one level of change per leaf. A family coarsens only when every
/// sibling is a leaf flagged Coarsen; the result is re-balanced, which may
/// undo a coarsening next to finer leaves.
template <int Dim>
Octree<Dim> refine_and_coarsen(const Octree<Dim>& tree, const RefinementFlags& flags) {
  CHNS_REQUIRE(flags.size() == tree.leaves.size(), ContractError, "one refinement flag per leaf is required");
  const auto& lat = tree.lattice;
  constexpr std::size_t nch = std::size_t{1} << Dim;
  Octree<Dim> out;
  out.lattice = lat;
  out.leaves.reserve(tree.leaves.size());
  for (std::size_t i = 0; i < tree.leaves.size();) {
    const auto& o = tree.leaves[i];
    if (flags[i] == Flag::Coarsen && o.level > 0 && lat.child_number(o) == 0 && i + nch <= tree.leaves.size()) {
      const Octant<Dim> par = lat.parent(o);
      bool family = true;
      for (std::size_t c = 0; c < nch && family; ++c) {
        family = tree.leaves[i + c] == lat.child(par, static_cast<int>(c)) && flags[i + c] == Flag::Coarsen;
      }
      if (family) {
        out.leaves.push_back(par);
        i += nch;
        continue;
      }
    }
    if (flags[i] == Flag::Refine && o.level < lat.max_depth) {
      for (std::size_t c = 0; c < nch; ++c) out.leaves.push_back(lat.child(o, static_cast<int>(c)));
    } else {
      out.leaves.push_back(o);
    }
    ++i;
  }
  return enforce_2to1_balance(std::move(out));
}

}  // namespace chns::octree
