#pragma once

// Brute-force reference implementations used to check the tree machinery.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "chns/fem/shape.hpp"
#include "chns/octree/node_table.hpp"
#include "chns/octree/traversal.hpp"

namespace oracle {

using namespace chns::octree;

template <int Dim>
bool boxes_adjacent(const Lattice<Dim>& lat, const Octant<Dim>& a, const Octant<Dim>& b, int& shared_dims) {
  // closed boxes touch, and the contact has dimension >= 1 (edge or face)
  const Coord sa = lat.size(a.level), sb = lat.size(b.level);
  shared_dims = 0;
  for (int d = 0; d < Dim; ++d) {
    const Coord lo = std::max(a.anchor[d], b.anchor[d]);
    const Coord hi = std::min(a.anchor[d] + sa, b.anchor[d] + sb);
    if (lo > hi) return false;
    if (lo < hi) ++shared_dims;
  }
  return true;
}

/// Pairwise check: face/edge-adjacent leaves differ by at most one level.
template <int Dim>
bool pairwise_balanced(const Octree<Dim>& t) {
  for (std::size_t i = 0; i < t.leaves.size(); ++i)
    for (std::size_t j = i + 1; j < t.leaves.size(); ++j) {
      int sd = 0;
      if (!boxes_adjacent(t.lattice, t.leaves[i], t.leaves[j], sd)) continue;
      if (sd == Dim) return false;  // overlap
      if (sd >= 1 && std::abs(t.leaves[i].level - t.leaves[j].level) > 1) return false;
    }
  return true;
}

/// Leaves tile the domain: pairwise disjoint and measure sums to the brick.
template <int Dim>
bool tiles_domain(const Octree<Dim>& t) {
  long double vol = 0;
  for (const auto& o : t.leaves) {
    long double v = 1;
    for (int d = 0; d < Dim; ++d) v *= t.lattice.size(o.level);
    vol += v;
  }
  long double total = 1;
  for (int d = 0; d < Dim; ++d) total *= t.lattice.upper(d);
  if (vol != total) return false;
  for (std::size_t i = 0; i < t.leaves.size(); ++i)
    for (std::size_t j = i + 1; j < t.leaves.size(); ++j) {
      int sd = 0;
      if (boxes_adjacent(t.lattice, t.leaves[i], t.leaves[j], sd) && sd == Dim) return false;
    }
  return true;
}

/// Random 2:1-balanced tree: refine each octant with a probability decaying with level.
template <int Dim>
Octree<Dim> random_tree(std::mt19937_64& rng, int max_depth, std::size_t max_leaves) {
  const auto lat = Lattice<Dim>::make(max_depth, [] {
    std::array<double, Dim> e{};
    e.fill(1.0);
    return e;
  }());
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double p = 0.35 + 0.3 * U(rng);
  Octree<Dim> t = construct_tree<Dim>(lat, [&](const Octant<Dim>& o) { return o.level == 0 || U(rng) < p; });
  t = enforce_2to1_balance(std::move(t));
  while (t.leaves.size() > max_leaves) {
    t = construct_tree<Dim>(lat, [&](const Octant<Dim>& o) { return o.level == 0 || U(rng) < p * 0.7; });
    t = enforce_2to1_balance(std::move(t));
  }
  return t;
}

/// Element-to-node map built by brute force: every leaf corner is classified by
/// scanning all leaves for one that contains it as a non-corner boundary point.
template <int Dim>
struct MapAssembler {
  static constexpr int nc = 1 << Dim;
  std::map<std::array<Coord, Dim>, int> dof;
  // per leaf, per corner: list of (dof, weight)
  std::vector<std::array<std::vector<std::pair<int, double>>, nc>> conn;

  explicit MapAssembler(const Octree<Dim>& t) {
    const auto& lat = t.lattice;
    std::vector<std::array<Coord, Dim>> pts;
    for (const auto& o : t.leaves)
      for (int c = 0; c < nc; ++c) pts.push_back(lat.corner(o, c));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::map<std::array<Coord, Dim>, const Octant<Dim>*> hang_src;
    for (const auto& p : pts) {
      const Octant<Dim>* src = nullptr;
      for (const auto& o : t.leaves) {
        if (!lat.incident(o, p)) continue;
        bool corner = true;
        for (int d = 0; d < Dim; ++d)
          if (p[d] != o.anchor[d] && p[d] != o.anchor[d] + lat.size(o.level)) corner = false;
        if (!corner) {
          src = &o;
          break;
        }
      }
      if (src) hang_src[p] = src;
    }
    // nodes numbered in SFC order to match the table
    std::vector<std::array<Coord, Dim>> regular;
    for (const auto& p : pts)
      if (!hang_src.count(p)) regular.push_back(p);
    std::sort(regular.begin(), regular.end(), [](const auto& a, const auto& b) { return morton_less<Dim>(a, b); });
    for (std::size_t i = 0; i < regular.size(); ++i) dof[regular[i]] = static_cast<int>(i);

    conn.resize(t.leaves.size());
    for (std::size_t e = 0; e < t.leaves.size(); ++e) {
      for (int c = 0; c < nc; ++c) {
        const auto p = lat.corner(t.leaves[e], c);
        auto& lst = conn[e][static_cast<std::size_t>(c)];
        auto it = hang_src.find(p);
        if (it == hang_src.end()) {
          lst.push_back({dof.at(p), 1.0});
          continue;
        }
        const Octant<Dim>& K = *it->second;
        std::array<double, Dim> xi{};
        for (int d = 0; d < Dim; ++d)
          xi[d] = 2.0 * static_cast<double>(p[d] - K.anchor[d]) / static_cast<double>(lat.size(K.level)) - 1.0;
        const auto N = chns::fem::shape_values<Dim>(xi);
        for (int a = 0; a < nc; ++a)
          if (N[static_cast<std::size_t>(a)] != 0.0) lst.push_back({dof.at(lat.corner(K, a)), N[static_cast<std::size_t>(a)]});
      }
    }
  }

  std::size_t size() const { return dof.size(); }

  /// Dense global matrix from element matrices E(leaf) of size (nc*ndof)^2.
  template <class F>
  std::vector<double> dense_matrix(const Octree<Dim>& t, int ndof, F&& kernel) const {
    const std::size_t n = size() * static_cast<std::size_t>(ndof);
    const std::size_t ne = static_cast<std::size_t>(nc * ndof);
    std::vector<double> A(n * n, 0.0), E(ne * ne);
    for (std::size_t e = 0; e < t.leaves.size(); ++e) {
      std::fill(E.begin(), E.end(), 0.0);
      kernel(t.leaves[e], E.data());
      for (int ci = 0; ci < nc; ++ci)
        for (const auto& [gi, wi] : conn[e][static_cast<std::size_t>(ci)])
          for (int cj = 0; cj < nc; ++cj)
            for (const auto& [gj, wj] : conn[e][static_cast<std::size_t>(cj)])
              for (int a = 0; a < ndof; ++a)
                for (int b = 0; b < ndof; ++b)
                  A[(static_cast<std::size_t>(gi) * ndof + a) * n + static_cast<std::size_t>(gj) * ndof + b] +=
                      wi * wj * E[(static_cast<std::size_t>(ci) * ndof + a) * ne + static_cast<std::size_t>(cj) * ndof + b];
    }
    return A;
  }
};

/// Deterministic pseudo-random symmetric element matrix keyed on the octant.
template <int Dim>
void random_symmetric_kernel(const Octant<Dim>& o, int ndof, std::uint64_t seed, double* E) {
  std::uint64_t key = seed ^ (static_cast<std::uint64_t>(o.level) * 0x9E3779B97F4A7C15ull);
  for (int d = 0; d < Dim; ++d) key = key * 1000003ull + o.anchor[d];
  std::mt19937_64 rng(key);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int ne = (1 << Dim) * ndof;
  for (int i = 0; i < ne; ++i)
    for (int j = i; j < ne; ++j) E[i * ne + j] = E[j * ne + i] = U(rng);
}

}  // namespace oracle
