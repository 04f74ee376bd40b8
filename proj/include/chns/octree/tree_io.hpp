#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "chns/octree/octree.hpp"

namespace chns::octree {

/// Header "DIM MAXDEPTH NLEAVES", then "level ax ay [az]" per leaf.
template <int Dim>
void write_tree(std::ostream& os, const Octree<Dim>& t) {
  os << Dim << ' ' << t.lattice.max_depth << ' ' << t.leaves.size() << '\n';
  for (const auto& o : t.leaves) {
    os << o.level;
    for (int d = 0; d < Dim; ++d) os << ' ' << o.anchor[d];
    os << '\n';
  }
}

/// Reads leaves onto the given lattice geometry; the file's depth must match.
template <int Dim>
Octree<Dim> read_tree(std::istream& is, const Lattice<Dim>& lattice) {
  int dim = 0, depth = 0;
  std::size_t n = 0;
  if (!(is >> dim >> depth >> n)) throw IoError("tree file: malformed header");
  if (dim != Dim) throw IoError("tree file: dimension " + std::to_string(dim) + " does not match");
  if (depth != lattice.max_depth) throw IoError("tree file: max depth does not match the lattice");
  Octree<Dim> t;
  t.lattice = lattice;
  t.leaves.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& o = t.leaves[i];
    if (!(is >> o.level)) throw IoError("tree file: truncated at leaf " + std::to_string(i));
    for (int d = 0; d < Dim; ++d)
      if (!(is >> o.anchor[d])) throw IoError("tree file: truncated at leaf " + std::to_string(i));
    if (!lattice.valid(o)) throw IoError("tree file: invalid octant at leaf " + std::to_string(i));
    if (i > 0 && !morton_less<Dim>(t.leaves[i - 1], o)) throw IoError("tree file: leaves are not SFC sorted");
  }
  return t;
}

template <int Dim>
void save_tree(const std::string& path, const Octree<Dim>& t) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_tree(f, t);
  if (!f) throw IoError("write failed: " + path);
}

template <int Dim>
Octree<Dim> load_tree(const std::string& path, const Lattice<Dim>& lattice) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return read_tree(f, lattice);
}

}  // namespace chns::octree
