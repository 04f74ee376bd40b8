#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "chns/core/mesh.hpp"

namespace chns::io {

/// Nodal fields for a VTK dump. Empty vectors are skipped.
struct VtkFields {
  const core::Vec* velocity = nullptr;  // Dim components per node
  const core::Vec* pressure = nullptr;
  const core::Vec* phi = nullptr;
  const core::Vec* mu = nullptr;
  const core::Vec* vorticity = nullptr;
  const core::Vec* Q = nullptr;
};

/// Legacy ASCII unstructured grid. Every leaf corner becomes a point, hanging corners
/// included, with the value interpolated from their owners, so the cells are conforming.
template <int Dim>
void write_vtk(const core::Mesh<Dim>& m, const VtkFields& f, const std::string& path) {
  constexpr int nc = 1 << Dim;
  const auto& lat = m.tree.lattice;
  std::map<octree::Point<Dim>, std::size_t> index;
  std::vector<const octree::Element<Dim>*> owner_el;
  std::vector<int> owner_corner;
  std::vector<std::array<std::size_t, nc>> cells;
  std::vector<octree::Element<Dim>> elems;
  elems.reserve(m.tree.leaves.size());
  octree::for_each_leaf<Dim>(m.tree, m.table, [&](const octree::Element<Dim>& e) { elems.push_back(e); });
  cells.resize(elems.size());
  for (std::size_t k = 0; k < elems.size(); ++k) {
    for (int c = 0; c < nc; ++c) {
      const auto p = lat.corner(elems[k].oct, c);
      auto [it, fresh] = index.try_emplace(p, owner_el.size());
      if (fresh) {
        owner_el.push_back(&elems[k]);
        owner_corner.push_back(c);
      }
      cells[k][static_cast<std::size_t>(c)] = it->second;
    }
  }
  const std::size_t np = owner_el.size();
  std::vector<octree::Point<Dim>> pts(np);
  for (const auto& [p, i] : index) pts[i] = p;

  auto value = [&](const core::Vec& v, int ndof, int comp, std::size_t i) {
    return owner_el[i]->corner_values(v, ndof, comp)[static_cast<std::size_t>(owner_corner[i])];
  };

  std::string s;
  s.reserve(np * 64);
  char buf[96];
  s += "# vtk DataFile Version 3.0\nchns fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  s += "POINTS " + std::to_string(np) + " double\n";
  for (const auto& p : pts) {
    const auto x = lat.to_physical(p);
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", x[0], Dim > 1 ? x[1] : 0.0, Dim > 2 ? x[Dim - 1] : 0.0);
    s += buf;
  }
  // VTK orders quad and hex corners counter-clockwise per layer
  static constexpr int perm[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  s += "CELLS " + std::to_string(cells.size()) + " " + std::to_string(cells.size() * (nc + 1)) + "\n";
  for (const auto& c : cells) {
    s += std::to_string(nc);
    for (int a = 0; a < nc; ++a) s += " " + std::to_string(c[static_cast<std::size_t>(perm[a])]);
    s += "\n";
  }
  s += "CELL_TYPES " + std::to_string(cells.size()) + "\n";
  for (std::size_t k = 0; k < cells.size(); ++k) s += Dim == 2 ? "9\n" : "12\n";

  s += "POINT_DATA " + std::to_string(np) + "\n";
  auto scalar = [&](const char* name, const core::Vec* v) {
    if (!v || v->empty()) return;
    CHNS_REQUIRE(v->size() == m.nodes(), ContractError, std::string("field '") + name + "' has the wrong size");
    s += std::string("SCALARS ") + name + " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < np; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", value(*v, 1, 0, i));
      s += buf;
    }
  };
  if (f.velocity && !f.velocity->empty()) {
    CHNS_REQUIRE(f.velocity->size() == m.nodes() * Dim, ContractError, "velocity field has the wrong size");
    s += "VECTORS velocity double\n";
    for (std::size_t i = 0; i < np; ++i) {
      double v[3] = {0.0, 0.0, 0.0};
      for (int d = 0; d < Dim; ++d) v[d] = value(*f.velocity, Dim, d, i);
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
      s += buf;
    }
  }
  scalar("pressure", f.pressure);
  scalar("phi", f.phi);
  scalar("mu", f.mu);
  scalar("vorticity", f.vorticity);
  scalar("Q", f.Q);

  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const bool ok = std::fwrite(s.data(), 1, s.size(), out) == s.size();
  if (std::fclose(out) != 0 || !ok) throw IoError("write failed on '" + path + "'");
}

}  // namespace chns::io
