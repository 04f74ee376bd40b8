#pragma once

#include <array>
#include <string>
#include <vector>

#include "chns/fem/element_values.hpp"
#include "chns/linalg/csr.hpp"
#include "chns/octree/node_table.hpp"
#include "chns/octree/traversal.hpp"

namespace chns::core {

using linalg::Vec;

enum class VelocityBc { Unset, NoSlip, FreeSlip };

inline std::string to_string(VelocityBc b) {
  switch (b) {
    case VelocityBc::NoSlip: return "no-slip";
    case VelocityBc::FreeSlip: return "free-slip";
    default: return "unset";
  }
}

inline VelocityBc parse_velocity_bc(const std::string& s) {
  if (s == "no-slip" || s == "noslip") return VelocityBc::NoSlip;
  if (s == "free-slip" || s == "slip") return VelocityBc::FreeSlip;
  throw ConfigError("unknown velocity boundary condition '" + s + "'");
}

/// Velocity condition per face, indexed 2*axis + side (side 0 is the lower face).
/// Free slip fixes only the normal component; phi and mu are always no-flux.
template <int Dim>
struct BoundarySpec {
  std::array<VelocityBc, 2 * Dim> face{};

  static BoundarySpec all(VelocityBc b) {
    BoundarySpec s;
    s.face.fill(b);
    return s;
  }

  void validate() const {
    for (int f = 0; f < 2 * Dim; ++f)
      CHNS_REQUIRE(face[static_cast<std::size_t>(f)] != VelocityBc::Unset, ConfigError,
                   "velocity boundary condition missing on face " + std::to_string(f));
  }
};

/// Tree, node table and everything derived from them that the solvers reuse.
template <int Dim>
struct Mesh {
  octree::Octree<Dim> tree;
  octree::NodeTable<Dim> table;
  octree::NodeGraph graph;
  linalg::CsrMatrix scalar_pattern;
  linalg::CsrMatrix pair_pattern;  // two interleaved dofs per node
  Vec lumped_mass;
  std::vector<unsigned char> faces;  // bit 2*axis+side set for boundary nodes
  double volume = 0.0;

  std::size_t nodes() const { return table.size(); }

  std::array<double, Dim> position(std::size_t i) const { return table.position(i); }
};

template <int Dim>
Mesh<Dim> make_mesh(octree::Octree<Dim> tree) {
  Mesh<Dim> m;
  m.tree = std::move(tree);
  m.table = octree::build_node_table(m.tree);
  m.graph = octree::build_node_graph(m.tree, m.table);
  m.scalar_pattern = octree::block_pattern(m.graph, 1);
  m.pair_pattern = octree::block_pattern(m.graph, 2);
  m.lumped_mass = octree::assemble_vector<Dim>(m.tree, m.table, 1, [](const octree::Element<Dim>& e, double* out) {
    double vol = 1.0;
    for (int d = 0; d < Dim; ++d) vol *= e.h[d];
    for (int c = 0; c < (1 << Dim); ++c) out[c] = vol / (1 << Dim);
  });
  m.volume = 0.0;
  for (double v : m.lumped_mass) m.volume += v;
  m.faces.assign(m.nodes(), 0);
  for (std::size_t i = 0; i < m.nodes(); ++i)
    for (int d = 0; d < Dim; ++d)
      for (int s = 0; s < 2; ++s)
        if (m.table.on_boundary(i, d, s)) m.faces[i] |= static_cast<unsigned char>(1u << (2 * d + s));
  return m;
}

/// Nodes whose velocity component `comp` is prescribed (to zero) by the boundary spec.
template <int Dim>
std::vector<char> velocity_constraints(const Mesh<Dim>& m, const BoundarySpec<Dim>& bc, int comp) {
  std::vector<char> fixed(m.nodes(), 0);
  for (std::size_t i = 0; i < m.nodes(); ++i) {
    for (int f = 0; f < 2 * Dim; ++f) {
      if (!(m.faces[i] & (1u << f))) continue;
      const VelocityBc b = bc.face[static_cast<std::size_t>(f)];
      if (b == VelocityBc::NoSlip || (b == VelocityBc::FreeSlip && f / 2 == comp)) fixed[i] = 1;
    }
  }
  return fixed;
}

/// Element kernel with quadrature data prepared: fn(e, ev, out).
template <int Dim>
using QuadKernel = std::function<void(const octree::Element<Dim>&, const fem::ElementValues<Dim>&, double*)>;

template <int Dim>
Vec assemble_rhs(const Mesh<Dim>& m, int ndof, const QuadKernel<Dim>& k, int nq1 = 2) {
  return octree::assemble_vector<Dim>(m.tree, m.table, ndof, [&](const octree::Element<Dim>& e, double* out) {
    fem::ElementValues<Dim> ev(nq1);
    ev.reinit(e.x0, e.h);
    k(e, ev, out);
  });
}

/// Assembles into a copy of the scalar or paired pattern.
template <int Dim>
linalg::CsrMatrix assemble_operator(const Mesh<Dim>& m, int ndof, const QuadKernel<Dim>& k, int nq1 = 2) {
  linalg::CsrMatrix A = ndof == 1 ? m.scalar_pattern : m.pair_pattern;
  CHNS_REQUIRE(ndof == 1 || ndof == 2, ContractError, "operators carry one or two dofs per node");
  octree::assemble_matrix_into<Dim>(m.tree, m.table, m.graph, ndof,
                                    [&](const octree::Element<Dim>& e, double* out) {
                                      fem::ElementValues<Dim> ev(nq1);
                                      ev.reinit(e.x0, e.h);
                                      k(e, ev, out);
                                    },
                                    A);
  return A;
}

/// Nodal field obtained by lumped L2 projection of element contributions.
template <int Dim>
Vec lumped_projection(const Mesh<Dim>& m, int ndof, const QuadKernel<Dim>& k) {
  Vec f = assemble_rhs(m, ndof, k);
  for (std::size_t i = 0; i < m.nodes(); ++i)
    for (int c = 0; c < ndof; ++c) f[i * static_cast<std::size_t>(ndof) + static_cast<std::size_t>(c)] /= m.lumped_mass[i];
  return f;
}

/// Quadrature sum over all leaves of g(element, ev, q).
template <int Dim, class F>
double integrate(const Mesh<Dim>& m, F&& g, int nq1 = 2) {
  double s = 0.0;
  fem::ElementValues<Dim> ev(nq1);
  octree::for_each_leaf<Dim>(m.tree, m.table, [&](const octree::Element<Dim>& e) {
    ev.reinit(e.x0, e.h);
    for (int q = 0; q < ev.nq; ++q) s += ev.JxW[q] * g(e, ev, q);
  });
  return s;
}

/// Extracts component c of an interleaved field.
inline Vec component(const Vec& f, int ncomp, int c) {
  Vec out(f.size() / static_cast<std::size_t>(ncomp));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(c)];
  return out;
}

inline void set_component(Vec& f, int ncomp, int c, const Vec& v) {
  for (std::size_t i = 0; i < v.size(); ++i) f[i * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(c)] = v[i];
}

}  // namespace chns::core
