#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <vector>

#include "chns/common/parallel.hpp"
#include "chns/linalg/csr.hpp"
#include "chns/octree/node_table.hpp"

namespace chns::octree {

/// Element corner expressed through non-hanging nodes.
struct CornerRef {
  int n = 0;
  std::array<int, 4> id{};
  std::array<double, 4> w{};
};

/// A leaf as seen by an element kernel.
template <int Dim>
struct Element {
  static constexpr int nc = 1 << Dim;
  std::size_t index = 0;
  Octant<Dim> oct;
  std::array<double, Dim> x0{};
  std::array<double, Dim> h{};
  std::array<CornerRef, nc> ref{};

  /// out[c * ndof + k] = value of component k at corner c.
  void gather(const std::vector<double>& f, int ndof, double* out) const {
    for (int c = 0; c < nc; ++c) {
      const CornerRef& r = ref[static_cast<std::size_t>(c)];
      for (int k = 0; k < ndof; ++k) {
        double v = 0.0;
        for (int m = 0; m < r.n; ++m)
          v += r.w[static_cast<std::size_t>(m)] * f[static_cast<std::size_t>(r.id[static_cast<std::size_t>(m)]) * ndof + k];
        out[c * ndof + k] = v;
      }
    }
  }

  /// Corner values of a single component.
  std::array<double, nc> corner_values(const std::vector<double>& f, int ndof = 1, int comp = 0) const {
    std::array<double, nc> out{};
    for (int c = 0; c < nc; ++c) {
      const CornerRef& r = ref[static_cast<std::size_t>(c)];
      double v = 0.0;
      for (int m = 0; m < r.n; ++m)
        v += r.w[static_cast<std::size_t>(m)] * f[static_cast<std::size_t>(r.id[static_cast<std::size_t>(m)]) * ndof + comp];
      out[static_cast<std::size_t>(c)] = v;
    }
    return out;
  }
};

/// Contiguous leaf ranges, one per worker.
struct PartitionPlan {
  std::vector<std::size_t> bounds{0, 0};
  int count() const { return static_cast<int>(bounds.size()) - 1; }

  static PartitionPlan even(std::size_t nleaves, int parts) {
    parts = std::max(1, std::min<int>(parts, static_cast<int>(std::max<std::size_t>(nleaves, 1))));
    PartitionPlan p;
    p.bounds.resize(static_cast<std::size_t>(parts) + 1);
    for (int i = 0; i <= parts; ++i)
      p.bounds[static_cast<std::size_t>(i)] = nleaves * static_cast<std::size_t>(i) / static_cast<std::size_t>(parts);
    return p;
  }
};

namespace detail {

template <int Dim>
class Traversal {
 public:
  Traversal(const Octree<Dim>& t, const NodeTable<Dim>& nt, std::size_t lo, std::size_t hi,
            const std::function<void(const Element<Dim>&)>& fn)
      : tree_(t), table_(nt), lo_(lo), hi_(hi), fn_(fn) {}

  void run() {
    std::vector<int> all(table_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    std::size_t pos = 0;
    for (const auto& r : tree_.lattice.root_cells()) {
      const std::size_t a = pos;
      while (pos < tree_.leaves.size() && tree_.lattice.is_ancestor_or_self(r, tree_.leaves[pos])) ++pos;
      if (pos <= lo_ || a >= hi_) continue;
      filter(all, r, bucket(0));
      visit(r, a, pos, 0);
    }
  }

 private:
  std::vector<int>& bucket(int depth) {
    if (static_cast<int>(buckets_.size()) <= depth) buckets_.resize(static_cast<std::size_t>(depth) + 1);
    return buckets_[static_cast<std::size_t>(depth)];
  }

  void filter(const std::vector<int>& src, const Octant<Dim>& o, std::vector<int>& dst) const {
    dst.clear();
    for (int id : src)
      if (tree_.lattice.incident(o, table_.coords[static_cast<std::size_t>(id)])) dst.push_back(id);
  }

  void visit(const Octant<Dim>& o, std::size_t a, std::size_t b, int depth) {
    if (b - a == 1 && tree_.leaves[a] == o) {
      leaf(o, a, bucket(depth));
      return;
    }
    CHNS_REQUIRE(b > a && o.level < tree_.lattice.max_depth, InvariantError, "leaves do not tile the domain");
    std::size_t pos = a;
    for (int c = 0; c < (1 << Dim); ++c) {
      const Octant<Dim> ch = tree_.lattice.child(o, c);
      const std::size_t ca = pos;
      while (pos < b && tree_.lattice.is_ancestor_or_self(ch, tree_.leaves[pos])) ++pos;
      if (pos <= lo_ || ca >= hi_) continue;
      // the parent bucket may be reallocated when the next depth is added
      bucket(depth + 1);
      filter(buckets_[static_cast<std::size_t>(depth)], ch, buckets_[static_cast<std::size_t>(depth) + 1]);
      visit(ch, ca, pos, depth + 1);
    }
  }

  void leaf(const Octant<Dim>& o, std::size_t index, const std::vector<int>& ids) {
    const auto& lat = tree_.lattice;
    Element<Dim> e;
    e.index = index;
    e.oct = o;
    e.h = lat.cell_lengths(o.level);
    e.x0 = lat.to_physical(o.anchor);
    for (int c = 0; c < Element<Dim>::nc; ++c) {
      const Point<Dim> p = lat.corner(o, c);
      CornerRef& r = e.ref[static_cast<std::size_t>(c)];
      auto it = std::find_if(ids.begin(), ids.end(),
                             [&](int id) { return table_.coords[static_cast<std::size_t>(id)] == p; });
      if (it != ids.end()) {
        r.n = 1;
        r.id[0] = *it;
        r.w[0] = 1.0;
        continue;
      }
      const HangingNode<Dim>* hn = table_.find_hanging(p);
      CHNS_REQUIRE(hn != nullptr, InvariantError, "element corner is neither a node nor a hanging position");
      r.n = hn->n;
      r.id = hn->owner;
      r.w = hn->weight;
    }
    fn_(e);
  }

  const Octree<Dim>& tree_;
  const NodeTable<Dim>& table_;
  std::size_t lo_, hi_;
  const std::function<void(const Element<Dim>&)>& fn_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace detail

/// Top-down traversal of the leaves with index in [lo, hi), resolving corner
/// nodes by bucketing node ids into child boxes.
template <int Dim>
void for_each_leaf(const Octree<Dim>& tree, const NodeTable<Dim>& table, std::size_t lo, std::size_t hi,
                   const std::function<void(const Element<Dim>&)>& fn) {
  detail::Traversal<Dim>(tree, table, lo, hi, fn).run();
}

template <int Dim>
void for_each_leaf(const Octree<Dim>& tree, const NodeTable<Dim>& table,
                   const std::function<void(const Element<Dim>&)>& fn) {
  for_each_leaf(tree, table, 0, tree.leaves.size(), fn);
}

/// Element vector kernel: writes nc * ndof local contributions (pre-zeroed).
template <int Dim>
using VectorKernel = std::function<void(const Element<Dim>&, double*)>;

/// Element matrix kernel: writes an (nc*ndof)^2 row-major local matrix (pre-zeroed).
template <int Dim>
using MatrixKernel = std::function<void(const Element<Dim>&, double*)>;

template <int Dim>
std::vector<double> assemble_vector(const Octree<Dim>& tree, const NodeTable<Dim>& table, int ndof,
                                    const VectorKernel<Dim>& kernel, const PartitionPlan* plan = nullptr) {
  const PartitionPlan local = PartitionPlan::even(tree.leaves.size(), thread_count());
  const PartitionPlan& pp = plan ? *plan : local;
  const int np = pp.count();
  const std::size_t n = table.size() * static_cast<std::size_t>(ndof);
  std::vector<std::vector<double>> bufs(static_cast<std::size_t>(np));
  parallel_for_partitions(np, [&](int p) {
    auto& out = bufs[static_cast<std::size_t>(p)];
    out.assign(n, 0.0);
    std::vector<double> loc(static_cast<std::size_t>(Element<Dim>::nc * ndof));
    for_each_leaf<Dim>(tree, table, pp.bounds[static_cast<std::size_t>(p)], pp.bounds[static_cast<std::size_t>(p) + 1],
                       [&](const Element<Dim>& e) {
                         std::fill(loc.begin(), loc.end(), 0.0);
                         kernel(e, loc.data());
                         for (int c = 0; c < Element<Dim>::nc; ++c) {
                           const CornerRef& r = e.ref[static_cast<std::size_t>(c)];
                           for (int m = 0; m < r.n; ++m) {
                             const std::size_t g = static_cast<std::size_t>(r.id[static_cast<std::size_t>(m)]) * ndof;
                             const double w = r.w[static_cast<std::size_t>(m)];
                             for (int k = 0; k < ndof; ++k) out[g + static_cast<std::size_t>(k)] += w * loc[static_cast<std::size_t>(c * ndof + k)];
                           }
                         }
                       });
  });
  for (int p = 1; p < np; ++p)
    for (std::size_t i = 0; i < n; ++i) bufs[0][i] += bufs[static_cast<std::size_t>(p)][i];
  return std::move(bufs[0]);
}

/// Gathers `input` onto each element and applies a kernel mapping local values to local contributions.
template <int Dim>
std::vector<double> traverse_assemble_vector(const Octree<Dim>& tree, const NodeTable<Dim>& table, int ndof,
                                             const std::function<void(const Element<Dim>&, const double*, double*)>& kernel,
                                             const std::vector<double>& input) {
  CHNS_REQUIRE(input.size() == table.size() * static_cast<std::size_t>(ndof), ContractError,
               "input length does not match node count times dofs per node");
  CHNS_REQUIRE(Element<Dim>::nc * ndof <= 64, ContractError, "too many dofs per node");
  return assemble_vector<Dim>(tree, table, ndof, [&](const Element<Dim>& e, double* out) {
    std::array<double, 64> in{};
    e.gather(input, ndof, in.data());
    kernel(e, in.data(), out);
  });
}

/// Node adjacency graph induced by the elements, hanging corners folded into owners.
struct NodeGraph {
  std::vector<std::size_t> ptr{0};
  std::vector<int> adj;

  std::size_t position(int i, int j) const {
    auto b = adj.begin() + static_cast<std::ptrdiff_t>(ptr[static_cast<std::size_t>(i)]);
    auto e = adj.begin() + static_cast<std::ptrdiff_t>(ptr[static_cast<std::size_t>(i) + 1]);
    auto it = std::lower_bound(b, e, j);
    CHNS_REQUIRE(it != e && *it == j, InvariantError, "entry outside the assembled sparsity pattern");
    return static_cast<std::size_t>(it - b);
  }
};

template <int Dim>
NodeGraph build_node_graph(const Octree<Dim>& tree, const NodeTable<Dim>& table) {
  std::vector<std::vector<int>> rows(table.size());
  for_each_leaf<Dim>(tree, table, [&](const Element<Dim>& e) {
    std::array<int, 4 * Element<Dim>::nc> ids{};
    int n = 0;
    for (const auto& r : e.ref)
      for (int m = 0; m < r.n; ++m) ids[static_cast<std::size_t>(n++)] = r.id[static_cast<std::size_t>(m)];
    std::sort(ids.begin(), ids.begin() + n);
    n = static_cast<int>(std::unique(ids.begin(), ids.begin() + n) - ids.begin());
    for (int a = 0; a < n; ++a) {
      auto& row = rows[static_cast<std::size_t>(ids[static_cast<std::size_t>(a)])];
      row.insert(row.end(), ids.begin(), ids.begin() + n);
    }
  });
  NodeGraph g;
  g.ptr.assign(table.size() + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.ptr[i + 1] = g.ptr[i] + row.size();
  }
  g.adj.reserve(g.ptr.back());
  for (const auto& row : rows) g.adj.insert(g.adj.end(), row.begin(), row.end());
  return g;
}

/// Empty block matrix with ndof x ndof blocks on the node graph, dofs interleaved per node.
inline linalg::CsrMatrix block_pattern(const NodeGraph& g, int ndof) {
  linalg::CsrMatrix m;
  const std::size_t nn = g.ptr.size() - 1;
  const std::size_t nd = static_cast<std::size_t>(ndof);
  m.nrows = m.ncols = nn * nd;
  m.row_ptr.assign(m.nrows + 1, 0);
  m.col.reserve(g.adj.size() * nd * nd);
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t a = 0; a < nd; ++a) {
      for (std::size_t k = g.ptr[i]; k < g.ptr[i + 1]; ++k)
        for (std::size_t b = 0; b < nd; ++b) m.col.push_back(static_cast<int>(static_cast<std::size_t>(g.adj[k]) * nd + b));
      m.row_ptr[i * nd + a + 1] = m.col.size();
    }
  }
  m.val.assign(m.col.size(), 0.0);
  return m;
}

/// Assembles into a matrix built by block_pattern(g, ndof); element matrices
/// are congruence-transformed through the corner references.
template <int Dim>
void assemble_matrix_into(const Octree<Dim>& tree, const NodeTable<Dim>& table, const NodeGraph& g, int ndof,
                          const MatrixKernel<Dim>& kernel, linalg::CsrMatrix& A, const PartitionPlan* plan = nullptr) {
  const std::size_t nd = static_cast<std::size_t>(ndof);
  CHNS_REQUIRE(A.nrows == table.size() * nd && A.row_ptr.size() == A.nrows + 1, ContractError,
               "matrix does not match the node table");
  const PartitionPlan local = PartitionPlan::even(tree.leaves.size(), thread_count());
  const PartitionPlan& pp = plan ? *plan : local;
  const int np = pp.count();
  constexpr int nc = Element<Dim>::nc;
  const std::size_t ne = static_cast<std::size_t>(nc) * nd;
  std::vector<std::vector<double>> bufs(static_cast<std::size_t>(np));
  parallel_for_partitions(np, [&](int p) {
    auto& vals = bufs[static_cast<std::size_t>(p)];
    vals.assign(A.val.size(), 0.0);
    std::vector<double> E(ne * ne);
    for_each_leaf<Dim>(tree, table, pp.bounds[static_cast<std::size_t>(p)], pp.bounds[static_cast<std::size_t>(p) + 1],
                       [&](const Element<Dim>& e) {
                         std::fill(E.begin(), E.end(), 0.0);
                         kernel(e, E.data());
                         for (int ci = 0; ci < nc; ++ci) {
                           const CornerRef& ri = e.ref[static_cast<std::size_t>(ci)];
                           for (int mi = 0; mi < ri.n; ++mi) {
                             const int gi = ri.id[static_cast<std::size_t>(mi)];
                             const double wi = ri.w[static_cast<std::size_t>(mi)];
                             for (int cj = 0; cj < nc; ++cj) {
                               const CornerRef& rj = e.ref[static_cast<std::size_t>(cj)];
                               for (int mj = 0; mj < rj.n; ++mj) {
                                 const int gj = rj.id[static_cast<std::size_t>(mj)];
                                 const double w = wi * rj.w[static_cast<std::size_t>(mj)];
                                 const std::size_t k = g.position(gi, gj);
                                 for (std::size_t a = 0; a < nd; ++a) {
                                   const std::size_t row = static_cast<std::size_t>(gi) * nd + a;
                                   const std::size_t base = A.row_ptr[row] + k * nd;
                                   const double* Erow = &E[(static_cast<std::size_t>(ci) * nd + a) * ne + static_cast<std::size_t>(cj) * nd];
                                   for (std::size_t b = 0; b < nd; ++b) vals[base + b] += w * Erow[b];
                                 }
                               }
                             }
                           }
                         }
                       });
  });
  std::fill(A.val.begin(), A.val.end(), 0.0);
  for (int p = 0; p < np; ++p)
    for (std::size_t i = 0; i < A.val.size(); ++i) A.val[i] += bufs[static_cast<std::size_t>(p)][i];
}

template <int Dim>
linalg::CsrMatrix traverse_assemble_matrix(const Octree<Dim>& tree, const NodeTable<Dim>& table, int ndof,
                                           const MatrixKernel<Dim>& kernel) {
  const NodeGraph g = build_node_graph(tree, table);
  linalg::CsrMatrix A = block_pattern(g, ndof);
  assemble_matrix_into(tree, table, g, ndof, kernel, A);
  return A;
}

}  // namespace chns::octree
