#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "chns/common/errors.hpp"

namespace chns::fem {

/// Multilinear shape values on [-1,1]^Dim; corner a has bit j set on the upper side of axis j.
template <int Dim>
std::array<double, (1 << Dim)> shape_values(const std::array<double, Dim>& xi) {
  std::array<double, (1 << Dim)> N{};
  for (int a = 0; a < (1 << Dim); ++a) {
    double v = 1.0;
    for (int j = 0; j < Dim; ++j) v *= 0.5 * (1.0 + ((a >> j) & 1 ? xi[j] : -xi[j]));
    N[static_cast<std::size_t>(a)] = v;
  }
  return N;
}

/// Reference gradients dN_a/dxi_j.
template <int Dim>
std::array<std::array<double, Dim>, (1 << Dim)> shape_gradients(const std::array<double, Dim>& xi) {
  std::array<std::array<double, Dim>, (1 << Dim)> G{};
  for (int a = 0; a < (1 << Dim); ++a) {
    for (int j = 0; j < Dim; ++j) {
      double v = 1.0;
      for (int k = 0; k < Dim; ++k) {
        const double s = (a >> k) & 1 ? 1.0 : -1.0;
        v *= k == j ? 0.5 * s : 0.5 * (1.0 + s * xi[k]);
      }
      G[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] = v;
    }
  }
  return G;
}

/// Gauss-Legendre points and weights on [-1,1].
inline void gauss_legendre(int nq, std::vector<double>& x, std::vector<double>& w) {
  if (nq == 2) {
    const double p = 1.0 / std::sqrt(3.0);
    x = {-p, p};
    w = {1.0, 1.0};
  } else if (nq == 3) {
    const double p = std::sqrt(0.6);
    x = {-p, 0.0, p};
    w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  } else {
    throw ContractError("unsupported number of Gauss points per axis: " + std::to_string(nq));
  }
}

/// Tensor-product quadrature with shape values and reference gradients at each point.
template <int Dim>
struct ShapeTable {
  static constexpr int nc = 1 << Dim;
  int nq1 = 2;
  std::vector<std::array<double, Dim>> points;
  std::vector<double> weights;
  std::vector<std::array<double, nc>> values;
  std::vector<std::array<std::array<double, Dim>, nc>> gradients;

  std::size_t size() const { return points.size(); }
};

template <int Dim>
ShapeTable<Dim> shape_table(int order = 1, int nq = 2) {
  CHNS_REQUIRE(order == 1, ContractError, "only linear elements are supported");
  std::vector<double> x, w;
  gauss_legendre(nq, x, w);
  ShapeTable<Dim> t;
  t.nq1 = nq;
  int total = 1;
  for (int d = 0; d < Dim; ++d) total *= nq;
  for (int q = 0; q < total; ++q) {
    std::array<double, Dim> xi{};
    double wt = 1.0;
    int rem = q;
    for (int d = 0; d < Dim; ++d) {
      xi[d] = x[static_cast<std::size_t>(rem % nq)];
      wt *= w[static_cast<std::size_t>(rem % nq)];
      rem /= nq;
    }
    t.points.push_back(xi);
    t.weights.push_back(wt);
    t.values.push_back(shape_values<Dim>(xi));
    t.gradients.push_back(shape_gradients<Dim>(xi));
  }
  return t;
}

/// Cached table for the default rule.
template <int Dim>
const ShapeTable<Dim>& default_table(int nq = 2) {
  static const ShapeTable<Dim> t2 = shape_table<Dim>(1, 2);
  static const ShapeTable<Dim> t3 = shape_table<Dim>(1, 3);
  return nq == 3 ? t3 : t2;
}

/// Geometry of an axis-aligned box element with the affine map xi = 2 (x - xc) / h.
template <int Dim>
struct ElementGeometry {
  std::array<double, Dim> h{};
  double jacobian_det = 0.0;
  std::array<double, Dim> inv_jacobian{};
  std::array<double, Dim> G{};
  double GG = 0.0;  // G_ij G_ij
};

template <int Dim>
ElementGeometry<Dim> element_geometry(const std::array<double, Dim>& h) {
  ElementGeometry<Dim> g;
  g.h = h;
  g.jacobian_det = 1.0;
  for (int j = 0; j < Dim; ++j) {
    CHNS_REQUIRE(h[j] > 0.0, ContractError, "element length must be positive");
    g.jacobian_det *= 0.5 * h[j];
    g.inv_jacobian[j] = 2.0 / h[j];
    g.G[j] = g.inv_jacobian[j] * g.inv_jacobian[j];
    g.GG += g.G[j] * g.G[j];
  }
  return g;
}

/// Diagonal of the element metric tensor.
template <int Dim>
std::array<double, Dim> element_metric(const std::array<double, Dim>& h) {
  return element_geometry<Dim>(h).G;
}

/// Weights of the 2^K corners of a parent edge (K=1) or face (K=2) at a
/// position given in half-parent units per axis (0, 1 or 2).
template <int K>
std::array<double, (1 << K)> hanging_face_weights(const std::array<double, K>& pos) {
  std::array<double, K> xi{};
  for (int j = 0; j < K; ++j) {
    const double p = pos[j];
    CHNS_REQUIRE(p == 0.0 || p == 1.0 || p == 2.0, ContractError,
                 "hanging position is not on the parent half lattice (multi-level hanging)");
    xi[j] = p - 1.0;
  }
  return shape_values<K>(xi);
}

}  // namespace chns::fem
