#pragma once

#include <array>

#include "chns/fem/shape.hpp"

namespace chns::fem {

/// Shape values, physical gradients, points and JxW of one box element.
template <int Dim>
struct ElementValues {
  static constexpr int nc = 1 << Dim;
  static constexpr int max_q = Dim == 2 ? 9 : 27;
  using Corner = std::array<double, nc>;
  using Vector = std::array<double, Dim>;

  const ShapeTable<Dim>* table = nullptr;
  ElementGeometry<Dim> geo;
  int nq = 0;
  std::array<Corner, max_q> N{};
  std::array<std::array<Vector, nc>, max_q> dN{};
  std::array<Vector, max_q> x{};
  std::array<double, max_q> JxW{};

  explicit ElementValues(int nq1 = 2) : table(&default_table<Dim>(nq1)) {}

  void reinit(const Vector& x0, const Vector& h) {
    geo = element_geometry<Dim>(h);
    nq = static_cast<int>(table->size());
    for (int q = 0; q < nq; ++q) {
      const auto& tq = table->points[static_cast<std::size_t>(q)];
      JxW[q] = table->weights[static_cast<std::size_t>(q)] * geo.jacobian_det;
      N[q] = table->values[static_cast<std::size_t>(q)];
      for (int a = 0; a < nc; ++a)
        for (int j = 0; j < Dim; ++j)
          dN[q][a][j] = table->gradients[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] *
                        geo.inv_jacobian[j];
      for (int j = 0; j < Dim; ++j) x[q][j] = x0[j] + 0.5 * h[j] * (tq[j] + 1.0);
    }
  }

  double value(int q, const Corner& c) const {
    double v = 0.0;
    for (int a = 0; a < nc; ++a) v += N[q][a] * c[a];
    return v;
  }

  Vector grad(int q, const Corner& c) const {
    Vector g{};
    for (int a = 0; a < nc; ++a)
      for (int j = 0; j < Dim; ++j) g[j] += dN[q][a][j] * c[a];
    return g;
  }
};

template <std::size_t D>
double dot(const std::array<double, D>& a, const std::array<double, D>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < D; ++j) s += a[j] * b[j];
  return s;
}

}  // namespace chns::fem
