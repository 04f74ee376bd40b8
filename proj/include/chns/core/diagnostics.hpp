#pragma once

#include <cmath>
#include <limits>

#include "chns/core/material.hpp"
#include "chns/core/state.hpp"

namespace chns::core {

struct Diagnostics {
  double energy = 0.0;
  double mass = 0.0;
  double centroid = 0.0;
  double front_top = std::numeric_limits<double>::quiet_NaN();
  double front_bottom = std::numeric_limits<double>::quiet_NaN();
  double overshoot = 0.0;
};

/// Height above the reference plane along -gravity.
template <int Dim>
double height(const std::array<double, Dim>& x, const PhysicalParams& p) {
  double h = 0.0;
  for (int d = 0; d < Dim; ++d) h -= p.gravity[static_cast<std::size_t>(d)] * x[d];
  return h;
}

template <int Dim>
Diagnostics diagnostics(const Mesh<Dim>& m, const Vec& u, const Vec& phi, const PhysicalParams& p) {
  constexpr int nc = 1 << Dim;
  Diagnostics d;
  double ind = 0.0, ind_y = 0.0;
  fem::ElementValues<Dim> ev(3);
  const double cap = 1.0 / (p.Cn * p.We);
  octree::for_each_leaf<Dim>(m.tree, m.table, [&](const octree::Element<Dim>& e) {
    ev.reinit(e.x0, e.h);
    const auto c = e.corner_values(phi);
    std::array<std::array<double, nc>, Dim> uc{};
    for (int i = 0; i < Dim; ++i) uc[i] = e.corner_values(u, Dim, i);
    for (int q = 0; q < ev.nq; ++q) {
      const double f = ev.value(q, c);
      const auto g = ev.grad(q, c);
      const double rho = affine_density(f, p);
      double u2 = 0.0;
      for (int i = 0; i < Dim; ++i) {
        const double ui = ev.value(q, uc[i]);
        u2 += ui * ui;
      }
      const double y = height<Dim>(ev.x[q], p);
      d.energy += ev.JxW[q] * (0.5 * rho * u2 + cap * (free_energy(f) + 0.5 * p.Cn * p.Cn * fem::dot(g, g) + rho * y / p.Fr));
      d.mass += ev.JxW[q] * f;
      const double w = 0.5 * (1.0 - f);
      ind += ev.JxW[q] * w;
      ind_y += ev.JxW[q] * w * ev.x[q][Dim - 1];
    }
    // zero crossings along the element edges
    for (int a = 0; a < nc; ++a)
      for (int j = 0; j < Dim; ++j) {
        if ((a >> j) & 1) continue;
        const int b = a | (1 << j);
        const double fa = c[a], fb = c[b];
        if ((fa < 0.0) == (fb < 0.0) || fa == fb) continue;
        const double s = fa / (fa - fb);
        double y = e.x0[Dim - 1] + (((a >> (Dim - 1)) & 1) ? e.h[Dim - 1] : 0.0);
        if (j == Dim - 1) y += s * e.h[Dim - 1];
        if (std::isnan(d.front_top) || y > d.front_top) d.front_top = y;
        if (std::isnan(d.front_bottom) || y < d.front_bottom) d.front_bottom = y;
      }
  });
  d.centroid = ind > 0.0 ? ind_y / ind : std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  for (double v : phi) mx = std::max(mx, std::abs(v));
  d.overshoot = mx - 1.0;
  return d;
}

}  // namespace chns::core
