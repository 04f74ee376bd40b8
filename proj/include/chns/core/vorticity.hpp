#pragma once

#include "chns/core/mesh.hpp"

namespace chns::core {

struct VorticityQ {
  bool implemented = false;
  Vec omega;
  Vec Q;
};

/// Vorticity and Q-criterion from lumped projections of the element velocity gradients. 2D only.
template <int Dim>
VorticityQ vorticity_q(const Mesh<Dim>& m, const Vec& u) {
  VorticityQ out;
  if constexpr (Dim != 2) {
    return out;
  } else {
    const Vec G = lumped_projection<2>(m, 4, [&](const octree::Element<2>& e, const fem::ElementValues<2>& ev, double* o) {
      const auto c0 = e.corner_values(u, 2, 0);
      const auto c1 = e.corner_values(u, 2, 1);
      for (int q = 0; q < ev.nq; ++q) {
        const auto g0 = ev.grad(q, c0);
        const auto g1 = ev.grad(q, c1);
        for (int a = 0; a < 4; ++a) {
          const double w = ev.JxW[q] * ev.N[q][a];
          o[4 * a + 0] += w * g0[0];
          o[4 * a + 1] += w * g0[1];
          o[4 * a + 2] += w * g1[0];
          o[4 * a + 3] += w * g1[1];
        }
      }
    });
    out.implemented = true;
    out.omega.resize(m.nodes());
    out.Q.resize(m.nodes());
    for (std::size_t i = 0; i < m.nodes(); ++i) {
      const double ux = G[4 * i], uy = G[4 * i + 1], vx = G[4 * i + 2], vy = G[4 * i + 3];
      out.omega[i] = vx - uy;
      const double w = 0.5 * (vx - uy);
      const double s12 = 0.5 * (uy + vx);
      const double rot = 2.0 * w * w;
      const double strain = ux * ux + vy * vy + 2.0 * s12 * s12;
      out.Q[i] = 0.5 * (rot - strain);
    }
    return out;
  }
}

}  // namespace chns::core
