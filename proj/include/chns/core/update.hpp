#pragma once

#include "chns/core/momentum.hpp"

namespace chns::core {

/// Density-weighted mass system projecting v onto the weakly solenoidal velocity.
template <int Dim>
ComponentSystem assemble_velocity_update(const Mesh<Dim>& m, const MomentumFields<Dim>& f, const Vec& p_kp1) {
  constexpr int nc = 1 << Dim;
  CHNS_REQUIRE(f.v != nullptr, ContractError, "velocity update needs the predicted velocity");
  const double dt = f.dt;
  ComponentSystem sys;
  sys.ncomp = Dim;
  sys.A = assemble_operator<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* E) {
    const auto phi = e.corner_values(*f.phi_tilde);
    for (int q = 0; q < ev.nq; ++q) {
      const double w = ev.JxW[q] * mixture_density(ev.value(q, phi), *f.params);
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) E[a * nc + b] += w * ev.N[q][a] * ev.N[q][b];
    }
  });
  sys.b = assemble_rhs<Dim>(m, Dim, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    const MomentumElement<Dim> me(f, e, ev);
    const auto pn = e.corner_values(p_kp1);
    for (int q = 0; q < ev.nq; ++q) {
      const auto mp = me.eval(q);
      const auto gpn = ev.grad(q, pn);
      for (int a = 0; a < nc; ++a) {
        const double Na = ev.N[q][a];
        for (int i = 0; i < Dim; ++i)
          out[a * Dim + i] += ev.JxW[q] * Na *
                              (mp.rho * mp.v[i] - mp.tau * mp.Rm[i] - 0.5 * dt * (gpn[i] - mp.grad_p[i]));
      }
    }
  });
  return sys;
}

/// Discrete divergence functional: the vector of (N_a, div w) over all nodes.
template <int Dim>
Vec divergence_functional(const Mesh<Dim>& m, const Vec& w) {
  return assemble_rhs<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    std::array<std::array<double, 1 << Dim>, Dim> c{};
    for (int i = 0; i < Dim; ++i) c[i] = e.corner_values(w, Dim, i);
    for (int q = 0; q < ev.nq; ++q) {
      double div = 0.0;
      for (int i = 0; i < Dim; ++i) div += ev.grad(q, c[i])[i];
      for (int a = 0; a < (1 << Dim); ++a) out[a] += ev.JxW[q] * ev.N[q][a] * div;
    }
  });
}

}  // namespace chns::core
