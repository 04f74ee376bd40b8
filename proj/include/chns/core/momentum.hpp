#pragma once

#include <string>

#include "chns/core/vms.hpp"
#include "chns/linalg/dirichlet.hpp"
#include "chns/linalg/krylov.hpp"

namespace chns::core {

/// Scalar operator shared by all components and an interleaved right-hand side.
struct ComponentSystem {
  linalg::CsrMatrix A;
  Vec b;
  int ncomp = 1;
};

/// Linear system of the predicted velocity. The operator does not couple the
/// components, so a single scalar matrix serves all of them.
template <int Dim>
ComponentSystem assemble_velocity_prediction(const Mesh<Dim>& m, const MomentumFields<Dim>& f) {
  constexpr int nc = 1 << Dim;
  const PhysicalParams& prm = *f.params;
  const double dt = f.dt;
  ComponentSystem sys;
  sys.ncomp = Dim;
  sys.A = assemble_operator<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* E) {
    const MomentumElement<Dim> me(f, e, ev);
    for (int q = 0; q < ev.nq; ++q) {
      const auto mp = me.eval(q);
      const double w = ev.JxW[q];
      for (int a = 0; a < nc; ++a) {
        const double Na = ev.N[q][a];
        const auto& dNa = ev.dN[q][a];
        const double bNa = fem::dot(mp.beta, dNa);
        for (int b = 0; b < nc; ++b) {
          const double Nb = ev.N[q][b];
          const auto& dNb = ev.dN[q][b];
          E[a * nc + b] += w * (mp.rho * Na * Nb / dt + 0.5 * Na * mp.rho * fem::dot(mp.beta, dNb) +
                                0.5 / prm.Re * mp.eta * fem::dot(dNa, dNb) + 0.5 * bNa * mp.tau * mp.L(Nb, dNb, prm, dt));
        }
      }
    }
  });
  sys.b = assemble_rhs<Dim>(m, Dim, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    const MomentumElement<Dim> me(f, e, ev);
    for (int q = 0; q < ev.nq; ++q) {
      const auto mp = me.eval(q);
      const double w = ev.JxW[q];
      for (int a = 0; a < nc; ++a) {
        const double Na = ev.N[q][a];
        const auto& dNa = ev.dN[q][a];
        const double bNa = fem::dot(mp.beta, dNa);
        const double dNgphi = fem::dot(dNa, mp.grad_phi);
        for (int i = 0; i < Dim; ++i) {
          double r = Na * mp.rho * mp.u_k[i] / dt - 0.5 * Na * mp.rho * fem::dot(mp.beta, mp.grad_uk[i]) -
                     0.5 / prm.Re * mp.eta * fem::dot(dNa, mp.grad_uk[i]) - 0.5 * bNa * mp.tau * mp.K[i] -
                     Na * mp.grad_p[i] + Na * mp.rho * prm.gravity[static_cast<std::size_t>(i)] / prm.Fr + Na * mp.f[i];
          if (f.surface_tension == SurfaceTension::DivPhiPhi)
            r += prm.Cn / prm.We * dNgphi * mp.grad_phi[i];
          else if (f.surface_tension == SurfaceTension::PhiGradMu)
            r -= Na * mp.st[i];
          out[a * Dim + i] += w * r;
        }
      }
    }
  });
  return sys;
}

/// Solves each component with its own Dirichlet rows. x holds the initial guess.
template <int Dim>
linalg::SolveResult solve_components(const Mesh<Dim>& m, const ComponentSystem& sys, const BoundarySpec<Dim>& bc,
                                     const linalg::SolverConfig& cfg, bool symmetric, Vec& x,
                                     const std::string& block) {
  linalg::SolveResult worst;
  for (int i = 0; i < sys.ncomp; ++i) {
    linalg::CsrMatrix A = sys.A;
    Vec b = component(sys.b, sys.ncomp, i);
    Vec xi = component(x, sys.ncomp, i);
    const auto fixed = velocity_constraints(m, bc, i);
    Vec zero(b.size(), 0.0);
    linalg::apply_dirichlet(A, b, fixed, zero);
    for (std::size_t n = 0; n < xi.size(); ++n)
      if (fixed[n]) xi[n] = 0.0;
    const auto r = symmetric ? linalg::cg_solve(A, b, xi, cfg) : linalg::bicgstab_solve(A, b, xi, cfg);
    if (!r.converged())
      throw SolverError(block, "component " + std::to_string(i) + " did not converge (" + linalg::to_string(r.status) +
                                   ", residual " + std::to_string(r.residual) + ")");
    worst.iterations = std::max(worst.iterations, r.iterations);
    worst.residual = std::max(worst.residual, r.residual);
    set_component(x, sys.ncomp, i, xi);
  }
  return worst;
}

}  // namespace chns::core
