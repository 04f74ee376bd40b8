#pragma once

#include <array>

#include "chns/core/material.hpp"
#include "chns/core/state.hpp"
#include "chns/linalg/newton.hpp"

namespace chns::core {

/// Known data of one Cahn-Hilliard solve. Unknowns are interleaved (phi, mu) per node.
template <int Dim>
struct ChInputs {
  const Vec* phi_k = nullptr;
  const Vec* mu_k = nullptr;
  const Vec* u_adv = nullptr;  // time-averaged advecting velocity, Dim components
  double dt = 0.0;
  double t_half = 0.0;
  const PhysicalParams* params = nullptr;
  const Forcing<Dim>* forcing = nullptr;
};

inline Vec interleave(const Vec& a, const Vec& b) {
  Vec x(2 * a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    x[2 * i] = a[i];
    x[2 * i + 1] = b[i];
  }
  return x;
}

template <int Dim>
Vec ch_residual(const Mesh<Dim>& m, const ChInputs<Dim>& in, const Vec& x) {
  CHNS_REQUIRE(x.size() == 2 * m.nodes(), ContractError, "CH unknown vector has the wrong length");
  constexpr int nc = 1 << Dim;
  const PhysicalParams& p = *in.params;
  const double kdiff = p.mobility / (p.Pe * p.Cn);
  const double cn2 = p.Cn * p.Cn;
  const bool forced = in.forcing && *in.forcing;
  return assemble_rhs<Dim>(m, 2, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    const auto pn = e.corner_values(x, 2, 0);
    const auto mn = e.corner_values(x, 2, 1);
    const auto po = e.corner_values(*in.phi_k);
    const auto mo = e.corner_values(*in.mu_k);
    std::array<std::array<double, nc>, Dim> uc{};
    for (int i = 0; i < Dim; ++i) uc[i] = e.corner_values(*in.u_adv, Dim, i);
    std::array<double, nc> pt{}, mt{};
    for (int a = 0; a < nc; ++a) {
      pt[a] = 0.5 * (pn[a] + po[a]);
      mt[a] = 0.5 * (mn[a] + mo[a]);
    }
    for (int q = 0; q < ev.nq; ++q) {
      const double w = ev.JxW[q];
      const double dphi = (ev.value(q, pn) - ev.value(q, po)) / in.dt;
      const double phit = ev.value(q, pt);
      const double mut = ev.value(q, mt);
      const auto gphi = ev.grad(q, pt);
      const auto gmu = ev.grad(q, mt);
      std::array<double, Dim> u{};
      for (int i = 0; i < Dim; ++i) u[i] = ev.value(q, uc[i]);
      double fphi = 0.0, fmu = 0.0;
      if (forced) {
        std::array<double, Dim> fm{};
        in.forcing->eval(ev.x[q], in.t_half, fm, fphi, fmu);
      }
      const double psi1 = free_energy_prime(phit);
      for (int a = 0; a < nc; ++a) {
        const double N = ev.N[q][a];
        const auto& dN = ev.dN[q][a];
        out[2 * a] += w * (N * (dphi - fphi) - fem::dot(dN, u) * phit + kdiff * fem::dot(dN, gmu));
        out[2 * a + 1] += w * (N * (-mut + psi1 - fmu) + cn2 * fem::dot(dN, gphi));
      }
    }
  });
}

template <int Dim>
linalg::CsrMatrix ch_jacobian(const Mesh<Dim>& m, const ChInputs<Dim>& in, const Vec& x) {
  constexpr int nc = 1 << Dim;
  constexpr int ne = 2 * nc;
  const PhysicalParams& p = *in.params;
  const double kdiff = p.mobility / (p.Pe * p.Cn);
  const double cn2 = p.Cn * p.Cn;
  return assemble_operator<Dim>(m, 2, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* E) {
    const auto pn = e.corner_values(x, 2, 0);
    const auto po = e.corner_values(*in.phi_k);
    std::array<std::array<double, nc>, Dim> uc{};
    for (int i = 0; i < Dim; ++i) uc[i] = e.corner_values(*in.u_adv, Dim, i);
    for (int q = 0; q < ev.nq; ++q) {
      const double w = ev.JxW[q];
      const double phit = 0.5 * (ev.value(q, pn) + ev.value(q, po));
      const double psi2 = free_energy_second(phit);
      std::array<double, Dim> u{};
      for (int i = 0; i < Dim; ++i) u[i] = ev.value(q, uc[i]);
      for (int a = 0; a < nc; ++a) {
        const double Na = ev.N[q][a];
        const auto& dNa = ev.dN[q][a];
        const double adv = fem::dot(dNa, u);
        for (int b = 0; b < nc; ++b) {
          const double Nb = ev.N[q][b];
          const double NN = Na * Nb;
          const double KK = fem::dot(dNa, ev.dN[q][b]);
          E[(2 * a) * ne + 2 * b] += w * (NN / in.dt - 0.5 * adv * Nb);
          E[(2 * a) * ne + 2 * b + 1] += w * 0.5 * kdiff * KK;
          E[(2 * a + 1) * ne + 2 * b] += w * 0.5 * (psi2 * NN + cn2 * KK);
          E[(2 * a + 1) * ne + 2 * b + 1] += w * (-0.5 * NN);
        }
      }
    }
  });
}

/// Newton solve of the CH block; phi and mu hold the initial guess on entry.
template <int Dim>
linalg::NewtonResult solve_ch(const Mesh<Dim>& m, const ChInputs<Dim>& in, Vec& phi, Vec& mu,
                              linalg::SolverConfig cfg) {
  cfg.block_size = 2;
  Vec x = interleave(phi, mu);
  auto res = linalg::newton_solve([&](const Vec& y) { return ch_residual<Dim>(m, in, y); },
                                  [&](const Vec& y) { return ch_jacobian<Dim>(m, in, y); }, x, cfg);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = x[2 * i];
    mu[i] = x[2 * i + 1];
  }
  return res;
}

}  // namespace chns::core

namespace chns::core {

/// Chemical potential consistent with phi: consistent-mass projection of psi'(phi) - Cn^2 lap(phi).
template <int Dim>
Vec consistent_chemical_potential(const Mesh<Dim>& m, const Vec& phi, const PhysicalParams& p,
                                  const linalg::SolverConfig& cfg = {}) {
  constexpr int nc = 1 << Dim;
  const double cn2 = p.Cn * p.Cn;
  auto M = assemble_operator<Dim>(m, 1, [&](const octree::Element<Dim>&, const fem::ElementValues<Dim>& ev, double* E) {
    for (int q = 0; q < ev.nq; ++q)
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) E[a * nc + b] += ev.JxW[q] * ev.N[q][a] * ev.N[q][b];
  });
  Vec b = assemble_rhs<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    const auto c = e.corner_values(phi);
    for (int q = 0; q < ev.nq; ++q) {
      const double psi1 = free_energy_prime(ev.value(q, c));
      const auto g = ev.grad(q, c);
      for (int a = 0; a < nc; ++a) out[a] += ev.JxW[q] * (ev.N[q][a] * psi1 + cn2 * fem::dot(ev.dN[q][a], g));
    }
  });
  Vec mu(phi.size(), 0.0);
  const auto r = linalg::cg_solve(M, b, mu, cfg);
  if (!r.converged()) throw SolverError("initial chemical potential", "mass solve did not converge");
  return mu;
}

}  // namespace chns::core
