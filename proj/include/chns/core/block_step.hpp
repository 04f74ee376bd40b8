#pragma once

#include <array>
#include <chrono>

#include "chns/core/ch_block.hpp"
#include "chns/core/momentum.hpp"
#include "chns/core/pressure.hpp"
#include "chns/core/update.hpp"

namespace chns::core {

/// What happened inside one accepted step.
struct StepReport {
  BlockTimings timings;
  std::array<int, 2> newton_iterations{};
  std::array<double, 2> div_predicted{};  // ||(q, div v)|| per pass
  std::array<double, 2> div_corrected{};  // ||(q, div u)|| per pass
  int linear_iterations = 0;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto t = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t - t0_).count();
    t0_ = t;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

/// Sets the k-1 velocity and a consistent mu for a freshly initialized state.
template <int Dim>
void bootstrap_state(const Mesh<Dim>& m, MixtureState& s, const PhysicalParams& p, bool recompute_mu = true) {
  CHNS_REQUIRE(s.consistent(m.nodes(), Dim), ContractError, "state does not match the mesh");
  s.u_km1 = s.u_k;
  if (recompute_mu) s.mu_k = consistent_chemical_potential(m, s.phi_k, p);
  s.phi_kp1 = s.phi_k;
  s.mu_kp1 = s.mu_k;
  s.p_kp1 = s.p_k;
  s.v_kp1 = s.u_k;
}

/// One time step: two passes of CH -> velocity prediction -> pressure Poisson ->
/// velocity update, the second pass advecting phi with the averaged velocity.
template <int Dim>
StepReport block_step(const Mesh<Dim>& m, MixtureState& s, const SchemeOptions<Dim>& opt, double dt) {
  CHNS_REQUIRE(dt > 0.0, ContractError, "time step must be positive");
  CHNS_REQUIRE(s.consistent(m.nodes(), Dim), ContractError, "state does not match the mesh");
  opt.bc.validate();
  StepReport rep;
  detail::Stopwatch sw;
  if (s.step == 0) s.u_km1 = s.u_k;
  const double t_half = s.t + 0.5 * dt;
  const Vec u_hat = extrapolate_uhat(s.u_k, s.u_km1, opt.uhat);
  Vec phi = s.phi_k, mu = s.mu_k, v = s.u_k, p = s.p_k, u = s.u_k;
  rep.timings.update += sw.lap();

  for (int pass = 0; pass < 2; ++pass) {
    const Vec u_adv = pass == 0 ? s.u_k : average(s.u_k, u);
    ChInputs<Dim> ci{&s.phi_k, &s.mu_k, &u_adv, dt, t_half, &opt.params, &opt.forcing};
    const auto nr = solve_ch(m, ci, phi, mu, opt.ch);
    rep.newton_iterations[static_cast<std::size_t>(pass)] = nr.iterations;
    rep.linear_iterations += nr.linear_iterations;
    if (!nr.converged)
      throw SolverError("CH", "Newton did not converge in " + std::to_string(nr.iterations) + " iterations (residual " +
                                  std::to_string(nr.history.back()) + ")");
    rep.timings.ch += sw.lap();

    const Vec phit = average(s.phi_k, phi);
    const Vec mut = average(s.mu_k, mu);
    Vec gphi;
    if (opt.surface_tension == SurfaceTension::DivPhiPhi) gphi = project_gradient(m, phit);
    const Vec guk = project_velocity_gradient(m, s.u_k);
    Vec gv;
    MomentumFields<Dim> f;
    f.grad_uk_rec = &guk;
    f.phi_tilde = &phit;
    f.mu_tilde = &mut;
    f.u_k = &s.u_k;
    f.u_hat = &u_hat;
    f.p_k = &s.p_k;
    f.grad_phi = gphi.empty() ? nullptr : &gphi;
    f.dt = dt;
    f.t_half = t_half;
    f.params = &opt.params;
    f.surface_tension = opt.surface_tension;
    f.forcing = &opt.forcing;
    rep.timings.update += sw.lap();

    const auto vp = assemble_velocity_prediction(m, f);
    rep.linear_iterations += solve_components(m, vp, opt.bc, opt.momentum, false, v, "velocity prediction").iterations;
    rep.timings.vp += sw.lap();

    f.v = &v;
    gv = project_velocity_gradient(m, v);
    f.grad_v_rec = &gv;
    const auto [Ap, bp] = assemble_pressure_poisson(m, f);
    rep.linear_iterations += solve_pressure(m, Ap, bp, opt.pp, p).iterations;
    rep.timings.pp += sw.lap();

    const auto vu = assemble_velocity_update(m, f, p);
    rep.linear_iterations += solve_components(m, vu, opt.bc, opt.vupdate, true, u, "velocity update").iterations;
    rep.timings.vu += sw.lap();

    rep.div_predicted[static_cast<std::size_t>(pass)] = linalg::norm2(divergence_functional(m, v));
    rep.div_corrected[static_cast<std::size_t>(pass)] = linalg::norm2(divergence_functional(m, u));
    rep.timings.update += sw.lap();
  }

  s.u_km1 = std::move(s.u_k);
  s.u_k = std::move(u);
  s.v_kp1 = std::move(v);
  s.p_kp1 = p;
  s.p_k = std::move(p);
  s.phi_kp1 = phi;
  s.phi_k = std::move(phi);
  s.mu_kp1 = mu;
  s.mu_k = std::move(mu);
  s.t += dt;
  ++s.step;
  rep.timings.update += sw.lap();
  return rep;
}

}  // namespace chns::core
