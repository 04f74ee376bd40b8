#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>

#include "chns/cases/case_spec.hpp"
#include "chns/cases/indicator.hpp"
#include "chns/cases/mms.hpp"
#include "chns/core/block_step.hpp"
#include "chns/core/diagnostics.hpp"
#include "chns/octree/transfer.hpp"

namespace chns::cases {

/// Solver settings of the four blocks.
struct SolverSet {
  linalg::SolverConfig momentum, pp, vupdate, ch;

  SolverSet() {
    momentum.precond = linalg::PrecondType::Jacobi;
    pp.precond = linalg::PrecondType::Jacobi;
    vupdate.precond = linalg::PrecondType::Jacobi;
    ch.precond = linalg::PrecondType::ILU0;
    for (auto* c : {&momentum, &pp, &vupdate, &ch}) {
      c->rtol = 1e-10;
      c->atol = 1e-12;
      c->max_iters = 5000;
    }
    ch.newton_rtol = 1e-10;
    ch.newton_atol = 1e-10;
  }
};

/// One row of the time series.
struct StepRecord {
  long step = 0;
  double t = 0.0;
  core::Diagnostics diag;
  double mass_drift = 0.0;
  core::BlockTimings timings;
  std::array<int, 2> newton{};
  double div_predicted = 0.0;
  double div_corrected = 0.0;
  std::size_t band_misses = 0;
  std::size_t leaves = 0;
  std::size_t nodes = 0;
};

/// Builds the initial tree: uniform when all levels agree, otherwise refined toward
/// the interface of the initial phase field and the walls, then balanced.
inline octree::Octree<2> initial_tree(const CaseSpec& s) {
  const auto lat = octree::Lattice<2>::make(std::max(1, s.levels.finest()), s.extent(), s.roots, s.domain_lo);
  if (s.levels.uniform()) return octree::uniform_tree(lat, s.levels.bkg);
  auto pred = [&](const octree::Octant<2>& o) {
    if (o.level < s.levels.bkg) return true;
    if (touches_wall(lat, o) && o.level < s.levels.wall) return true;
    if (o.level >= s.levels.interface) return false;
    const auto x0 = lat.to_physical(o.anchor);
    const auto h = lat.cell_lengths(o.level);
    constexpr int n = 6;
    bool pos = false, neg = false;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double f = initial_phi(s, {x0[0] + h[0] * i / n, x0[1] + h[1] * j / n});
        if (std::abs(f) <= kBandThreshold) return true;
        (f > 0 ? pos : neg) = true;
      }
    return pos && neg;
  };
  return octree::enforce_2to1_balance(octree::construct_tree<2>(lat, pred));
}

/// L2 errors against the manufactured solution at time t.
struct MmsErrors {
  double v = 0.0, p = 0.0, phi = 0.0, mu = 0.0;
};

inline MmsErrors mms_errors(const core::Mesh<2>& m, const core::MixtureState& s, double t) {
  MmsErrors e;
  fem::ElementValues<2> ev(3);
  octree::for_each_leaf<2>(m.tree, m.table, [&](const octree::Element<2>& el) {
    ev.reinit(el.x0, el.h);
    const auto u0 = el.corner_values(s.u_k, 2, 0), u1 = el.corner_values(s.u_k, 2, 1);
    const auto pc = el.corner_values(s.p_k), fc = el.corner_values(s.phi_k), mc = el.corner_values(s.mu_k);
    for (int q = 0; q < ev.nq; ++q) {
      const auto ex = mms_exact(ev.x[q], t);
      const double a = ev.value(q, u0) - ex.v[0], b = ev.value(q, u1) - ex.v[1];
      const double dp = ev.value(q, pc) - ex.p, df = ev.value(q, fc) - ex.phi, dm = ev.value(q, mc) - ex.mu;
      e.v += ev.JxW[q] * (a * a + b * b);
      e.p += ev.JxW[q] * dp * dp;
      e.phi += ev.JxW[q] * df * df;
      e.mu += ev.JxW[q] * dm * dm;
    }
  });
  e.v = std::sqrt(e.v);
  e.p = std::sqrt(e.p);
  e.phi = std::sqrt(e.phi);
  e.mu = std::sqrt(e.mu);
  return e;
}

/// Owns mesh and state of one case and advances them, remeshing when AMR is active.
class Simulation {
 public:
  Simulation(CaseSpec spec, SolverSet solvers) : spec_(std::move(spec)) {
    if (spec_.pe_from_cn) spec_.params.Pe = core::PhysicalParams::peclet_from_cahn(spec_.params.Cn);
    spec_.validate();
    opt_.params = spec_.params;
    opt_.bc = spec_.bc;
    opt_.uhat = spec_.uhat;
    opt_.surface_tension = spec_.forcing_mode;
    opt_.momentum = solvers.momentum;
    opt_.pp = solvers.pp;
    opt_.vupdate = solvers.vupdate;
    opt_.ch = solvers.ch;
    for (const auto* c : {&opt_.momentum, &opt_.pp, &opt_.vupdate, &opt_.ch}) c->validate();
    if (spec_.id == CaseId::MMS) opt_.forcing = mms_forcing_hook(spec_.params);
    mesh_ = core::make_mesh(initial_tree(spec_));
    init_fields();
    if (!spec_.levels.uniform()) {
      // settle the initial mesh on the analytic profile
      for (int pass = 0; pass <= spec_.levels.finest() - spec_.levels.bkg; ++pass) {
        auto flags = interface_refine_indicator(mesh_, state_.phi_k, spec_.levels);
        auto next = octree::refine_and_coarsen(mesh_.tree, flags);
        if (next.leaves == mesh_.tree.leaves) break;
        mesh_ = core::make_mesh(std::move(next));
        init_fields();
      }
    }
    if (spec_.id != CaseId::MMS) {
      state_.mu_k = core::consistent_chemical_potential(mesh_, state_.phi_k, spec_.params);
      state_.p_k = core::static_pressure(mesh_, state_.phi_k, state_.mu_k, opt_);
    }
    core::bootstrap_state(mesh_, state_, spec_.params, false);
    mass0_ = core::diagnostics(mesh_, state_.u_k, state_.phi_k, spec_.params).mass;
  }

  const CaseSpec& spec() const { return spec_; }
  const core::Mesh<2>& mesh() const { return mesh_; }
  const core::MixtureState& state() const { return state_; }
  core::MixtureState& state() { return state_; }
  const core::SchemeOptions<2>& options() const { return opt_; }
  double initial_mass() const { return mass0_; }

  StepRecord record(const core::StepReport* rep = nullptr) const {
    StepRecord r;
    r.step = state_.step;
    r.t = state_.t;
    r.diag = core::diagnostics(mesh_, state_.u_k, state_.phi_k, spec_.params);
    r.mass_drift = r.diag.mass - mass0_;
    if (rep) {
      r.timings = rep->timings;
      r.newton = rep->newton_iterations;
      r.div_predicted = rep->div_predicted[1];
      r.div_corrected = rep->div_corrected[1];
    }
    r.leaves = mesh_.tree.leaves.size();
    r.nodes = mesh_.nodes();
    return r;
  }

  /// Remesh (when due) and one block step.
  StepRecord step() {
    double remesh_s = 0.0;
    std::size_t misses = 0;
    if (!spec_.levels.uniform() && state_.step % spec_.remesh_every == 0) {
      const auto t0 = std::chrono::steady_clock::now();
      remesh();
      misses = band_leaves_below_target(mesh_, state_.phi_k, spec_.levels);
      remesh_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    const double dt = spec_.dt_at(state_.t);
    const auto rep = core::block_step(mesh_, state_, opt_, dt);
    StepRecord r = record(&rep);
    r.timings.remesh = remesh_s;
    r.band_misses = misses;
    return r;
  }

  /// Indicator passes until the mesh stops changing, transferring the state each pass.
  void remesh() {
    for (int pass = 0; pass <= spec_.levels.finest() - spec_.levels.bkg; ++pass) {
      auto flags = interface_refine_indicator(mesh_, state_.phi_k, spec_.levels);
      if (std::all_of(flags.begin(), flags.end(), [](octree::Flag f) { return f == octree::Flag::Keep; })) break;
      auto next = octree::refine_and_coarsen(mesh_.tree, flags);
      if (next.leaves == mesh_.tree.leaves) break;
      core::Mesh<2> nm = core::make_mesh(std::move(next));
      auto move = [&](const core::Vec& f, int nd) {
        return octree::intergrid_transfer(mesh_.tree, mesh_.table, nm.tree, nm.table, f, nd);
      };
      core::MixtureState ns;
      ns.u_k = move(state_.u_k, 2);
      ns.u_km1 = move(state_.u_km1, 2);
      ns.p_k = move(state_.p_k, 1);
      ns.phi_k = move(state_.phi_k, 1);
      ns.mu_k = move(state_.mu_k, 1);
      ns.v_kp1 = ns.u_k;
      ns.p_kp1 = ns.p_k;
      ns.phi_kp1 = ns.phi_k;
      ns.mu_kp1 = ns.mu_k;
      ns.t = state_.t;
      ns.step = state_.step;
      mesh_ = std::move(nm);
      state_ = std::move(ns);
    }
  }

  /// Runs n steps, calling on_step after each; returns the records.
  std::vector<StepRecord> run(long n, const std::function<void(const StepRecord&)>& on_step = {}) {
    std::vector<StepRecord> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
      out.push_back(step());
      if (on_step) on_step(out.back());
    }
    return out;
  }

 private:
  void init_fields() {
    state_.resize(mesh_.nodes(), 2);
    for (std::size_t i = 0; i < mesh_.nodes(); ++i) {
      const auto x = mesh_.position(i);
      if (spec_.id == CaseId::MMS) {
        const auto ex = mms_exact(x, 0.0);
        state_.u_k[2 * i] = ex.v[0];
        state_.u_k[2 * i + 1] = ex.v[1];
        state_.p_k[i] = ex.p;
        state_.phi_k[i] = ex.phi;
        state_.mu_k[i] = ex.mu;
      } else {
        state_.phi_k[i] = initial_phi(spec_, x);
      }
    }
  }

  CaseSpec spec_;
  core::SchemeOptions<2> opt_;
  core::Mesh<2> mesh_;
  core::MixtureState state_;
  double mass0_ = 0.0;
};

}  // namespace chns::cases
