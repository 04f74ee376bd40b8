#pragma once

#include <functional>
#include <vector>

#include "chns/linalg/krylov.hpp"

namespace chns::linalg {

struct NewtonResult {
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // residual norm before each iteration and at exit
  int linear_iterations = 0;
};

/// Newton's method with step halving (up to 4 times) when the residual grows.
/// Linear corrections are solved with BiCGStab.
inline NewtonResult newton_solve(const std::function<Vec(const Vec&)>& residual,
                                 const std::function<CsrMatrix(const Vec&)>& jacobian, Vec& x,
                                 const SolverConfig& cfg) {
  NewtonResult out;
  Vec R = residual(x);
  double rn = norm2(R);
  out.history.push_back(rn);
  const double target = std::max(cfg.newton_atol, cfg.newton_rtol * rn);
  if (rn <= cfg.newton_atol) {
    out.converged = true;
    return out;
  }
  while (out.iterations < cfg.newton_max_iters) {
    ++out.iterations;
    const CsrMatrix J = jacobian(x);
    Vec rhs(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) rhs[i] = -R[i];
    Vec dx(R.size(), 0.0);
    const SolveResult lin = bicgstab_solve(J, rhs, dx, cfg);
    out.linear_iterations += lin.iterations;
    if (!lin.converged() && lin.residual > 1e-2 * norm2(rhs)) break;
    double lambda = 1.0;
    Vec trial(x.size());
    Vec Rt;
    double tn = 0.0;
    for (int h = 0; h <= 4; ++h) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + lambda * dx[i];
      Rt = residual(trial);
      tn = norm2(Rt);
      if (tn < rn) break;
      lambda *= 0.5;
    }
    x.swap(trial);
    R.swap(Rt);
    rn = tn;
    out.history.push_back(rn);
    if (rn <= target) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace chns::linalg
