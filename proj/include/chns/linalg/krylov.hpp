#pragma once

#include <cmath>
#include <string>

#include "chns/linalg/csr.hpp"
#include "chns/linalg/precond.hpp"

namespace chns::linalg {

struct SolverConfig {
  double rtol = 1e-10;
  double atol = 1e-14;
  int max_iters = 2000;
  PrecondType precond = PrecondType::Jacobi;
  double omega = 1.0;
  int block_size = 1;
  double newton_rtol = 1e-10;
  double newton_atol = 1e-12;
  int newton_max_iters = 20;

  void validate() const {
    CHNS_REQUIRE(rtol > 0 && atol > 0 && newton_rtol > 0 && newton_atol > 0, ConfigError,
                 "solver tolerances must be positive");
    CHNS_REQUIRE(max_iters > 0 && newton_max_iters > 0, ConfigError, "iteration limits must be positive");
    CHNS_REQUIRE(omega > 0 && omega < 2, ConfigError, "SSOR relaxation must lie in (0, 2)");
  }
};

enum class SolveStatus { Converged, MaxIterations, Breakdown };

struct SolveResult {
  int iterations = 0;
  double residual = 0.0;
  SolveStatus status = SolveStatus::Converged;
  bool converged() const { return status == SolveStatus::Converged; }
};

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "iteration limit reached";
    case SolveStatus::Breakdown: return "breakdown";
  }
  return "";
}

namespace detail {

inline void remove_mean(Vec& v) {
  if (v.empty()) return;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

inline double true_residual(const CsrMatrix& A, const Vec& b, const Vec& x, Vec& r) {
  A.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

}  // namespace detail

/// Preconditioned conjugate gradients. With deflate_constant the right-hand side
/// and the iterates are kept orthogonal to the constant vector.
inline SolveResult cg_solve(const CsrMatrix& A, Vec b, Vec& x, const SolverConfig& cfg,
                            bool deflate_constant = false, const Preconditioner* pre = nullptr) {
  CHNS_REQUIRE(A.nrows == A.ncols && b.size() == A.nrows, ContractError, "cg: dimension mismatch");
  if (x.size() != b.size()) x.assign(b.size(), 0.0);
  std::unique_ptr<Preconditioner> own;
  if (!pre) {
    own = make_preconditioner(A, cfg.precond, cfg.omega, cfg.block_size);
    pre = own.get();
  }
  if (deflate_constant) {
    detail::remove_mean(b);
    detail::remove_mean(x);
  }
  const double target = std::max(cfg.atol, cfg.rtol * norm2(b));
  SolveResult res;
  Vec r, z, p, q;
  res.residual = detail::true_residual(A, b, x, r);
  if (res.residual <= target) return res;
  pre->apply(r, z);
  if (deflate_constant) detail::remove_mean(z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    A.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      res.iterations = it;
      res.status = SolveStatus::Breakdown;
      res.residual = detail::true_residual(A, b, x, r);
      if (res.residual <= target) res.status = SolveStatus::Converged;
      return res;
    }
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    res.iterations = it;
    if (norm2(r) <= target) {
      if (deflate_constant) detail::remove_mean(x);
      res.residual = detail::true_residual(A, b, x, r);
      if (res.residual <= target) return res;
    }
    pre->apply(r, z);
    if (deflate_constant) detail::remove_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  if (deflate_constant) detail::remove_mean(x);
  res.residual = detail::true_residual(A, b, x, r);
  res.status = res.residual <= target ? SolveStatus::Converged : SolveStatus::MaxIterations;
  return res;
}

/// Right-preconditioned BiCGStab; convergence is judged on the true residual.
inline SolveResult bicgstab_solve(const CsrMatrix& A, const Vec& b, Vec& x, const SolverConfig& cfg,
                                  const Preconditioner* pre = nullptr) {
  CHNS_REQUIRE(A.nrows == A.ncols && b.size() == A.nrows, ContractError, "bicgstab: dimension mismatch");
  if (x.size() != b.size()) x.assign(b.size(), 0.0);
  std::unique_ptr<Preconditioner> own;
  if (!pre) {
    own = make_preconditioner(A, cfg.precond, cfg.omega, cfg.block_size);
    pre = own.get();
  }
  const double target = std::max(cfg.atol, cfg.rtol * norm2(b));
  SolveResult res;
  Vec r, rhat, p(b.size(), 0.0), v(b.size(), 0.0), phat, s, shat, t;
  res.residual = detail::true_residual(A, b, x, r);
  if (res.residual <= target) return res;
  int restarts = 0;
  for (;;) {
    rhat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    bool restart = false;
    while (res.iterations < cfg.max_iters) {
      ++res.iterations;
      const double rho_new = dot(rhat, r);
      if (rho_new == 0.0 || !std::isfinite(rho_new)) {
        restart = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      pre->apply(p, phat);
      A.multiply(phat, v);
      const double rv = dot(rhat, v);
      if (rv == 0.0 || !std::isfinite(rv)) {
        restart = true;
        break;
      }
      alpha = rho / rv;
      s = r;
      axpy(-alpha, v, s);
      if (norm2(s) <= target) {
        axpy(alpha, phat, x);
        res.residual = detail::true_residual(A, b, x, r);
        if (res.residual <= target) return res;
        restart = true;
        break;
      }
      pre->apply(s, shat);
      A.multiply(shat, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      axpy(alpha, phat, x);
      axpy(omega, shat, x);
      r = s;
      axpy(-omega, t, r);
      if (norm2(r) <= target) {
        res.residual = detail::true_residual(A, b, x, r);
        if (res.residual <= target) return res;
        restart = true;
        break;
      }
      if (omega == 0.0) {
        restart = true;
        break;
      }
    }
    res.residual = detail::true_residual(A, b, x, r);
    if (res.residual <= target) return res;
    if (!restart || res.iterations >= cfg.max_iters) {
      res.status = SolveStatus::MaxIterations;
      return res;
    }
    if (++restarts > 20) {
      res.status = SolveStatus::Breakdown;
      return res;
    }
  }
}

}  // namespace chns::linalg
