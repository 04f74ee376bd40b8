#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "chns/cases/simulation.hpp"

namespace chns::cases {

enum class Study { Temporal, Spatial };

inline std::string to_string(Study s) { return s == Study::Temporal ? "temporal" : "spatial"; }

inline Study parse_study(const std::string& s) {
  if (s == "temporal") return Study::Temporal;
  if (s == "spatial") return Study::Spatial;
  throw ConfigError("unknown convergence study '" + s + "' (expected temporal or spatial)");
}

/// Least-squares slope of log(y) against log(x) over the first n points (all when n == 0).
/// Points with a non-positive error are skipped.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t n = 0) {
  if (n == 0 || n > x.size()) n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++k;
  }
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = k * sxx - sx * sx;
  return (k * sxy - sx * sy) / den;
}

struct ConvergenceReport {
  Study study = Study::Temporal;
  std::vector<double> resolution;  // dt or h, coarsest first
  std::vector<double> final_time;
  std::vector<MmsErrors> errors;
  std::vector<std::string> failure;  // empty string when the run finished
  double slope_v = 0.0, slope_p = 0.0, slope_phi = 0.0, slope_mu = 0.0;

  bool all_completed() const {
    for (const auto& f : failure)
      if (!f.empty()) return false;
    return true;
  }

  std::vector<double> column(double MmsErrors::* field) const {
    std::vector<double> out;
    for (const auto& e : errors) out.push_back(e.*field);
    return out;
  }
};

struct ConvergenceOptions {
  int temporal_level = 7;
  double spatial_dt = 5e-4;
  long spatial_steps = 200;
  // velocity slope of the temporal study is fitted on this many coarsest points,
  // since the finest dt tapers against the spatial error floor
  std::size_t temporal_velocity_points = 3;
};

/// Runs the manufactured-solution case once per resolution and fits error slopes.
/// Temporal: resolutions are time steps, rounded so that an integer number of steps ends at pi.
/// Spatial: resolutions are cell sizes on the unit square, run for a fixed number of steps.
inline ConvergenceReport run_convergence(Study study, const CaseSpec& base, const std::vector<double>& resolutions,
                                         const SolverSet& solvers, const ConvergenceOptions& copt = {},
                                         const std::function<void(const std::string&)>& log = {}) {
  CHNS_REQUIRE(base.id == CaseId::MMS, ConfigError, "convergence studies need the manufactured-solution case");
  CHNS_REQUIRE(resolutions.size() >= 2, ConfigError, "convergence study needs at least two resolutions");
  ConvergenceReport rep;
  rep.study = study;
  for (double r : resolutions) {
    CHNS_REQUIRE(r > 0.0, ConfigError, "resolutions must be positive");
    CaseSpec s = base;
    long n = 0;
    double dt = 0.0;
    if (study == Study::Temporal) {
      n = std::max(1L, std::lround(std::numbers::pi / r));
      dt = std::numbers::pi / static_cast<double>(n);
      s.levels = {copt.temporal_level, copt.temporal_level, copt.temporal_level};
    } else {
      const int level = static_cast<int>(std::lround(-std::log2(r)));
      CHNS_REQUIRE(std::abs(std::ldexp(1.0, -level) - r) < 1e-12, ConfigError,
                   "spatial resolutions must be powers of two");
      s.levels = {level, level, level};
      n = copt.spatial_steps;
      dt = copt.spatial_dt;
    }
    s.dt = dt;
    s.dt_schedule.clear();
    s.steps = n;
    rep.resolution.push_back(study == Study::Temporal ? dt : r);
    std::string fail;
    MmsErrors err{std::nan(""), std::nan(""), std::nan(""), std::nan("")};
    double tf = 0.0;
    try {
      Simulation sim(s, solvers);
      sim.run(n);
      tf = sim.state().t;
      err = mms_errors(sim.mesh(), sim.state(), tf);
    } catch (const SolverError& e) {
      fail = e.what();
    }
    if (log) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s %.6g: v %.4e p %.4e phi %.4e mu %.4e%s", to_string(study).c_str(),
                    rep.resolution.back(), err.v, err.p, err.phi, err.mu, fail.empty() ? "" : " (failed)");
      log(buf);
    }
    rep.final_time.push_back(tf);
    rep.errors.push_back(err);
    rep.failure.push_back(fail);
  }
  const auto& x = rep.resolution;
  const std::size_t nv = study == Study::Temporal ? copt.temporal_velocity_points : 0;
  rep.slope_v = loglog_slope(x, rep.column(&MmsErrors::v), nv);
  rep.slope_p = loglog_slope(x, rep.column(&MmsErrors::p));
  rep.slope_phi = loglog_slope(x, rep.column(&MmsErrors::phi));
  rep.slope_mu = loglog_slope(x, rep.column(&MmsErrors::mu));
  return rep;
}

}  // namespace chns::cases
