#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "chns/cases/convergence.hpp"

namespace chns::io {

inline constexpr const char* kTimeseriesHeader =
    "time,TotalEnergy,TotalPhiMinusInit,Centroid,FrontTop,FrontBottom,CH_s,VP_s,PP_s,VU_s,Remesh_s";

/// 17 significant digits, enough to read back the same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string timeseries_row(const cases::StepRecord& r) {
  const double cols[] = {r.t, r.diag.energy, r.mass_drift, r.diag.centroid, r.diag.front_top, r.diag.front_bottom,
                         r.timings.ch, r.timings.vp, r.timings.pp, r.timings.vu, r.timings.remesh};
  std::string line;
  for (std::size_t i = 0; i < std::size(cols); ++i) {
    if (i) line += ',';
    line += format_double(cols[i]);
  }
  return line;
}

/// Per-step CSV sink, flushed after every row.
class TimeseriesWriter {
 public:
  explicit TimeseriesWriter(std::string path) : path_(std::move(path)) {
    f_ = std::fopen(path_.c_str(), "w");
    if (!f_) throw IoError("cannot open '" + path_ + "' for writing");
    put(kTimeseriesHeader);
  }
  TimeseriesWriter(const TimeseriesWriter&) = delete;
  TimeseriesWriter& operator=(const TimeseriesWriter&) = delete;
  ~TimeseriesWriter() {
    if (f_) std::fclose(f_);
  }

  void write(const cases::StepRecord& r) { put(timeseries_row(r)); }

  const std::string& path() const { return path_; }

 private:
  void put(const std::string& line) {
    if (std::fputs(line.c_str(), f_) < 0 || std::fputc('\n', f_) == EOF || std::fflush(f_) != 0)
      throw IoError("write failed on '" + path_ + "'");
  }

  std::string path_;
  std::FILE* f_ = nullptr;
};

/// Writes a finished convergence study: one row per resolution plus the fitted slopes.
inline void write_convergence_csv(const cases::ConvergenceReport& rep, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::string out = std::string(rep.study == cases::Study::Temporal ? "dt" : "h") + ",t_final,err_v,err_p,err_phi,err_mu,status\n";
  for (std::size_t i = 0; i < rep.resolution.size(); ++i) {
    const auto& e = rep.errors[i];
    out += format_double(rep.resolution[i]) + "," + format_double(rep.final_time[i]) + "," + format_double(e.v) + "," +
           format_double(e.p) + "," + format_double(e.phi) + "," + format_double(e.mu) + "," +
           (rep.failure[i].empty() ? "ok" : "failed") + "\n";
  }
  out += "slope,," + format_double(rep.slope_v) + "," + format_double(rep.slope_p) + "," + format_double(rep.slope_phi) +
         "," + format_double(rep.slope_mu) + ",\n";
  const bool ok = std::fputs(out.c_str(), f) >= 0;
  if (std::fclose(f) != 0 || !ok) throw IoError("write failed on '" + path + "'");
}

}  // namespace chns::io
