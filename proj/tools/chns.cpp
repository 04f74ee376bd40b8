// Command-line driver: runs a configured case, a convergence study, or a dry run.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chns/cases/convergence.hpp"
#include "chns/common/parallel.hpp"
#include "chns/core/vorticity.hpp"
#include "chns/io/config.hpp"
#include "chns/io/timeseries.hpp"
#include "chns/io/vtk.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kIo = 4 };

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw chns::IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void dump_fields(const chns::cases::Simulation& sim, const std::string& path) {
  const auto& st = sim.state();
  const auto vq = chns::core::vorticity_q(sim.mesh(), st.u_k);
  chns::io::VtkFields f;
  f.velocity = &st.u_k;
  f.pressure = &st.p_k;
  f.phi = &st.phi_k;
  f.mu = &st.mu_k;
  if (vq.implemented) {
    f.vorticity = &vq.omega;
    f.Q = &vq.Q;
  }
  chns::io::write_vtk(sim.mesh(), f, path);
}

int run_case(const chns::io::RunConfig& cfg) {
  using namespace chns;
  ensure_dir(cfg.output.dir);
  cases::Simulation sim(cfg.spec, cfg.solvers);
  io::TimeseriesWriter csv((fs::path(cfg.output.dir) / cfg.output.csv).string());
  auto vtk_name = [&](long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fields_%06ld.vtk", step);
    return (fs::path(cfg.output.dir) / buf).string();
  };
  if (cfg.output.vtk_every > 0) dump_fields(sim, vtk_name(0));
  const long n = cfg.spec.step_count();
  std::printf("%s: %zu leaves, %zu nodes, %ld steps\n", cases::to_string(cfg.spec.id).c_str(),
              sim.mesh().tree.leaves.size(), sim.mesh().nodes(), n);
  sim.run(n, [&](const cases::StepRecord& r) {
    csv.write(r);
    if (r.step % cfg.output.log_every == 0 || r.step == n)
      std::printf("step %6ld  t %.6g  E %.10g  dmass %.3e  newton %d/%d  nodes %zu  ch %.2fs vp %.2fs pp %.2fs vu %.2fs\n",
                  r.step, r.t, r.diag.energy, r.mass_drift, r.newton[0], r.newton[1], r.nodes, r.timings.ch,
                  r.timings.vp, r.timings.pp, r.timings.vu);
    if (cfg.output.vtk_every > 0 && r.step % cfg.output.vtk_every == 0) dump_fields(sim, vtk_name(r.step));
    std::fflush(stdout);
  });
  std::printf("wrote %s\n", csv.path().c_str());
  return kOk;
}

int run_study(const chns::io::RunConfig& cfg, const std::string& which) {
  using namespace chns;
  const auto study = cases::parse_study(which);
  ensure_dir(cfg.output.dir);
  cases::ConvergenceOptions opt;
  opt.temporal_level = cfg.spec.levels.finest();
  const std::vector<double> res =
      study == cases::Study::Temporal ? std::vector<double>{0.4, 0.2, 0.1, 0.05} : std::vector<double>{1.0 / 16, 1.0 / 32, 1.0 / 64};
  const auto rep = cases::run_convergence(study, cfg.spec, res, cfg.solvers, opt, [](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
  });
  const std::string path = (fs::path(cfg.output.dir) / ("convergence_" + which + ".csv")).string();
  io::write_convergence_csv(rep, path);
  std::printf("slopes: v %.3f  p %.3f  phi %.3f  mu %.3f\nwrote %s\n", rep.slope_v, rep.slope_p, rep.slope_phi,
              rep.slope_mu, path.c_str());
  if (!rep.all_completed()) {
    for (const auto& f : rep.failure)
      if (!f.empty()) std::fprintf(stderr, "error: %s\n", f.c_str());
    return kSolver;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive quadtree Cahn-Hilliard Navier-Stokes solver"};
  std::string config, case_name, out_dir, study;
  long steps = 0;
  int threads = 0;
  bool dry_run = false;
  app.add_option("--config", config, "run configuration file")->required();
  app.add_option("--case", case_name, "override the case id (MMS, Bubble1, Bubble2, RT2D)");
  app.add_option("--steps", steps, "override the number of time steps")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for assembly (CHNS_THREADS takes precedence)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--dry-run", dry_run, "parse the configuration and build the initial mesh only");
  app.add_option("--convergence", study, "run a manufactured-solution convergence study")
      ->check(CLI::IsMember({"temporal", "spatial"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kConfig;
  }

  try {
    std::optional<chns::cases::CaseId> override_id;
    if (!case_name.empty()) override_id = chns::cases::parse_case_id(case_name);
    auto cfg = chns::io::load_config(config, override_id);
    if (steps > 0) cfg.spec.steps = steps;
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (threads > 0) cfg.output.threads = threads;
    if (cfg.output.threads > 0) chns::set_thread_count(cfg.output.threads);
    cfg.spec.validate();

    if (cfg.spec.interface_resolution() < 1.0)
      std::fprintf(stderr, "warning: Cn/h = %.3g < 1 at the finest level; the interface is under-resolved\n",
                   cfg.spec.interface_resolution());
    if (dry_run) {
      const auto mesh = chns::core::make_mesh(chns::cases::initial_tree(cfg.spec));
      std::printf("case %s: %zu leaves, %zu nodes, %d threads\n", chns::cases::to_string(cfg.spec.id).c_str(),
                  mesh.tree.leaves.size(), mesh.nodes(), chns::thread_count());
      return kOk;
    }
    if (!study.empty()) return run_study(cfg, study);
    return run_case(cfg);
  } catch (const chns::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const chns::SolverError& e) {
    std::cerr << "solver failure in " << e.block() << ": " << e.what() << "\n";
    return kSolver;
  } catch (const chns::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  }
}
