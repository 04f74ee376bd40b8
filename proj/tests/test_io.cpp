#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chns/io/config.hpp"
#include "chns/io/timeseries.hpp"
#include "chns/io/vtk.hpp"

using namespace chns;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(case {
  id = Bubble1
}
solver_momentum {
}
solver_pp {
  rtol = 1e-8
}
solver_vupdate {
}
solver_ch {
}
output {
}
)";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "chns_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    io::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalFileTakesCaseDefaults) {
  const auto cfg = io::parse_config(kMinimal);
  EXPECT_EQ(cfg.spec.id, cases::CaseId::Bubble1);
  EXPECT_EQ(cfg.spec.params.We, 10.0);
  EXPECT_EQ(cfg.spec.bubble_center, (std::array<double, 2>{1.0, 1.0}));
  EXPECT_EQ(cfg.solvers.pp.rtol, 1e-8);
  EXPECT_EQ(cfg.solvers.momentum.rtol, cases::SolverSet{}.momentum.rtol);
  EXPECT_EQ(cfg.output.dir, "out");
  EXPECT_EQ(cfg.output.csv, "timeseries.csv");
}

TEST(Config, CaseOverrideAndKeys) {
  std::string text = kMinimal;
  text.replace(text.find("id = Bubble1"), 12, "id = Bubble1\n  Cn = 0.04\n  Pe = auto\n  level_interface = 8\n  dt_schedule = 0.1:1e-4, 0.5:5e-4");
  const auto cfg = io::parse_config(text);
  EXPECT_EQ(cfg.spec.params.Cn, 0.04);
  EXPECT_DOUBLE_EQ(cfg.spec.params.Pe, core::PhysicalParams::peclet_from_cahn(0.04));
  EXPECT_EQ(cfg.spec.levels.interface, 8);
  ASSERT_EQ(cfg.spec.dt_schedule.size(), 2u);
  EXPECT_EQ(cfg.spec.dt_schedule[1].second, 5e-4);
  const auto rt = io::parse_config(kMinimal, cases::CaseId::RT2D);
  EXPECT_EQ(rt.spec.id, cases::CaseId::RT2D);
  EXPECT_EQ(rt.spec.params.Re, 3000.0);
}

TEST(Config, DuplicateKeyNamesBothLines) {
  std::string text = kMinimal;
  text.replace(text.find("  rtol = 1e-8\n"), 14, "  rtol = 1e-8\n  rtol = 1e-9\n");
  const auto msg = config_error(text);
  EXPECT_NE(msg.find("duplicate key 'rtol'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("lines 7 and 8"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyAndMissingBlock) {
  std::string text = kMinimal;
  text.replace(text.find("  rtol = 1e-8\n"), 14, "  rtl = 1e-8\n");
  const auto msg = config_error(text);
  EXPECT_NE(msg.find("unknown key 'rtl'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 7"), std::string::npos) << msg;

  std::string no_output = kMinimal;
  no_output.erase(no_output.find("output {"));
  EXPECT_NE(config_error(no_output).find("missing required block 'output'"), std::string::npos);
  EXPECT_NE(config_error(std::string(kMinimal) + "extra {\n}\n").find("unknown block 'extra'"), std::string::npos);
  EXPECT_NE(config_error("case {\n  id = MMS\n").find("not closed"), std::string::npos);
  std::string bad_level = kMinimal;
  bad_level.replace(bad_level.find("id = Bubble1"), 12, "id = Bubble1\n  level = seven");
  const auto lm = config_error(bad_level);
  EXPECT_NE(lm.find("line 3: case.level"), std::string::npos) << lm;
}

TEST(Config, SerializeRoundTrips) {
  auto cfg = io::parse_config(kMinimal, cases::CaseId::RT2D);
  cfg.spec.params.Cn = 0.0123456789012345;
  cfg.spec.dt_schedule = {{0.1, 1e-4}};
  cfg.spec.levels = {4, 5, 8};
  cfg.solvers.ch.newton_max_iters = 17;
  cfg.solvers.pp.precond = linalg::PrecondType::SSOR;
  cfg.output.vtk_every = 25;
  const std::string text = io::serialize(cfg);
  const auto back = io::parse_config(text);
  EXPECT_EQ(io::serialize(back), text);
  EXPECT_EQ(back.spec.params.Cn, cfg.spec.params.Cn);
  EXPECT_EQ(back.spec.levels.wall, 5);
  EXPECT_EQ(back.solvers.ch.newton_max_iters, 17);
  EXPECT_EQ(back.solvers.pp.precond, linalg::PrecondType::SSOR);
  EXPECT_EQ(back.output.vtk_every, 25);
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"mms.cfg", "bubble1.cfg", "bubble2.cfg", "rt2d.cfg"}) {
    const auto path = fs::path(CHNS_SOURCE_DIR) / "configs" / name;
    EXPECT_NO_THROW(io::load_config(path.string()).spec.validate()) << name;
  }
  EXPECT_THROW(io::load_config("/nonexistent/x.cfg"), IoError);
}

TEST(Timeseries, HeaderOnlyThenRows) {
  const auto path = scratch("ts.csv");
  {
    io::TimeseriesWriter w(path.string());
    EXPECT_EQ(slurp(path), std::string(io::kTimeseriesHeader) + "\n");
    cases::StepRecord r;
    r.t = 0.1 + 0.2;
    r.diag.energy = 1.0 / 3.0;
    r.mass_drift = -2.5e-13;
    r.diag.centroid = 1.25;
    w.write(r);
  }
  std::istringstream in(slurp(path));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> cols;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  ASSERT_EQ(cols.size(), 11u);
  EXPECT_EQ(std::stod(cols[0]), 0.1 + 0.2);
  EXPECT_EQ(std::stod(cols[1]), 1.0 / 3.0);
  EXPECT_EQ(std::stod(cols[2]), -2.5e-13);
  EXPECT_EQ(cols[4], "nan");
  EXPECT_THROW(io::TimeseriesWriter("/nonexistent/dir/x.csv"), IoError);
}

namespace {

struct VtkFile {
  std::size_t points = 0, cells = 0;
  std::vector<std::array<double, 3>> xyz;
  std::map<std::string, std::vector<double>> scalars;
  std::vector<int> types;
};

VtkFile read_vtk(const fs::path& p) {
  VtkFile v;
  std::istringstream in(slurp(p));
  std::string tok;
  while (in >> tok) {
    if (tok == "POINTS") {
      in >> v.points >> tok;
      v.xyz.resize(v.points);
      for (auto& x : v.xyz) in >> x[0] >> x[1] >> x[2];
    } else if (tok == "CELLS") {
      std::size_t total;
      in >> v.cells >> total;
      for (std::size_t i = 0; i < total; ++i) in >> tok;
    } else if (tok == "CELL_TYPES") {
      std::size_t n;
      in >> n;
      v.types.resize(n);
      for (auto& t : v.types) in >> t;
    } else if (tok == "SCALARS") {
      std::string name;
      in >> name >> tok >> tok >> tok >> tok;  // type, ncomp, LOOKUP_TABLE default
      auto& vals = v.scalars[name];
      vals.resize(v.points);
      for (auto& x : vals) in >> x;
    }
  }
  return v;
}

}  // namespace

TEST(Vtk, UniformLevelOneMesh) {
  const auto lat = octree::Lattice<2>::make(1, {1.0, 1.0});
  const auto m = core::make_mesh(octree::uniform_tree(lat, 1));
  const core::Vec phi(m.nodes(), 0.25);
  io::VtkFields f;
  f.phi = &phi;
  const auto path = scratch("uniform.vtk");
  io::write_vtk(m, f, path.string());
  const auto v = read_vtk(path);
  EXPECT_EQ(v.points, 9u);
  EXPECT_EQ(v.cells, 4u);
  for (int t : v.types) EXPECT_EQ(t, 9);
  ASSERT_TRUE(v.scalars.count("phi"));
  for (double x : v.scalars.at("phi")) EXPECT_EQ(x, 0.25);
  EXPECT_FALSE(v.scalars.count("pressure"));
}

TEST(Vtk, HangingPointsCarryInterpolatedValues) {
  // one refined quadrant creates hanging points on two faces
  const auto lat = octree::Lattice<2>::make(2, {1.0, 1.0});
  auto tree = octree::construct_tree<2>(lat, [&](const octree::Octant<2>& o) {
    return o.level < 1 || (o.level < 2 && o.anchor[0] == 0 && o.anchor[1] == 0);
  });
  const auto m = core::make_mesh(std::move(tree));
  const core::Vec lin = [&] {
    core::Vec v(m.nodes());
    for (std::size_t i = 0; i < m.nodes(); ++i) v[i] = 2.0 * m.position(i)[0] - 3.0 * m.position(i)[1] + 1.0;
    return v;
  }();
  io::VtkFields f;
  f.pressure = &lin;
  const auto path = scratch("hanging.vtk");
  io::write_vtk(m, f, path.string());
  const auto v = read_vtk(path);
  EXPECT_EQ(v.cells, 7u);
  EXPECT_EQ(v.points, 14u);
  EXPECT_GT(v.points, m.nodes());
  // a linear field is reproduced exactly at every point, hanging ones included
  const auto& p = v.scalars.at("pressure");
  for (std::size_t i = 0; i < v.points; ++i) EXPECT_NEAR(p[i], 2.0 * v.xyz[i][0] - 3.0 * v.xyz[i][1] + 1.0, 1e-14);
}

TEST(Vtk, WrongFieldSizeIsRejected) {
  const auto lat = octree::Lattice<2>::make(1, {1.0, 1.0});
  const auto m = core::make_mesh(octree::uniform_tree(lat, 1));
  const core::Vec bad(3, 0.0);
  io::VtkFields f;
  f.mu = &bad;
  EXPECT_THROW(io::write_vtk(m, f, scratch("bad.vtk").string()), ContractError);
}

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CHNS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const auto good = scratch("good.cfg");
  std::ofstream(good) << kMinimal;
  EXPECT_EQ(run_cli("--config " + good.string() + " --dry-run"), 0);
  EXPECT_EQ(run_cli("--config " + good.string() + " --case nope --dry-run"), 2);
  EXPECT_EQ(run_cli("--bogus"), 2);
  const auto bad = scratch("bad.cfg");
  std::ofstream(bad) << "case {\n  id = MMS\n  Re = -1\n}\n";
  EXPECT_EQ(run_cli("--config " + bad.string()), 2);
  EXPECT_EQ(run_cli("--config /nonexistent/x.cfg"), 4);
  // one cheap MMS step writes the time series
  const auto mms = scratch("mms.cfg");
  std::string text = kMinimal;
  text.replace(text.find("id = Bubble1"), 12, "id = MMS\n  level = 3");
  std::ofstream(mms) << text;
  const auto out = scratch("mms_out");
  EXPECT_EQ(run_cli("--config " + mms.string() + " --steps 2 --out " + out.string()), 0);
  std::istringstream ts(slurp(out / "timeseries.csv"));
  int lines = 0;
  for (std::string l; std::getline(ts, l);) ++lines;
  EXPECT_EQ(lines, 3);
  // a solver that cannot converge in one iteration
  std::string strict = text;
  strict.replace(strict.find("solver_momentum {\n"), 18, "solver_momentum {\n  max_iters = 1\n  rtol = 1e-14\n  atol = 1e-300\n");
  const auto sf = scratch("strict.cfg");
  std::ofstream(sf) << strict;
  EXPECT_EQ(run_cli("--config " + sf.string() + " --steps 1 --out " + out.string()), 3);
}
