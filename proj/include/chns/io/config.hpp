#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chns/cases/case_spec.hpp"
#include "chns/cases/simulation.hpp"

namespace chns::io {

/// Output settings of a run.
struct OutputConfig {
  std::string dir = "out";
  std::string csv = "timeseries.csv";
  int vtk_every = 0;  // 0 disables field dumps
  int log_every = 1;
  int threads = 0;    // 0 keeps the library default
};

struct RunConfig {
  cases::CaseSpec spec;
  cases::SolverSet solvers;
  OutputConfig output;
};

namespace detail {

struct Entry {
  std::string value;
  int line = 0;
};

struct Block {
  std::map<std::string, Entry> keys;
  int line = 0;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !std::isdigit(static_cast<unsigned char>(s[0]));
}

inline std::map<std::string, Block> tokenize(const std::string& text) {
  std::map<std::string, Block> blocks;
  std::istringstream in(text);
  std::string raw, current;
  int lineno = 0;
  auto fail = [&](const std::string& msg) { throw ConfigError("line " + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line == "}") {
      if (current.empty()) fail("unmatched '}'");
      current.clear();
      continue;
    }
    if (line.back() == '{') {
      if (!current.empty()) fail("nested block inside '" + current + "'");
      const std::string name = trim(line.substr(0, line.size() - 1));
      if (!is_identifier(name)) fail("bad block name '" + name + "'");
      if (blocks.count(name))
        fail("duplicate block '" + name + "' (first opened on line " + std::to_string(blocks[name].line) + ")");
      blocks[name].line = lineno;
      current = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', 'name {' or '}'");
    if (current.empty()) fail("key outside of any block");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!is_identifier(key)) fail("bad key '" + key + "'");
    if (value.empty()) fail("missing value for '" + key + "'");
    auto& b = blocks[current];
    if (auto it = b.keys.find(key); it != b.keys.end())
      fail("duplicate key '" + key + "' in block '" + current + "' (lines " + std::to_string(it->second.line) +
           " and " + std::to_string(lineno) + ")");
    b.keys[key] = {value, lineno};
  }
  if (!current.empty()) throw ConfigError("block '" + current + "' is not closed");
  return blocks;
}

/// Consumes the keys of one block; every key must be read exactly once.
class Reader {
 public:
  Reader(std::string name, Block b) : name_(std::move(name)), block_(std::move(b)) {}

  bool has(const std::string& k) const { return block_.keys.count(k) > 0; }

  template <class T>
  bool get(const std::string& k, T& out) {
    auto it = block_.keys.find(k);
    if (it == block_.keys.end()) return false;
    const Entry e = it->second;
    block_.keys.erase(it);
    try {
      out = convert<T>(e.value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + name_ + "." + k + ": " + err.what());
    }
    return true;
  }

  void finish() const {
    if (block_.keys.empty()) return;
    const auto& [k, e] = *block_.keys.begin();
    throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + k + "' in block '" + name_ + "'");
  }

 private:
  static std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || c == ' ' || c == '\t') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  template <class T>
  static T convert(const std::string& s) {
    if constexpr (std::is_same_v<T, std::string>) {
      return s;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw ConfigError("expected true or false, got '" + s + "'");
    } else if constexpr (std::is_integral_v<T>) {
      T v{};
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("expected an integer, got '" + s + "'");
      return v;
    } else if constexpr (std::is_floating_point_v<T>) {
      return number(s);
    } else if constexpr (std::is_same_v<T, std::array<double, 2>> || std::is_same_v<T, std::array<double, 3>>) {
      const auto w = words(s);
      T out{};
      if (w.size() != out.size()) throw ConfigError("expected " + std::to_string(out.size()) + " numbers");
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = number(w[i]);
      return out;
    } else if constexpr (std::is_same_v<T, std::array<int, 2>>) {
      const auto w = words(s);
      if (w.size() != 2) throw ConfigError("expected 2 integers");
      return T{convert<int>(w[0]), convert<int>(w[1])};
    } else {
      static_assert(std::is_same_v<T, std::vector<std::pair<double, double>>>);
      // "until:dt, until:dt, ..."
      T out;
      for (const auto& item : words(s)) {
        const auto c = item.find(':');
        if (c == std::string::npos) throw ConfigError("schedule entries are 'until:dt', got '" + item + "'");
        out.emplace_back(number(item.substr(0, c)), number(item.substr(c + 1)));
      }
      return out;
    }
  }

  std::string name_;
  Block block_;
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Case defaults for an id before any overrides.
inline cases::CaseSpec default_case(cases::CaseId id) {
  switch (id) {
    case cases::CaseId::Bubble1: return cases::bubble_setup(1, 0.01, {7, 7, 7});
    case cases::CaseId::Bubble2: return cases::bubble_setup(2, 0.005, {7, 7, 7});
    case cases::CaseId::RT2D: return cases::rt2d_setup(0.5, 0.02, {4, 4, 7});
    default: return cases::mms_setup(5);
  }
}

inline void read_solver(detail::Reader r, linalg::SolverConfig& c, bool newton) {
  std::string pc;
  if (r.get("precond", pc)) c.precond = linalg::parse_precond(pc);
  r.get("rtol", c.rtol);
  r.get("atol", c.atol);
  r.get("max_iters", c.max_iters);
  r.get("omega", c.omega);
  if (newton) {
    r.get("newton_rtol", c.newton_rtol);
    r.get("newton_atol", c.newton_atol);
    r.get("newton_max_iters", c.newton_max_iters);
  }
  r.finish();
}

/// Parses the block configuration format; unknown keys and missing blocks are errors.
/// A case override replaces the id, so the case keys apply on top of that case's defaults.
inline RunConfig parse_config(const std::string& text, std::optional<cases::CaseId> case_override = {}) {
  auto blocks = detail::tokenize(text);
  static const char* known[] = {"case", "solver_momentum", "solver_pp", "solver_vupdate", "solver_ch", "output"};
  for (const auto& [name, b] : blocks) {
    bool ok = false;
    for (const char* k : known) ok = ok || name == k;
    if (!ok) throw ConfigError("line " + std::to_string(b.line) + ": unknown block '" + name + "'");
  }
  for (const char* k : known)
    if (!blocks.count(k)) throw ConfigError(std::string("missing required block '") + k + "'");

  RunConfig cfg;
  detail::Reader c("case", blocks["case"]);
  std::string s;
  if (!c.get("id", s)) throw ConfigError("line " + std::to_string(blocks["case"].line) + ": case block needs 'id'");
  auto& sp = cfg.spec;
  sp = default_case(case_override ? *case_override : cases::parse_case_id(s));
  c.get("domain_lo", sp.domain_lo);
  c.get("domain_hi", sp.domain_hi);
  c.get("roots", sp.roots);
  c.get("bubble_center", sp.bubble_center);
  c.get("bubble_radius", sp.bubble_radius);
  c.get("interface_height", sp.interface_height);
  c.get("perturbation", sp.perturbation);
  if (c.get("atwood", sp.atwood) && !c.has("rho_ratio") && sp.id == cases::CaseId::RT2D)
    sp.params.rho_ratio = (1.0 - sp.atwood) / (1.0 + sp.atwood);
  static const char* faces[] = {"bc_left", "bc_right", "bc_bottom", "bc_top"};
  for (int f = 0; f < 4; ++f)
    if (c.get(faces[f], s)) sp.bc.face[static_cast<std::size_t>(f)] = core::parse_velocity_bc(s);
  auto& p = sp.params;
  c.get("Re", p.Re);
  c.get("We", p.We);
  c.get("Cn", p.Cn);
  if (c.get("Pe", s)) {
    if (s == "auto") {
      sp.pe_from_cn = true;
    } else {
      sp.pe_from_cn = false;
      p.Pe = detail::number(s);
    }
  }
  if (sp.pe_from_cn) p.Pe = core::PhysicalParams::peclet_from_cahn(p.Cn);
  c.get("Fr", p.Fr);
  c.get("rho_ratio", p.rho_ratio);
  c.get("nu_ratio", p.nu_ratio);
  c.get("gravity", p.gravity);
  c.get("mobility", p.mobility);
  c.get("C_I", p.C_I);
  c.get("C_phi", p.C_phi);
  c.get("dt", sp.dt);
  c.get("dt_schedule", sp.dt_schedule);
  c.get("t_end", sp.t_end);
  c.get("steps", sp.steps);
  int level = 0;
  if (c.get("level", level)) sp.levels = {level, level, level};
  c.get("level_bkg", sp.levels.bkg);
  c.get("level_wall", sp.levels.wall);
  c.get("level_interface", sp.levels.interface);
  c.get("remesh_every", sp.remesh_every);
  if (c.get("forcing", s)) sp.forcing_mode = core::parse_surface_tension(s);
  if (c.get("uhat", s)) sp.uhat = core::parse_uhat_mode(s);
  c.finish();

  read_solver({"solver_momentum", blocks["solver_momentum"]}, cfg.solvers.momentum, false);
  read_solver({"solver_pp", blocks["solver_pp"]}, cfg.solvers.pp, false);
  read_solver({"solver_vupdate", blocks["solver_vupdate"]}, cfg.solvers.vupdate, false);
  read_solver({"solver_ch", blocks["solver_ch"]}, cfg.solvers.ch, true);

  detail::Reader o("output", blocks["output"]);
  o.get("dir", cfg.output.dir);
  o.get("csv", cfg.output.csv);
  o.get("vtk_every", cfg.output.vtk_every);
  o.get("log_every", cfg.output.log_every);
  o.get("threads", cfg.output.threads);
  o.finish();

  CHNS_REQUIRE(cfg.output.vtk_every >= 0 && cfg.output.log_every >= 1, ConfigError,
               "output cadences must be non-negative (vtk_every) and at least one (log_every)");
  CHNS_REQUIRE(cfg.output.threads >= 0, ConfigError, "threads must be non-negative");
  for (const auto* sc : {&cfg.solvers.momentum, &cfg.solvers.pp, &cfg.solvers.vupdate, &cfg.solvers.ch})
    sc->validate();
  sp.validate();
  return cfg;
}

/// Writes every setting explicitly so that the text reparses to the same configuration.
inline std::string serialize(const RunConfig& cfg) {
  using detail::fmt;
  std::ostringstream o;
  const auto& sp = cfg.spec;
  const auto& p = sp.params;
  auto pair = [](const auto& a) { return fmt(a[0]) + " " + fmt(a[1]); };
  o << "case {\n";
  o << "  id = " << cases::to_string(sp.id) << "\n";
  o << "  domain_lo = " << pair(sp.domain_lo) << "\n";
  o << "  domain_hi = " << pair(sp.domain_hi) << "\n";
  o << "  roots = " << sp.roots[0] << " " << sp.roots[1] << "\n";
  o << "  bubble_center = " << pair(sp.bubble_center) << "\n";
  o << "  bubble_radius = " << fmt(sp.bubble_radius) << "\n";
  o << "  atwood = " << fmt(sp.atwood) << "\n";
  o << "  interface_height = " << fmt(sp.interface_height) << "\n";
  o << "  perturbation = " << fmt(sp.perturbation) << "\n";
  static const char* faces[] = {"bc_left", "bc_right", "bc_bottom", "bc_top"};
  for (int f = 0; f < 4; ++f) o << "  " << faces[f] << " = " << core::to_string(sp.bc.face[static_cast<std::size_t>(f)]) << "\n";
  o << "  Re = " << fmt(p.Re) << "\n";
  o << "  We = " << fmt(p.We) << "\n";
  o << "  Cn = " << fmt(p.Cn) << "\n";
  o << "  Pe = " << (sp.pe_from_cn ? std::string("auto") : fmt(p.Pe)) << "\n";
  o << "  Fr = " << fmt(p.Fr) << "\n";
  o << "  rho_ratio = " << fmt(p.rho_ratio) << "\n";
  o << "  nu_ratio = " << fmt(p.nu_ratio) << "\n";
  o << "  gravity = " << fmt(p.gravity[0]) << " " << fmt(p.gravity[1]) << " " << fmt(p.gravity[2]) << "\n";
  o << "  mobility = " << fmt(p.mobility) << "\n";
  o << "  C_I = " << fmt(p.C_I) << "\n";
  o << "  C_phi = " << fmt(p.C_phi) << "\n";
  o << "  dt = " << fmt(sp.dt) << "\n";
  if (!sp.dt_schedule.empty()) {
    o << "  dt_schedule =";
    for (std::size_t i = 0; i < sp.dt_schedule.size(); ++i)
      o << (i ? ", " : " ") << fmt(sp.dt_schedule[i].first) << ":" << fmt(sp.dt_schedule[i].second);
    o << "\n";
  }
  o << "  t_end = " << fmt(sp.t_end) << "\n";
  o << "  steps = " << sp.steps << "\n";
  o << "  level_bkg = " << sp.levels.bkg << "\n";
  o << "  level_wall = " << sp.levels.wall << "\n";
  o << "  level_interface = " << sp.levels.interface << "\n";
  o << "  remesh_every = " << sp.remesh_every << "\n";
  o << "  forcing = " << core::to_string(sp.forcing_mode) << "\n";
  o << "  uhat = " << core::to_string(sp.uhat) << "\n";
  o << "}\n";
  auto solver = [&](const char* name, const linalg::SolverConfig& c, bool newton) {
    o << name << " {\n";
    o << "  precond = " << linalg::to_string(c.precond) << "\n";
    o << "  rtol = " << fmt(c.rtol) << "\n";
    o << "  atol = " << fmt(c.atol) << "\n";
    o << "  max_iters = " << c.max_iters << "\n";
    o << "  omega = " << fmt(c.omega) << "\n";
    if (newton) {
      o << "  newton_rtol = " << fmt(c.newton_rtol) << "\n";
      o << "  newton_atol = " << fmt(c.newton_atol) << "\n";
      o << "  newton_max_iters = " << c.newton_max_iters << "\n";
    }
    o << "}\n";
  };
  solver("solver_momentum", cfg.solvers.momentum, false);
  solver("solver_pp", cfg.solvers.pp, false);
  solver("solver_vupdate", cfg.solvers.vupdate, false);
  solver("solver_ch", cfg.solvers.ch, true);
  o << "output {\n";
  o << "  dir = " << cfg.output.dir << "\n";
  o << "  csv = " << cfg.output.csv << "\n";
  o << "  vtk_every = " << cfg.output.vtk_every << "\n";
  o << "  log_every = " << cfg.output.log_every << "\n";
  o << "  threads = " << cfg.output.threads << "\n";
  o << "}\n";
  return o.str();
}

inline RunConfig load_config(const std::string& path, std::optional<cases::CaseId> case_override = {}) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  std::fclose(f);
  return parse_config(text, case_override);
}

}  // namespace chns::io
