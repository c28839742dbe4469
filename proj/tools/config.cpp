#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"

namespace mgritsl::tools {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& raw, const std::string& key) {
  const auto s = trim(raw);
  T value{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), value);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": cannot parse '" + raw + "' as a number");
  }
  return value;
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const auto s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string grid_text(GridSize g) { return std::to_string(g.nx) + "," + std::to_string(g.nt); }

std::string solver_text(SolverChoice s) {
  switch (s) {
    case SolverChoice::automatic:
      return "auto";
    case SolverChoice::direct:
      return "direct";
    case SolverChoice::gmres:
      return "gmres";
  }
  return "?";
}

SolverChoice parse_solver(const std::string& raw) {
  const auto s = trim(raw);
  if (s == "auto") return SolverChoice::automatic;
  if (s == "direct") return SolverChoice::direct;
  if (s == "gmres") return SolverChoice::gmres;
  throw ConfigError("coarse.solver: expected auto, direct or gmres, got '" + raw + "'");
}

}  // namespace

Family parse_family(const std::string& raw) {
  const auto s = trim(raw);
  if (s == "erk") return Family::erk;
  if (s == "sdirk") return Family::sdirk;
  if (s == "semi_lagrangian" || s == "sl") return Family::semi_lagrangian;
  throw ConfigError("unknown discretization family '" + raw + "' (erk, sdirk, semi_lagrangian)");
}

Cycle parse_cycle(const std::string& raw) {
  const auto s = trim(raw);
  if (s == "two-level" || s == "two_level") return Cycle::two_level;
  if (s == "v" || s == "v-cycle" || s == "v_cycle") return Cycle::v_cycle;
  throw ConfigError("unknown cycle '" + raw + "' (two-level, v)");
}

CoarseKind parse_coarse(const std::string& raw) {
  const auto s = trim(raw);
  if (s == "modified") return CoarseKind::modified;
  if (s == "rediscretized") return CoarseKind::rediscretized;
  if (s == "plain_sl") return CoarseKind::plain_sl;
  if (s == "ideal") return CoarseKind::ideal;
  throw ConfigError("unknown coarse operator '" + raw +
                    "' (modified, rediscretized, plain_sl, ideal)");
}

std::vector<int> parse_int_list(const std::string& raw) {
  std::vector<int> out;
  std::istringstream in(raw);
  for (std::string item; std::getline(in, item, ',');) {
    out.push_back(parse_number<int>(item, "integer list"));
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

GridSize parse_grid(const std::string& raw) {
  const auto v = parse_int_list(raw);
  if (v.size() != 2) throw ConfigError("grid '" + raw + "' must be NX,NT");
  return {v[0], v[1]};
}

std::vector<GridSize> parse_grid_list(const std::string& raw) {
  std::vector<GridSize> out;
  std::istringstream in(raw);
  for (std::string item; in >> item;) out.push_back(parse_grid(item));
  if (out.empty()) throw ConfigError("empty grid list");
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"discretization.family", [&](auto& v) { cfg.family = parse_family(v); }},
      {"discretization.p", [&](auto& v) { cfg.p = parse_number<int>(v, "discretization.p"); }},
      {"discretization.cfl",
       [&](auto& v) { cfg.cfl = parse_number<double>(v, "discretization.cfl"); }},
      {"discretization.cfl_fraction",
       [&](auto& v) { cfg.cfl_fraction = parse_bool(v, "discretization.cfl_fraction"); }},
      {"grid.size", [&](auto& v) { cfg.grid = parse_grid(v); }},
      {"grid.table", [&](auto& v) { cfg.grids = parse_grid_list(v); }},
      {"mgrit.m", [&](auto& v) { cfg.m = parse_int_list(v); }},
      {"mgrit.nu", [&](auto& v) { cfg.nu = parse_number<int>(v, "mgrit.nu"); }},
      {"mgrit.cycle", [&](auto& v) { cfg.cycle = parse_cycle(v); }},
      {"mgrit.max_iters",
       [&](auto& v) { cfg.max_iters = parse_number<int>(v, "mgrit.max_iters"); }},
      {"mgrit.tolerance",
       [&](auto& v) { cfg.tolerance = parse_number<double>(v, "mgrit.tolerance"); }},
      {"mgrit.seed", [&](auto& v) { cfg.seed = parse_number<std::uint64_t>(v, "mgrit.seed"); }},
      {"mgrit.threads", [&](auto& v) { cfg.threads = parse_number<int>(v, "mgrit.threads"); }},
      {"coarse.kind", [&](auto& v) { cfg.coarse = parse_coarse(v); }},
      {"coarse.solver", [&](auto& v) { cfg.solver = parse_solver(v); }},
      {"coarse.gmres_tol",
       [&](auto& v) { cfg.gmres_tol = parse_number<double>(v, "coarse.gmres_tol"); }},
      {"coarse.gmres_max_iters",
       [&](auto& v) { cfg.gmres_max_iters = parse_number<int>(v, "coarse.gmres_max_iters"); }},
      {"lfa.samples", [&](auto& v) { cfg.samples = parse_number<int>(v, "lfa.samples"); }},
      {"lfa.excluded", [&](auto& v) {
         cfg.excluded = trim(v) == "auto" ? -1 : parse_number<int>(v, "lfa.excluded");
       }},
      {"sweep.c_min", [&](auto& v) { cfg.c_min = parse_number<double>(v, "sweep.c_min"); }},
      {"sweep.c_max", [&](auto& v) { cfg.c_max = parse_number<double>(v, "sweep.c_max"); }},
      {"sweep.c_samples",
       [&](auto& v) { cfg.c_samples = parse_number<int>(v, "sweep.c_samples"); }},
      {"sweep.measure", [&](auto& v) { cfg.measure = parse_bool(v, "sweep.measure"); }},
      {"output.path", [&](auto& v) { cfg.out = trim(v); }},
  };

  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const auto full = section + "." + key;
      const auto it = setters.find(full);
      if (it == setters.end()) throw ConfigError("unknown config key '" + full + "'");
      it->second(value.data());
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string emit_config(const ExperimentConfig& cfg) {
  pt::ptree tree;
  tree.put("discretization.family", to_string(cfg.family));
  tree.put("discretization.p", cfg.p);
  tree.put("discretization.cfl", format_exact(cfg.cfl));
  tree.put("discretization.cfl_fraction", cfg.cfl_fraction ? "true" : "false");
  tree.put("grid.size", grid_text(cfg.grid));
  std::string table;
  for (const auto& g : cfg.grids) table += (table.empty() ? "" : " ") + grid_text(g);
  tree.put("grid.table", table);
  tree.put("mgrit.m", join_ints(cfg.m));
  tree.put("mgrit.nu", cfg.nu);
  tree.put("mgrit.cycle", to_string(cfg.cycle));
  tree.put("mgrit.max_iters", cfg.max_iters);
  tree.put("mgrit.tolerance", format_exact(cfg.tolerance));
  tree.put("mgrit.seed", cfg.seed);
  tree.put("mgrit.threads", cfg.threads);
  tree.put("coarse.kind", to_string(cfg.coarse));
  tree.put("coarse.solver", solver_text(cfg.solver));
  tree.put("coarse.gmres_tol", format_exact(cfg.gmres_tol));
  tree.put("coarse.gmres_max_iters", cfg.gmres_max_iters);
  tree.put("lfa.samples", cfg.samples);
  tree.put("lfa.excluded", cfg.excluded < 0 ? std::string("auto") : std::to_string(cfg.excluded));
  tree.put("sweep.c_min", format_exact(cfg.c_min));
  tree.put("sweep.c_max", format_exact(cfg.c_max));
  tree.put("sweep.c_samples", cfg.c_samples);
  tree.put("sweep.measure", cfg.measure ? "true" : "false");
  tree.put("output.path", cfg.out);
  std::ostringstream os;
  pt::write_ini(os, tree);
  return os.str();
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.p < 1 || cfg.p > 5) throw ConfigError("discretization.p must be in 1..5");
  if (!(cfg.cfl > 0.0)) throw ConfigError("discretization.cfl must be positive");
  if (cfg.cfl_fraction && cfg.family != Family::erk) {
    throw ConfigError("cfl_fraction (c / c_max) applies to explicit schemes only");
  }
  if (cfg.family == Family::erk && cfg.coarse == CoarseKind::rediscretized) {
    throw ConfigError(
        "rediscretized coarse operator with an explicit scheme: the coarse time step m*dt "
        "exceeds the CFL limit and the coarse operator is unstable");
  }
  if (cfg.family == Family::semi_lagrangian && cfg.coarse == CoarseKind::modified) {
    throw ConfigError("the modified coarse operator needs a method-of-lines fine grid");
  }
  const auto check_grid = [](GridSize g) {
    if (g.nx < 8 || g.nt < 1) throw ConfigError("grid sizes need NX >= 8 and NT >= 1");
  };
  check_grid(cfg.grid);
  for (const auto& g : cfg.grids) check_grid(g);
  if (cfg.m.empty()) throw ConfigError("mgrit.m is empty");
  for (int m : cfg.m) {
    if (m < 2) throw ConfigError("coarsening factors must be at least 2");
  }
  if (cfg.nu < 0) throw ConfigError("mgrit.nu must be non-negative");
  if (cfg.max_iters < 1) throw ConfigError("mgrit.max_iters must be at least 1");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("mgrit.tolerance must be positive");
  if (cfg.threads < 0) throw ConfigError("mgrit.threads must be non-negative");
  if (!(cfg.gmres_tol > 0.0) || cfg.gmres_max_iters < 1) {
    throw ConfigError("GMRES needs a positive tolerance and iteration cap");
  }
  if (cfg.samples < 4 || cfg.samples % 2 != 0) throw ConfigError("lfa.samples must be even");
  if (cfg.excluded < -1 || cfg.excluded + 1 >= cfg.samples) {
    throw ConfigError("lfa.excluded out of range");
  }
  if (!(cfg.c_min > 0.0) || cfg.c_max < cfg.c_min || cfg.c_samples < 1) {
    throw ConfigError("sweep needs 0 < c_min <= c_max and c_samples >= 1");
  }
}

double absolute_cfl(const ExperimentConfig& cfg, double value) {
  if (!cfg.cfl_fraction) return value;
  return value * cfl_limit(cfg.p, erk_tableau(cfg.p));
}

DiscretizationSpec discretization(const ExperimentConfig& cfg, GridSize grid, double cfl_value) {
  DiscretizationSpec spec;
  spec.family = cfg.family;
  spec.p = spec.q = cfg.p;
  spec.cfl = absolute_cfl(cfg, cfl_value);
  spec.nx = grid.nx;
  spec.nt = grid.nt;
  return spec;
}

std::optional<CorrectionSolver> correction_solver(const ExperimentConfig& cfg) {
  switch (cfg.solver) {
    case SolverChoice::automatic:
      return std::nullopt;
    case SolverChoice::direct:
      return CorrectionSolver::direct();
    case SolverChoice::gmres:
      return CorrectionSolver::gmres(cfg.gmres_tol, cfg.gmres_max_iters);
  }
  return std::nullopt;
}

MgritConfig mgrit_config(const ExperimentConfig& cfg, Cycle cycle) {
  MgritConfig m;
  m.nu = cfg.nu;
  m.cycle = cycle;
  m.max_iters = cfg.max_iters;
  m.tolerance = cfg.tolerance;
  m.seed = cfg.seed;
  m.threads = cfg.threads;
  return m;
}

}  // namespace mgritsl::tools
