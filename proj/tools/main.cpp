#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "config.hpp"
#include "experiments.hpp"
#include "mgritsl/errors.hpp"

namespace {

using mgritsl::tools::ExperimentConfig;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  bool measure = false;
  std::string cycle;
  std::optional<int> nu;
  std::string m;
  std::string grid;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "experiment configuration file");
  sub->add_option("--out", o.out, "output CSV path (- for stdout)");
  sub->add_option("--threads", o.threads, "worker threads (0: available parallelism)");
  sub->add_option("--seed", o.seed, "seed of the random initial iterate");
  sub->add_option("--cycle", o.cycle, "two-level or v");
  sub->add_option("--nu", o.nu, "number of CF-relaxations per cycle");
  sub->add_option("--m", o.m, "coarsening factors, comma separated");
  sub->add_option("--grid", o.grid, "space-time grid NX,NT");
}

ExperimentConfig resolve(const Overrides& o) {
  using namespace mgritsl::tools;
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.threads) cfg.threads = *o.threads;
  if (o.seed) cfg.seed = *o.seed;
  if (o.measure) cfg.measure = true;
  if (!o.cycle.empty()) cfg.cycle = parse_cycle(o.cycle);
  if (o.nu) cfg.nu = *o.nu;
  if (!o.m.empty()) cfg.m = parse_int_list(o.m);
  if (!o.grid.empty()) {
    cfg.grid = parse_grid(o.grid);
    cfg.grids = {cfg.grid};
  }
  validate(cfg);
  return cfg;
}

template <class F>
bool with_output(const std::string& path, F&& body) {
  if (path.empty() || path == "-") return body(std::cout);
  std::ofstream file(path);
  if (!file) throw mgritsl::tools::ConfigError("cannot open output file " + path);
  return body(file);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mgritsl::tools;
  CLI::App app{"MGRIT with semi-Lagrangian coarse grids for linear advection"};
  app.require_subcommand(1);

  Overrides o;
  auto* constants = app.add_subcommand("constants", "error constants and ERK CFL limits");
  constants->add_option("--out", o.out, "output CSV path (- for stdout)");
  auto* sweep = app.add_subcommand("sweep", "LFA convergence factors over a CFL range");
  add_common(sweep, o);
  sweep->add_flag("--measure", o.measure, "attach measured MGRIT convergence factors");
  auto* iters = app.add_subcommand("iters", "iteration-count table");
  add_common(iters, o);
  auto* validate_cmd = app.add_subcommand("validate", "order, truncation and symbol checks");
  validate_cmd->add_option("--out", o.out, "output CSV path (- for stdout)");
  auto* solve_cmd = app.add_subcommand("solve", "single MGRIT run with residual history");
  add_common(solve_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (constants->parsed()) {
      with_output(o.out, [](std::ostream& out) { cmd_constants(out); return true; });
    } else if (validate_cmd->parsed()) {
      const bool ok = with_output(o.out, [](std::ostream& out) { return cmd_validate(out); });
      return ok ? 0 : 3;
    } else {
      const auto cfg = resolve(o);
      with_output(cfg.out, [&](std::ostream& out) {
        if (sweep->parsed()) cmd_sweep(cfg, out);
        if (iters->parsed()) cmd_iters(cfg, out);
        if (solve_cmd->parsed()) cmd_solve(cfg, out);
        return true;
      });
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const mgritsl::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const mgritsl::SingularityError& e) {
    std::cerr << "singularity: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
