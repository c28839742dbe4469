#include <doctest.h>

#include <sstream>

#include "config.hpp"
#include "csv.hpp"
#include "experiments.hpp"

using namespace mgritsl;
using namespace mgritsl::tools;

namespace {
ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}
}  // namespace

TEST_CASE("emitted configurations parse back identically") {
  ExperimentConfig a;
  CHECK(parse(emit_config(a)) == a);

  ExperimentConfig b;
  b.family = Family::sdirk;
  b.p = 5;
  b.cfl = 0.1 + 0.2;  // not representable in a short decimal
  b.cfl_fraction = false;
  b.grid = {128, 512};
  b.grids = {{32, 64}, {128, 512}};
  b.m = {2, 8};
  b.nu = 0;
  b.cycle = Cycle::v_cycle;
  b.tolerance = 3.3e-11;
  b.seed = 987654321987654321ULL;
  b.threads = 3;
  b.coarse = CoarseKind::rediscretized;
  b.solver = SolverChoice::gmres;
  b.excluded = 4;
  b.c_min = 1.0 / 3.0;
  b.c_samples = 7;
  b.measure = true;
  b.out = "result.csv";
  CHECK(parse(emit_config(b)) == b);
}

TEST_CASE("configuration parsing") {
  const auto cfg = parse("# comment\n[discretization]\nfamily = sdirk\np = 1\ncfl = 4\n"
                         "cfl_fraction = false\n[mgrit]\nm = 2, 16\ncycle = v\n");
  CHECK(cfg.family == Family::sdirk);
  CHECK(cfg.cfl == 4.0);
  CHECK(cfg.m == std::vector<int>{2, 16});
  CHECK(cfg.cycle == Cycle::v_cycle);
  CHECK_THROWS_AS(parse("[discretization]\nflavor = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("p = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[discretization]\np = three\n"), ConfigError);
  CHECK(parse_grid("64,256") == GridSize{64, 256});
  CHECK_THROWS_AS(parse_grid("64"), ConfigError);
}

TEST_CASE("unstable combinations are rejected with a reason") {
  ExperimentConfig cfg;
  cfg.coarse = CoarseKind::rediscretized;
  try {
    validate(cfg);
    FAIL("explicit rediscretization accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unstable") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("[coarse]\nkind = rediscretized\n"), ConfigError);
  ExperimentConfig sd;
  sd.family = Family::sdirk;
  CHECK_THROWS_AS(validate(sd), ConfigError);  // c-fraction needs an explicit scheme
}

TEST_CASE("fractional CFL numbers scale by the stability limit") {
  ExperimentConfig cfg;
  cfg.cfl = 0.5;
  CHECK(absolute_cfl(cfg, 0.5) == doctest::Approx(0.5 * cfl_limit(3, erk_tableau(3))));
  cfg.family = Family::sdirk;
  cfg.cfl_fraction = false;
  CHECK(absolute_cfl(cfg, 5.0) == 5.0);
}

TEST_CASE("number formatting") {
  CHECK(format_sci(0.25) == "2.500000000e-01");
  CHECK(format_sci(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_exact(0.1) == "0.1");
  CHECK(std::stod(format_exact(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("csv writer") {
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b"});
  csv.metadata("x = 1\ny = 2");
  csv.cell(1).cell(0.5).end_row();
  CHECK(out.str() == "# x = 1\n# y = 2\na,b\n1,5.000000000e-01\n");
  csv.cell(1);
  CHECK_THROWS(csv.end_row());
}

TEST_CASE("a one-point sweep yields one row per coarsening factor") {
  ExperimentConfig cfg;
  cfg.family = Family::sdirk;
  cfg.p = 1;
  cfg.cfl_fraction = false;
  cfg.coarse = CoarseKind::rediscretized;
  cfg.c_min = 2.0;
  cfg.c_max = 2.0;
  cfg.c_samples = 1;
  cfg.m = {2};
  cfg.samples = 256;
  std::ostringstream out;
  cmd_sweep(cfg, out);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty() && line[0] != '#';
  CHECK(rows == 2);  // header and one data row
  const auto sweep = compute_sweep(cfg);
  REQUIRE(sweep.size() == 1);
  CHECK(sweep[0].rho_check == doctest::Approx(2.0 * 0.5 / 2.5));
}

TEST_CASE("sweep output is independent of the thread count") {
  ExperimentConfig cfg;
  cfg.c_min = 0.2;
  cfg.c_max = 0.9;
  cfg.c_samples = 5;
  cfg.samples = 256;
  cfg.threads = 1;
  std::ostringstream a, b;
  cmd_sweep(cfg, a);
  cfg.threads = 4;
  cmd_sweep(cfg, b);
  // The emitted configuration differs in the thread count only.
  auto strip = [](const std::string& s) { return s.substr(s.find("\nc_fraction")); };
  CHECK(strip(a.str()) == strip(b.str()));
}
