#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mgritsl/lfa.hpp"
#include "mgritsl/mgrit.hpp"

namespace mgritsl::tools {

/// Unreadable or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverChoice { automatic, direct, gmres };

struct GridSize {
  int nx = 64;
  int nt = 256;
  friend bool operator==(const GridSize&, const GridSize&) = default;
};

struct ExperimentConfig {
  // [discretization]
  Family family = Family::erk;
  int p = 3;
  double cfl = 0.85;
  bool cfl_fraction = true;  // cfl is c / c_max (explicit schemes only)

  // [grid]
  GridSize grid;
  std::vector<GridSize> grids = {{64, 256}, {256, 1024}, {1024, 4096}};

  // [mgrit]
  std::vector<int> m = {2, 4, 8, 16};
  int nu = 1;
  Cycle cycle = Cycle::two_level;
  int max_iters = 30;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
  int threads = 0;

  // [coarse]
  CoarseKind coarse = CoarseKind::modified;
  SolverChoice solver = SolverChoice::automatic;
  double gmres_tol = 1e-2;
  int gmres_max_iters = 20;

  // [lfa]
  int samples = kLfaSamples;
  int excluded = -1;  // -1: by order

  // [sweep]
  double c_min = 0.01;
  double c_max = 1.0;
  int c_samples = 512;
  bool measure = false;

  // [output]
  std::string out = "-";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);

/// Rejects invalid combinations; throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Absolute CFL number of a (possibly fractional) value.
double absolute_cfl(const ExperimentConfig& cfg, double value);

/// The fine discretization at a given grid and CFL value.
DiscretizationSpec discretization(const ExperimentConfig& cfg, GridSize grid, double cfl_value);

std::optional<CorrectionSolver> correction_solver(const ExperimentConfig& cfg);

MgritConfig mgrit_config(const ExperimentConfig& cfg, Cycle cycle);

// Parsers shared with the command line.
Family parse_family(const std::string& s);
Cycle parse_cycle(const std::string& s);
CoarseKind parse_coarse(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);
GridSize parse_grid(const std::string& s);
std::vector<GridSize> parse_grid_list(const std::string& s);

}  // namespace mgritsl::tools
