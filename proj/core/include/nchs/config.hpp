#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nchs/error.hpp"
#include "nchs/forward.hpp"
#include "nchs/initial.hpp"
#include "nchs/material.hpp"
#include "nchs/nonlocal.hpp"
#include "nchs/optimize.hpp"

namespace nchs {

struct GridSpec {
  int nx = 32, ny = 32;
  double lx = 1.0, ly = 1.0;
};

struct PhaseSpec {
  std::string preset = "stripe";  ///< stripe | pure-phase | random-seeded | file
  StripeSpec stripe;
  double sign = 1.0;              ///< pure-phase
  std::uint64_t seed = 1;         ///< random-seeded
  double mean = 0.0, amplitude = 0.5;
  std::string file;               ///< trajectory or snapshot file; the first state's phi is used
};

struct VelocitySpec {
  std::string preset = "rest";  ///< rest | vortex
  double amplitude = 0.0;
};

struct ControlSpec {
  std::string mode = "zero";  ///< zero | file | vortex | random
  std::string file;
  double amplitude = 0.0;     ///< vortex: streamfunction amplitude; random: max |v|
  std::uint64_t seed = 1;
};

struct TargetSpec {
  std::string source = "reference";  ///< reference | file | zero
  ControlSpec control;               ///< reference: control driving the target run
  std::string file;                  ///< file: trajectory whose states are the targets
};

struct OptimizeSpec {
  double lower = -1.0, upper = 1.0;
  double beta1 = 0.0, beta2 = 1.0, beta3 = 0.0, beta4 = 0.0, gamma = 1e-2;
  TargetSpec targets;
  OptimizerConfig optimizer;
};

struct CheckSpec {
  int directions = 5;
  double eps = 1e-5;
  double tolerance = 1e-6;
  std::vector<double> eps_list{1e-2, 1e-3, 1e-4};
  double taylor_ratio = 0.2;  ///< lin-check passes if r(last)/r(first) <= this
  std::uint64_t seed = 1;
};

struct OutputSpec {
  std::string directory = ".";
  std::string trajectory = "trajectory.nchs";
  std::string diagnostics = "diagnostics.csv";
  std::string history = "history.csv";
  std::string control = "control.nchs";
  std::vector<double> snapshot_times;  ///< gnuplot phi dumps at the nearest snapshots
};

struct RunConfig {
  GridSpec grid;
  SolverConfig solver;
  Kernel kernel;
  std::string law = "log-degenerate";
  ViscosityLaw viscosity;
  double delta_eval = 1e-9;
  double quartic_c = 2.0;
  bool validate_laws = true;
  PhaseSpec phase;
  VelocitySpec velocity;
  ControlSpec control;
  OptimizeSpec optimize;
  CheckSpec checks;
  OutputSpec output;

  std::vector<std::string> warnings;
  std::uint64_t hash = 0;  ///< FNV-1a of the source text
};

/// Thrown with every problem found, one per line in what().
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses YAML text. Unknown keys become warnings; every constraint violation is collected
/// before throwing ConfigErrors. Relative file paths are resolved against base_dir.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a(const std::string& text);

/// Objects assembled from a validated config.
Grid make_grid(const RunConfig& cfg);
MaterialLaws make_laws(const RunConfig& cfg);
Problem make_problem(const RunConfig& cfg);
ControlField make_control(const ControlSpec& spec, const Problem& problem);
/// Box bounds from the optimize block attached to a control.
void attach_bounds(ControlField& v, const OptimizeSpec& spec);
CostWeights make_weights(const OptimizeSpec& spec, const Problem& problem);

}  // namespace nchs
