#pragma once

#include <optional>
#include <string>

#include "delayfb/json_io.hpp"
#include "delayfb/train.hpp"

namespace delayfb {

// Initial-history selection for the simulate subcommand.
struct PhiSpec {
  enum class Kind { default_ones, constant, linear, sampled };
  Kind kind = Kind::default_ones;
  Eigen::VectorXd value;   // constant / linear offset
  Eigen::VectorXd slope;   // linear only
  Eigen::MatrixXd nodes;   // sampled only, n x count
  InitialFunction build(int n, double h) const;
};

struct SimulateOptions {
  double T = 20.0;
  int r = 64;
  PhiSpec phi;
};

struct RunConfig {
  std::optional<DelaySystem> system;  // inline source
  std::string system_path;            // file source; exactly one of the two
  std::optional<Gain> gain;           // optional; commands default to K = 0
  std::string gain_path;
  TrainConfig train;
  SimulateOptions sim;
  std::string out_dir = ".";
  int verbosity = 0;
};

// Strict parse: unknown keys are rejected with the key named in the error,
// absent optional keys take the documented defaults. Requires exactly one
// of "system" / "system_path". Throws ConfigError.
RunConfig parse_config(const std::string& text);

// Same schema without the system-source requirement, for subcommands that
// generate their own systems (benchmark, grad-check).
RunConfig parse_config_without_system(const std::string& text);

// Loads and parses the file behind a RunConfig source field.
DelaySystem load_system(const RunConfig& cfg);
Gain load_gain(const RunConfig& cfg, const DelaySystem& sys);  // zero default

}  // namespace delayfb
