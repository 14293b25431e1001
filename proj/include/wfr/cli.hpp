#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfr/discrete_measure.hpp"
#include "wfr/transport_pipeline.hpp"

namespace wfr {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitNonconvergence = 2,
  kExitGeometry = 3,
  kExitVerification = 4,
};

struct RunConfig {
  std::vector<std::string> measures;
  std::vector<double> times;
  /// Unset selects the solver's automatic epsilon.
  std::optional<double> epsilon;
  int max_iters = 10000;
  double tol = 1e-9;
  int samples_per_segment = 40;
  std::optional<double> space_scale;
  std::optional<double> time_scale;
  double margin = 0.05;
  MassRule mass_rule = MassRule::kSigma;
  MarginalRule marginal_rule = MarginalRule::kForward;
  double support_threshold = 0.0;
  int curvature_steps = 400;
  /// Kernel width for the preset generators.
  std::optional<double> sigma;
  /// Preset grid: interval or box [lo, hi] per axis with `resolution` nodes.
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  std::optional<Index> grid_resolution;
  /// Points drawn per measure; unset keeps the full support.
  std::optional<Index> subsample;
  std::string output = "output";
};

/// Fields absent from the JSON keep their defaults. Throws
/// std::invalid_argument on unknown keys or bad values.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& config);

/// Runs the pipeline and writes curve/t_<k>.csv, times.csv,
/// trajectories.csv and summary.json into `out_dir`. Returns the summary.
nlohmann::json run_spline(const std::vector<DiscreteMeasure>& measures, const RunConfig& config,
                          std::uint64_t seed, const std::filesystem::path& out_dir);

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace wfr
