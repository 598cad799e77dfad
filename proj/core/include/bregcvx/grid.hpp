#pragma once

#include <string>
#include <vector>

#include "bregcvx/config.hpp"
#include "bregcvx/experiment.hpp"

namespace bregcvx {

/// A benchmark grid expanded from a key=value configuration.
///
/// Recognised keys (lists are comma separated, each list spans a grid axis):
///   models, transfers, alpha, beta, gamma, seeds (or seed), clusters,
///   rounding_restarts, baseline_restarts, em_restarts, geometry (m2|m3),
///   tol (both solver tolerances), gcg_tol, gcg_max_iter, admm_tol,
///   admm_max_iter, output, workers.
///   dataset.<name>.path | .label_column | .delimiter | .drop | .missing |
///     .subsample | .clusters       -- file-backed datasets
///   synthetic.<name>.clusters | .per_cluster | .features | .separation |
///     .noise | .min_gap | .seed              -- planted datasets generated in memory
/// Relative dataset paths are resolved against `base_dir`.
struct GridPlan {
  std::vector<ExperimentSpec> cells;
  /// Human-readable reasons for cells left out (incompatible model/transfer pairs).
  std::vector<std::string> skipped;
  std::string output_dir;
  int workers = 1;
};

/// Throws InvalidArgument on unknown model/transfer names, a grid without
/// datasets, or malformed numbers.
GridPlan build_grid(const KeyValueConfig& config, const std::string& base_dir = ".");

}  // namespace bregcvx
