#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bregcvx/dataset.hpp"
#include "bregcvx/models.hpp"
#include "bregcvx/omega_norm.hpp"
#include "bregcvx/trace.hpp"

namespace bregcvx {

/// One cell of a benchmark grid.
struct ExperimentSpec {
  std::string dataset;
  /// Source file; ignored when `data` is set.
  std::string path;
  LoadOptions load;
  /// In-memory raw data (before preprocessing), used instead of `path` when set.
  std::shared_ptr<const Dataset> data;
  /// Stratified down-sampling target (0: keep all rows).
  Eigen::Index subsample = 0;

  ModelKind model = ModelKind::cond_jc;
  FamilyId transfer = FamilyId::euclidean;
  /// Cluster count; 0 takes the number of label classes.
  int d = 0;
  double alpha = 1e-5;
  double beta = 1e-5;
  double gamma = 1e-6;
  std::uint64_t seed = 0;
  int rounding_restarts = 10;
  int baseline_restarts = 30;
  int em_restarts = 20;
  NormGeometry geometry = NormGeometry::m2;
  SolverTolerances tolerances;
  /// Directory receiving per-cell assignment files (empty: not persisted).
  std::string output_dir;
  TraceSink trace;

  /// Throws InvalidArgument for incompatible settings (disc requires the sigmoid transfer).
  void validate() const;
  /// Stable identifier, also used for artifact file names.
  std::string key() const;
};

/// Outcome of one grid cell. Fields that do not apply are NaN.
struct ResultRecord {
  std::string dataset;
  std::string model;
  std::string transfer;
  long t = 0;
  long n = 0;
  int d = 0;
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  std::uint64_t seed = 0;
  /// After rounding, before re-optimisation (relaxations only).
  double rounded_objective_mean = 0, rounded_objective_std = 0;
  double rounded_accuracy_mean = 0, rounded_accuracy_std = 0;
  /// Final hard objective (after re-optimisation / across baseline restarts).
  double objective_mean = 0, objective_std = 0, objective_best = 0;
  double accuracy_mean = 0, accuracy_std = 0;
  double soft_accuracy_mean = 0, soft_accuracy_std = 0;
  double hard_accuracy_mean = 0, hard_accuracy_std = 0;
  double relaxed_objective = 0;
  long iterations = 0;
  bool converged = false;
  /// FNV-1a digest of the best assignment (hex).
  std::string checksum;
  std::string status = "ok";
  /// Not part of the deterministic results file.
  double wall_seconds = 0;

  static ResultRecord failed(const ExperimentSpec& spec, const std::string& message);
};

/// Loads (or takes) the data, subsamples, preprocesses for the transfer, then
/// solve -> round -> re-optimise -> score. Baselines skip solve and round.
ResultRecord run_experiment(const ExperimentSpec& spec);

/// Runs every cell on a pool of `workers` threads. Failures become records with
/// an error status. The result is sorted by (dataset, model, transfer, alpha, beta, gamma, seed).
std::vector<ResultRecord> run_grid(const std::vector<ExperimentSpec>& specs, int workers = 1);

/// 64-bit FNV-1a over the labels, as 16 hex digits.
std::string assignment_checksum(const std::vector<int>& labels);

/// Loads, subsamples and preprocesses the data a spec refers to.
Dataset prepare_dataset(const ExperimentSpec& spec);

}  // namespace bregcvx
