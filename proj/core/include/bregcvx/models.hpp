#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bregcvx/divergence.hpp"
#include "bregcvx/omega_norm.hpp"
#include "bregcvx/trace.hpp"

namespace bregcvx {

/// Observations (rows) with optional integer ground truth.
struct Dataset {
  std::string name;
  Eigen::MatrixXd x;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  /// Free-form notes (e.g. preprocessing applied).
  std::vector<std::string> notes;

  Eigen::Index size() const noexcept { return x.rows(); }
  Eigen::Index features() const noexcept { return x.cols(); }
  bool has_labels() const noexcept { return !labels.empty(); }
  /// Number of distinct labels, assuming labels in [0, classes).
  int classes() const;
  /// Throws InvalidArgument on non-finite entries or mismatched label length.
  void validate() const;
};

enum class ModelKind { cond_jc, cond, disc, joint, alt_hard, soft_em };

std::string_view to_string(ModelKind m);
ModelKind model_from_string(std::string_view name);
/// True for the four convex relaxations (which need rounding).
bool is_relaxation(ModelKind m);

struct SolverTolerances {
  double gcg_tol = 1e-6;
  int gcg_max_iter = 1000;
  double admm_tol = 1e-5;
  int admm_max_iter = 1000;
  double admm_mu = 0.0;  // non-positive: automatic_mu
  /// Inner smooth solves (the discriminative offset).
  double inner_tol = 1e-9;
  int inner_max_iter = 500;
  /// Alternating baselines and re-optimisation.
  int max_sweeps = 1000;
  int em_max_iter = 1000;
  double em_tol = 1e-10;
};

struct ModelConfig {
  int d = 2;
  DivergenceFamily family;
  double alpha = 1e-5;
  double beta = 1e-5;
  double gamma = 1e-6;
  std::uint64_t seed = 0;
  int restarts = 10;
  NormGeometry geometry = NormGeometry::m2;
  SolverTolerances tolerances;
  TraceSink trace;

  /// Throws InvalidArgument when d < 2 or a weight is negative.
  void validate() const;
};

/// Converged state of a convex relaxation.
struct RelaxationSolution {
  ModelKind model = ModelKind::cond;
  /// Relaxed normalized equivalence matrix.
  Eigen::MatrixXd m;
  SpectralSet target = SpectralSet::M2;
  /// Natural-parameter block (conditional and joint models).
  Eigen::MatrixXd t;
  /// Discriminative weights and offsets.
  Eigen::MatrixXd v;
  Eigen::VectorXd tau;
  /// Joint model prior scores.
  Eigen::VectorXd u;
  /// Relaxed objective at the returned point.
  double objective = 0;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Jointly convex conditional relaxation: min D_F(X, M X) over M1 (ADMM).
RelaxationSolution solve_cond_jc(const Eigen::MatrixXd& x, const ModelConfig& config);

/// Loss D_F*(T, f(X)) with gradient f^{-1}(T) - X.
double cond_loss(const Eigen::MatrixXd& t, const Eigen::MatrixXd& fx, const Eigen::MatrixXd& x,
                 const DivergenceFamily& family, Eigen::MatrixXd* grad = nullptr);

/// General conditional relaxation: min_T D_F*(T, f(X)) + alpha/2 Omega^2(T).
RelaxationSolution solve_cond(const Eigen::MatrixXd& x, const ModelConfig& config);

struct DiscLoss {
  double value = 0;
  Eigen::MatrixXd grad_v;
  Eigen::VectorXd grad_tau;
};

/// (1/t) sum_i [lse(z_i) - z_ii] with z_i = (1/t) X_i: V' + tau'.
DiscLoss disc_loss(const Eigen::MatrixXd& v, const Eigen::VectorXd& tau, const Eigen::MatrixXd& x);

/// Discriminative relaxation: min_V gamma/2 Omega^2(V) + min_tau disc_loss(V, tau, X).
RelaxationSolution solve_disc(const Eigen::MatrixXd& x, const ModelConfig& config);

struct JointLoss {
  double value = 0;
  Eigen::VectorXd grad_u;
  Eigen::MatrixXd grad_t;
};

/// g(u/t) - (1/t) 1'u + (1/t) D_F*(T, f(X)), g = log-sum-exp.
JointLoss joint_loss(const Eigen::VectorXd& u, const Eigen::MatrixXd& t, const Eigen::MatrixXd& x,
                     const DivergenceFamily& family);

/// Joint generative relaxation over W = [sqrt(beta) u, sqrt(alpha) T] with 1/2 Omega^2(W).
RelaxationSolution solve_joint(const Eigen::MatrixXd& x, const ModelConfig& config);

/// Dispatches to the relaxation named by `model`.
RelaxationSolution solve_relaxation(ModelKind model, const Eigen::MatrixXd& x, const ModelConfig& config);

/// Recomputes the relaxed objective from the stored auxiliaries.
double relaxation_objective(const RelaxationSolution& s, const Eigen::MatrixXd& x, const ModelConfig& config);

}  // namespace bregcvx
