#include "bregcvx/models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "bregcvx/admm.hpp"
#include "bregcvx/error.hpp"
#include "bregcvx/gcg.hpp"
#include "bregcvx/smooth_minimize.hpp"

namespace bregcvx {

int Dataset::classes() const {
  int c = 0;
  for (int l : labels) c = std::max(c, l + 1);
  return c;
}

void Dataset::validate() const {
  if (!x.allFinite()) throw InvalidArgument("dataset '" + name + "' has non-finite entries");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != x.rows())
    throw InvalidArgument("dataset '" + name + "': label count does not match row count");
  for (int l : labels)
    if (l < 0) throw InvalidArgument("dataset '" + name + "': labels must be nonnegative");
}

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::cond_jc: return "cond-jc";
    case ModelKind::cond: return "cond";
    case ModelKind::disc: return "disc";
    case ModelKind::joint: return "joint";
    case ModelKind::alt_hard: return "alt-hard";
    case ModelKind::soft_em: return "soft-em";
  }
  return "unknown";
}

ModelKind model_from_string(std::string_view name) {
  for (ModelKind m : {ModelKind::cond_jc, ModelKind::cond, ModelKind::disc, ModelKind::joint, ModelKind::alt_hard,
                      ModelKind::soft_em})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

bool is_relaxation(ModelKind m) {
  return m == ModelKind::cond_jc || m == ModelKind::cond || m == ModelKind::disc || m == ModelKind::joint;
}

void ModelConfig::validate() const {
  if (d < 2) throw InvalidArgument("cluster count d must be at least 2");
  if (!(alpha >= 0) || !(beta >= 0) || !(gamma >= 0))
    throw InvalidArgument("regularization weights must be nonnegative");
  if (restarts < 1) throw InvalidArgument("restarts must be positive");
}

namespace {

void check_input(const Eigen::MatrixXd& x, const ModelConfig& config) {
  config.validate();
  if (x.rows() < config.d) throw InvalidArgument("need at least d observations");
  if (!x.allFinite()) throw InvalidArgument("observations contain non-finite entries");
}

/// Data with Bernoulli coordinates clamped into the open interval.
Eigen::MatrixXd admitted(const Eigen::MatrixXd& x, const DivergenceFamily& family) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, j) = family.admit(x(i, j), static_cast<long>(i));
  return out;
}

GcgOptions gcg_options(const ModelConfig& config) {
  GcgOptions o;
  o.tol = config.tolerances.gcg_tol;
  o.max_iter = config.tolerances.gcg_max_iter;
  o.trace = config.trace;
  return o;
}

/// Offsets tau minimising disc_loss for fixed scores A = X V' / t.
struct OffsetSolver {
  Eigen::MatrixXd x;
  SmoothOptions options;
  Eigen::VectorXd tau;

  Eigen::VectorXd solve(const Eigen::MatrixXd& v) {
    const Eigen::Index t = x.rows();
    const Eigen::MatrixXd a = x * v.transpose() / static_cast<double>(t);
    SmoothProblem p;
    p.dimension = t;
    p.warm_start = tau;
    p.evaluate = [&a, t](const Eigen::VectorXd& off, Eigen::VectorXd* grad) {
      const double inv_t = 1.0 / static_cast<double>(t);
      double value = 0;
      if (grad) grad->setZero(t);
      Eigen::VectorXd z(t);
      for (Eigen::Index i = 0; i < t; ++i) {
        z = a.row(i).transpose() + off;
        const double lse = log_sum_exp(z);
        value += lse - z[i];
        if (grad) {
          *grad += (z.array() - lse).exp().matrix();
          (*grad)[i] -= 1.0;
        }
      }
      if (grad) *grad *= inv_t;
      return value * inv_t;
    };
    SmoothResult r = smooth_minimize(p, options);
    if (!r.x.allFinite()) throw DivergedError("offset solve produced non-finite values");
    // Offsets are defined up to a common shift; pin the mean for reproducibility.
    tau = r.x.array() - r.x.mean();
    return tau;
  }
};

}  // namespace

RelaxationSolution solve_cond_jc(const Eigen::MatrixXd& x, const ModelConfig& config) {
  check_input(x, config);
  const DivergenceFamily& fam = config.family;
  if (!fam.jointly_convex()) throw InvalidArgument("solve_cond_jc requires a jointly convex divergence");
  const Eigen::MatrixXd xa = admitted(x, fam);

  RelaxationSolution sol;
  sol.model = ModelKind::cond_jc;
  AdmmOptions o;
  o.mu = config.tolerances.admm_mu;
  o.tol = config.tolerances.admm_tol;
  o.max_iter = config.tolerances.admm_max_iter;
  o.trace = [&sol, &config](const TraceRecord& r) {
    sol.objective_trace.push_back(r.objective);
    if (config.trace) config.trace(r);
  };
  AdmmResult r = admm_solve(xa, config.d, fam, o);
  sol.m = std::move(r.state.m);
  sol.target = SpectralSet::M1;
  sol.objective = fam.rowwise_divergence(xa, sol.m * xa);
  sol.iterations = r.iterations;
  sol.converged = r.converged;
  return sol;
}

double cond_loss(const Eigen::MatrixXd& t, const Eigen::MatrixXd& fx, const Eigen::MatrixXd& x,
                 const DivergenceFamily& family, Eigen::MatrixXd* grad) {
  if (grad) *grad = family.inverse_transfer(t) - x;
  return family.conjugate_divergence(t, fx);
}

RelaxationSolution solve_cond(const Eigen::MatrixXd& x, const ModelConfig& config) {
  check_input(x, config);
  if (!(config.alpha > 0)) throw InvalidArgument("solve_cond requires alpha > 0");
  const DivergenceFamily& fam = config.family;
  const Eigen::MatrixXd xa = admitted(x, fam);
  const Eigen::MatrixXd fx = fam.transfer(xa);

  MatrixLoss loss;
  loss.rows = x.rows();
  loss.cols = x.cols();
  loss.evaluate = [&](const Eigen::MatrixXd& t, Eigen::MatrixXd* grad) { return cond_loss(t, fx, xa, fam, grad); };
  const OmegaNorm norm(config.d, config.geometry);
  GcgResult r = gcg_minimize(loss, config.alpha, norm, gcg_options(config));

  RelaxationSolution sol;
  sol.model = ModelKind::cond;
  sol.t = std::move(r.state.t);
  sol.target = norm.target_set();
  sol.m = sol.t.isZero(0) ? Eigen::MatrixXd(Eigen::MatrixXd::Constant(x.rows(), x.rows(), 1.0 / x.rows()))
                          : norm.recover(sol.t);
  sol.objective = relaxation_objective(sol, x, config);
  sol.objective_trace = std::move(r.state.objective_trace);
  sol.iterations = r.state.iteration;
  sol.converged = r.converged;
  return sol;
}

DiscLoss disc_loss(const Eigen::MatrixXd& v, const Eigen::VectorXd& tau, const Eigen::MatrixXd& x) {
  const Eigen::Index t = x.rows();
  if (v.rows() != t || v.cols() != x.cols() || tau.size() != t) throw ShapeError("disc_loss: shape mismatch");
  const double inv_t = 1.0 / static_cast<double>(t);
  Eigen::MatrixXd z = x * v.transpose() * inv_t;
  z.rowwise() += tau.transpose();
  DiscLoss out;
  Eigen::MatrixXd p(t, t);
  double value = 0;
  for (Eigen::Index i = 0; i < t; ++i) {
    const double lse = log_sum_exp(z.row(i).transpose());
    value += lse - z(i, i);
    p.row(i) = (z.row(i).array() - lse).exp();
  }
  out.value = value * inv_t;
  // dLoss/dZ = (P - I) / t.
  p.diagonal().array() -= 1.0;
  out.grad_tau = p.colwise().sum().transpose() * inv_t;
  out.grad_v = p.transpose() * x * (inv_t * inv_t);
  return out;
}

RelaxationSolution solve_disc(const Eigen::MatrixXd& x, const ModelConfig& config) {
  check_input(x, config);
  if (!(config.gamma > 0)) throw InvalidArgument("solve_disc requires gamma > 0");
  const Eigen::Index t = x.rows();

  auto inner = std::make_shared<OffsetSolver>();
  inner->x = x;
  inner->options.tol = config.tolerances.inner_tol;
  inner->options.max_iter = config.tolerances.inner_max_iter;
  inner->tau = Eigen::VectorXd::Zero(t);

  MatrixLoss loss;
  loss.rows = t;
  loss.cols = x.cols();
  loss.evaluate = [&x, inner](const Eigen::MatrixXd& v, Eigen::MatrixXd* grad) {
    const Eigen::VectorXd tau = inner->solve(v);
    DiscLoss l = disc_loss(v, tau, x);
    // Envelope property: tau is optimal, so only the V-gradient survives.
    if (grad) *grad = std::move(l.grad_v);
    return l.value;
  };
  const OmegaNorm norm(config.d, config.geometry);
  GcgResult r = gcg_minimize(loss, config.gamma, norm, gcg_options(config));

  RelaxationSolution sol;
  sol.model = ModelKind::disc;
  sol.v = std::move(r.state.t);
  sol.tau = inner->solve(sol.v);
  sol.target = norm.target_set();
  sol.m = sol.v.isZero(0) ? Eigen::MatrixXd(Eigen::MatrixXd::Constant(t, t, 1.0 / t)) : norm.recover(sol.v);
  sol.objective = relaxation_objective(sol, x, config);
  sol.objective_trace = std::move(r.state.objective_trace);
  sol.iterations = r.state.iteration;
  sol.converged = r.converged;
  return sol;
}

JointLoss joint_loss(const Eigen::VectorXd& u, const Eigen::MatrixXd& t, const Eigen::MatrixXd& x,
                     const DivergenceFamily& family) {
  const Eigen::Index n = x.rows();
  if (u.size() != n || t.rows() != n || t.cols() != x.cols()) throw ShapeError("joint_loss: shape mismatch");
  const double inv_t = 1.0 / static_cast<double>(n);
  const Eigen::MatrixXd xa = admitted(x, family);
  const Eigen::MatrixXd fx = family.transfer(xa);
  const Eigen::VectorXd w = u * inv_t;
  const double g = log_sum_exp(w);
  JointLoss out;
  out.value = g - u.sum() * inv_t + inv_t * family.conjugate_divergence(t, fx);
  out.grad_u = ((w.array() - g).exp() - 1.0).matrix() * inv_t;
  out.grad_t = (family.inverse_transfer(t) - xa) * inv_t;
  return out;
}

RelaxationSolution solve_joint(const Eigen::MatrixXd& x, const ModelConfig& config) {
  check_input(x, config);
  if (!(config.alpha > 0) || !(config.beta > 0)) throw InvalidArgument("solve_joint requires alpha, beta > 0");
  const DivergenceFamily& fam = config.family;
  const Eigen::MatrixXd xa = admitted(x, fam);
  const Eigen::Index t = x.rows();
  const Eigen::Index n = x.cols();
  const double su = std::sqrt(config.beta);
  const double st = std::sqrt(config.alpha);

  MatrixLoss loss;
  loss.rows = t;
  loss.cols = n + 1;
  loss.evaluate = [&](const Eigen::MatrixXd& w, Eigen::MatrixXd* grad) {
    JointLoss l = joint_loss(w.col(0) / su, w.rightCols(n) / st, xa, fam);
    if (grad) {
      grad->resize(t, n + 1);
      grad->col(0) = l.grad_u / su;
      grad->rightCols(n) = l.grad_t / st;
    }
    return l.value;
  };
  const OmegaNorm norm(config.d, config.geometry);
  GcgResult r = gcg_minimize(loss, 1.0, norm, gcg_options(config));

  RelaxationSolution sol;
  sol.model = ModelKind::joint;
  const Eigen::MatrixXd& w = r.state.t;
  sol.u = w.col(0) / su;
  sol.t = w.rightCols(n) / st;
  sol.target = norm.target_set();
  sol.m = w.isZero(0) ? Eigen::MatrixXd(Eigen::MatrixXd::Constant(t, t, 1.0 / t)) : norm.recover(w);
  sol.objective = relaxation_objective(sol, x, config);
  sol.objective_trace = std::move(r.state.objective_trace);
  sol.iterations = r.state.iteration;
  sol.converged = r.converged;
  return sol;
}

RelaxationSolution solve_relaxation(ModelKind model, const Eigen::MatrixXd& x, const ModelConfig& config) {
  switch (model) {
    case ModelKind::cond_jc: return solve_cond_jc(x, config);
    case ModelKind::cond: return solve_cond(x, config);
    case ModelKind::disc: return solve_disc(x, config);
    case ModelKind::joint: return solve_joint(x, config);
    default: break;
  }
  throw InvalidArgument("model '" + std::string(to_string(model)) + "' is not a convex relaxation");
}

double relaxation_objective(const RelaxationSolution& s, const Eigen::MatrixXd& x, const ModelConfig& config) {
  const DivergenceFamily& fam = config.family;
  const OmegaNorm norm(config.d, config.geometry);
  switch (s.model) {
    case ModelKind::cond_jc: {
      const Eigen::MatrixXd xa = admitted(x, fam);
      return fam.rowwise_divergence(xa, s.m * xa);
    }
    case ModelKind::cond: {
      const Eigen::MatrixXd xa = admitted(x, fam);
      return cond_loss(s.t, fam.transfer(xa), xa, fam) + 0.5 * config.alpha * norm.squared(s.t);
    }
    case ModelKind::disc:
      return disc_loss(s.v, s.tau, x).value + 0.5 * config.gamma * norm.squared(s.v);
    case ModelKind::joint: {
      Eigen::MatrixXd w(x.rows(), x.cols() + 1);
      w.col(0) = std::sqrt(config.beta) * s.u;
      w.rightCols(x.cols()) = std::sqrt(config.alpha) * s.t;
      return joint_loss(s.u, s.t, x, fam).value + 0.5 * norm.squared(w);
    }
    default: break;
  }
  throw InvalidArgument("relaxation_objective: not a relaxation");
}

}  // namespace bregcvx
