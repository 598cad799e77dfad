#include "bregcvx/gcg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bregcvx/error.hpp"

namespace bregcvx {

namespace {

struct Phi {
  const MatrixLoss& loss;
  const Eigen::MatrixXd& t;
  const Eigen::MatrixXd& atom;
  double bound;
  double alpha;

  double value(double a, double b) const {
    const double r = a * bound + b;
    return loss.evaluate(a * t + b * atom, nullptr) + 0.5 * alpha * r * r;
  }

  // Value and gradient in (a, b).
  double value(double a, double b, Eigen::Vector2d& grad) const {
    Eigen::MatrixXd g(t.rows(), t.cols());
    const double r = a * bound + b;
    const double v = loss.evaluate(a * t + b * atom, &g) + 0.5 * alpha * r * r;
    grad[0] = (g.array() * t.array()).sum() + alpha * bound * r;
    grad[1] = (g.array() * atom.array()).sum() + alpha * r;
    return v;
  }
};

}  // namespace

LineSearchResult gcg_line_search(const MatrixLoss& loss, const Eigen::MatrixXd& t,
                                 const Eigen::MatrixXd& atom, double bound, double alpha) {
  const Phi phi{loss, t, atom, bound, alpha};
  // Coordinates with a zero direction are pinned at 0; they cannot lower phi.
  const bool a_free = t.squaredNorm() > 0 || bound > 0;
  const bool b_free = atom.squaredNorm() > 0;

  LineSearchResult best{1.0, 0.0, phi.value(1.0, 0.0)};
  auto consider = [&](double a, double b, double v) {
    if (std::isfinite(v) && v < best.value) best = {a, b, v};
  };
  if (b_free) consider(0.0, 1.0, phi.value(0.0, 1.0));
  if (!a_free) best.a = 0.0;

  // Projected Newton on the quadrant; curvature from finite differences of the gradient.
  Eigen::Vector2d x(best.a, best.b);
  Eigen::Vector2d g;
  double fx = phi.value(x[0], x[1], g);
  for (int it = 0; it < 40; ++it) {
    std::array<bool, 2> fixed{!a_free || (x[0] <= 0 && g[0] > 0), !b_free || (x[1] <= 0 && g[1] > 0)};
    Eigen::Vector2d free_grad = g;
    for (int c = 0; c < 2; ++c)
      if (fixed[static_cast<std::size_t>(c)]) free_grad[c] = 0;
    const double scale = std::max({1.0, std::abs(fx)});
    if (free_grad.norm() <= 1e-12 * scale) break;

    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (int c = 0; c < 2; ++c) {
      if (fixed[static_cast<std::size_t>(c)]) continue;
      const double step = 1e-6 * std::max(1.0, std::abs(x[c]));
      Eigen::Vector2d xp = x;
      xp[c] += step;
      Eigen::Vector2d gp;
      phi.value(xp[0], xp[1], gp);
      h.col(c) = (gp - g) / step;
    }
    h = 0.5 * (h + h.transpose()).eval();
    for (int c = 0; c < 2; ++c) {
      if (fixed[static_cast<std::size_t>(c)]) {
        h.row(c).setZero();
        h.col(c).setZero();
        h(c, c) = 1.0;
      }
    }
    Eigen::Vector2d dir;
    const double damp_base = 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff());
    double damp = 0;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::LLT<Eigen::Matrix2d> llt(h + damp * Eigen::Matrix2d::Identity());
      if (llt.info() == Eigen::Success) {
        dir = -llt.solve(free_grad);
        break;
      }
      damp = damp == 0 ? damp_base : damp * 10;
      dir = -free_grad / std::max(1.0, h.cwiseAbs().maxCoeff());
    }

    // Backtrack along the projected path.
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 50; ++bt) {
      Eigen::Vector2d trial = (x + step * dir).cwiseMax(0.0);
      if (!a_free) trial[0] = 0;
      if (!b_free) trial[1] = 0;
      const double ft = phi.value(trial[0], trial[1]);
      if (std::isfinite(ft) && ft <= fx + 1e-4 * g.dot(trial - x)) {
        moved = (trial - x).norm() > 1e-15 * std::max(1.0, x.norm());
        x = trial;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    fx = phi.value(x[0], x[1], g);
  }
  consider(x[0], x[1], fx);
  return best;
}

GcgResult gcg_minimize(const MatrixLoss& loss, double alpha, const OmegaNorm& norm,
                       const GcgOptions& options) {
  if (!(alpha > 0)) throw InvalidArgument("gcg_minimize: alpha must be positive");
  if (!loss.evaluate) throw InvalidArgument("gcg_minimize: missing loss");

  GcgResult res;
  GcgState& st = res.state;
  st.t = Eigen::MatrixXd::Zero(loss.rows, loss.cols);
  st.bound = 0;

  Eigen::MatrixXd grad(loss.rows, loss.cols);
  double l = loss.evaluate(st.t, &grad);
  double objective = l;
  st.iteration = 0;
  if (!std::isfinite(l) || !grad.allFinite()) throw DivergedError("gcg_minimize: non-finite loss at T = 0");

  for (;;) {
    st.objective_trace.push_back(objective);
    const double dual = norm.dual(grad);
    const double scale = std::max(1.0, std::abs(objective));
    // Majorised objective minus the linearised minimum; bounds the suboptimality.
    const double inner = (grad.array() * st.t.array()).sum();
    res.gap = inner + dual * dual / alpha + alpha * st.bound * st.bound - st.bound * dual;
    if (options.trace) options.trace({"gcg", st.iteration, objective, res.gap});
    if (!(dual > 0)) {
      res.gap = 0;
      res.converged = true;
      break;
    }
    if (res.gap < options.tol * scale) {
      res.converged = true;
      break;
    }
    if (st.iteration >= options.max_iter) break;

    // Unit atom: minus the dual-norm subgradient. The exact minimiser of
    // <G,S> + alpha/2 Omega^2(S) is dual/alpha times this.
    const Eigen::MatrixXd atom = -norm.dual_subgradient(grad);
    const LineSearchResult ls = gcg_line_search(loss, st.t, atom, st.bound, alpha);
    ++st.iteration;
    if (!(ls.value < objective)) {
      // No descent at working precision.
      res.converged = res.gap < std::sqrt(options.tol) * scale;
      break;
    }
    st.t = ls.a * st.t + ls.b * atom;
    st.bound = ls.a * st.bound + ls.b;

    l = loss.evaluate(st.t, &grad);
    if (!std::isfinite(l) || !grad.allFinite())
      throw DivergedError("gcg_minimize: non-finite loss at iteration " + std::to_string(st.iteration));
    const double next = l + 0.5 * alpha * st.bound * st.bound;
    const double decrease = objective - next;
    objective = next;
    if (decrease < options.stall_tol * scale) {
      st.objective_trace.push_back(objective);
      res.converged = true;
      break;
    }
  }

  res.loss = l;
  res.objective = l + 0.5 * alpha * norm.squared(st.t);
  return res;
}

}  // namespace bregcvx
