#include "bregcvx/smooth_minimize.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "bregcvx/error.hpp"

namespace bregcvx {

namespace {
constexpr double kRoundoff = 8 * std::numeric_limits<double>::epsilon();
}  // namespace

SmoothResult smooth_minimize(const SmoothProblem& problem, const SmoothOptions& options) {
  if (!problem.evaluate) throw InvalidArgument("smooth_minimize: missing objective");
  const Eigen::Index n = problem.dimension;
  SmoothResult res;
  res.x = problem.warm_start ? *problem.warm_start : Eigen::VectorXd::Zero(n);
  if (res.x.size() != n) throw ShapeError("smooth_minimize: warm start has wrong dimension");

  Eigen::VectorXd g(n);
  double f = problem.evaluate(res.x, &g);
  if (!std::isfinite(f) || !g.allFinite()) throw DivergedError("smooth_minimize: non-finite start");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd x_new(n), g_new(n);
  bool reset_pending = false;

  for (int it = 0;; ++it) {
    res.iterations = it;
    res.grad_norm = g.norm();
    if (res.grad_norm < options.tol * (1.0 + std::abs(f))) {
      res.converged = true;
      break;
    }
    if (it >= options.max_iter) break;

    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t j = s_hist.size(); j-- > 0;) {
      alpha[j] = rho_hist[j] * s_hist[j].dot(q);
      q -= alpha[j] * y_hist[j];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    } else {
      q /= std::max(1.0, g.lpNorm<Eigen::Infinity>());
    }
    for (std::size_t j = 0; j < s_hist.size(); ++j) {
      const double beta = rho_hist[j] * y_hist[j].dot(q);
      q += (alpha[j] - beta) * s_hist[j];
    }
    Eigen::VectorXd dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0)) {
      dir = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = res.x + step * dir;
      f_new = problem.evaluate(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // Near the minimiser decreases fall below the rounding error of f;
      // accept a step that keeps f within that error and shrinks the gradient.
      if (std::isfinite(f_new) && f_new <= f + kRoundoff * (1.0 + std::abs(f)) && g_new.allFinite() &&
          g_new.norm() < g.norm()) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (reset_pending || s_hist.empty()) break;  // stalled at working precision
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      reset_pending = true;
      continue;
    }
    reset_pending = false;
    if (!g_new.allFinite()) throw DivergedError("smooth_minimize: non-finite gradient");

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    res.x = x_new;
    f = f_new;
    g = g_new;
  }
  res.value = f;
  res.grad_norm = g.norm();
  return res;
}

}  // namespace bregcvx
