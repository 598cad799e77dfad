#include "bregcvx/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bregcvx/error.hpp"
#include "bregcvx/spectral_geometry.hpp"

namespace bregcvx {

namespace {

Eigen::MatrixXd project_rows(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.row(i) = simplex_project(m.row(i).transpose()).transpose();
  return out;
}

}  // namespace

double automatic_mu(const Eigen::MatrixXd& x, const DivergenceFamily& family) {
  // Twice the inverse of a curvature bound of the row loss: the loss Hessian is
  // X' diag(h) X with h >= 1 (Euclidean) or h >= 4 (Bernoulli). The factor 2 keeps
  // the primal and dual residuals of the same order at termination.
  const double curvature = family.id() == FamilyId::bernoulli ? 4.0 : 1.0;
  const Eigen::MatrixXd gram = x.transpose() * x;
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return top > 0 ? 2.0 / (curvature * top) : 1.0;
}

Eigen::MatrixXd admm_row_steps(const RowLoss& loss, const Eigen::MatrixXd& anchor, double mu,
                               const Eigen::MatrixXd& start, const RowStepOptions& options) {
  if (!(mu > 0)) throw InvalidArgument("admm_row_steps: mu must be positive");
  const Eigen::Index rows = anchor.rows();
  const double inv_mu = 1.0 / mu;

  auto evaluate = [&](const Eigen::MatrixXd& m, Eigen::VectorXd& values, Eigen::MatrixXd* grad) {
    loss.evaluate(m, values, grad);
    const Eigen::MatrixXd diff = m - anchor;
    values += 0.5 * inv_mu * diff.rowwise().squaredNorm();
    if (grad) *grad += inv_mu * diff;
  };

  Eigen::MatrixXd m = start;
  Eigen::VectorXd f(rows), f_trial(rows);
  Eigen::MatrixXd g(rows, m.cols()), g_new(rows, m.cols());
  evaluate(m, f, &g);
  Eigen::VectorXd step = Eigen::VectorXd::Constant(rows, mu);
  std::vector<char> active(static_cast<std::size_t>(rows), 1);
  // Rows whose line search can no longer certify a decrease (rounding floor).
  std::vector<char> stalled(static_cast<std::size_t>(rows), 0);

  for (int it = 0; it < options.max_iter; ++it) {
    // Convergence: unit-step projected gradient.
    const Eigen::MatrixXd unit = project_rows(m - g) - m;
    long remaining = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      active[static_cast<std::size_t>(i)] =
          !stalled[static_cast<std::size_t>(i)] && unit.row(i).lpNorm<Eigen::Infinity>() >= options.tol;
      remaining += active[static_cast<std::size_t>(i)];
    }
    if (remaining == 0) break;

    Eigen::MatrixXd scaled = m;
    for (Eigen::Index i = 0; i < rows; ++i) scaled.row(i) -= step[i] * g.row(i);
    const Eigen::MatrixXd dir = project_rows(scaled) - m;
    const Eigen::VectorXd slope = (dir.array() * g.array()).rowwise().sum();

    Eigen::VectorXd theta = Eigen::VectorXd::Ones(rows);
    std::vector<char> done(static_cast<std::size_t>(rows), 0);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (!active[static_cast<std::size_t>(i)] || !(slope[i] < 0)) {
        done[static_cast<std::size_t>(i)] = 1;
        theta[i] = 0;
      }
    Eigen::MatrixXd trial = m;
    for (int bt = 0; bt < 40; ++bt) {
      for (Eigen::Index i = 0; i < rows; ++i) trial.row(i) = m.row(i) + theta[i] * dir.row(i);
      evaluate(trial, f_trial, nullptr);
      bool all = true;
      for (Eigen::Index i = 0; i < rows; ++i) {
        auto& di = done[static_cast<std::size_t>(i)];
        if (di) continue;
        // The slack admits steps whose decrease is below rounding of f.
        const double slack = 1e-14 * (1.0 + std::abs(f[i]));
        if (std::isfinite(f_trial[i]) && f_trial[i] <= f[i] + 1e-4 * theta[i] * slope[i] + slack) {
          di = 1;
        } else {
          theta[i] *= 0.5;
          all = false;
        }
      }
      if (all) break;
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (!done[static_cast<std::size_t>(i)]) theta[i] = 0;
      if (active[static_cast<std::size_t>(i)] && theta[i] == 0) stalled[static_cast<std::size_t>(i)] = 1;
    }
    for (Eigen::Index i = 0; i < rows; ++i) trial.row(i) = m.row(i) + theta[i] * dir.row(i);

    evaluate(trial, f_trial, &g_new);
    // Barzilai-Borwein step per row.
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Eigen::RowVectorXd s = trial.row(i) - m.row(i);
      const Eigen::RowVectorXd y = g_new.row(i) - g.row(i);
      const double sy = s.dot(y);
      const double ss = s.squaredNorm();
      if (ss > 0 && sy > 0) step[i] = std::clamp(ss / sy, 1e-12, 1e12);
    }
    m = trial;
    f = f_trial;
    g = g_new;
  }
  return m;
}

Eigen::VectorXd admm_row_step(const RowLoss& loss, const Eigen::VectorXd& anchor, double mu,
                              const RowStepOptions& options) {
  const Eigen::MatrixXd v = anchor.transpose();
  const Eigen::MatrixXd start = simplex_project(anchor).transpose();
  return admm_row_steps(loss, v, mu, start, options).row(0).transpose();
}

RowLoss reconstruction_row_loss(const Eigen::MatrixXd& x, const DivergenceFamily& family) {
  RowLoss loss;
  loss.evaluate = [x, family](const Eigen::MatrixXd& m, Eigen::VectorXd& values, Eigen::MatrixXd* grad) {
    const Eigen::MatrixXd y = m * x;
    values.resize(m.rows());
    if (family.id() == FamilyId::euclidean) {
      const Eigen::MatrixXd r = y - x;
      values = 0.5 * r.rowwise().squaredNorm();
      if (grad) *grad = r * x.transpose();
      return;
    }
    Eigen::MatrixXd dy(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      double total = 0;
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        const double a = family.admit(x(i, j), i * x.cols() + j);
        double b = y(i, j);
        if (!(b > 0 && b < 1)) {
          // Convex combinations of in-domain rows stay inside; only rounding lands here.
          b = family.admit(b, i * y.cols() + j);
        }
        total += a * std::log(a / b) + (1 - a) * std::log((1 - a) / (1 - b));
        dy(i, j) = (b - a) / (b * (1 - b));
      }
      values[i] = total;
    }
    if (grad) *grad = dy * x.transpose();
  };
  return loss;
}

AdmmResult admm_solve(const Eigen::MatrixXd& x, int d, const DivergenceFamily& family,
                      const AdmmOptions& options) {
  const Eigen::Index t = x.rows();
  if (d < 1 || t < d) throw InvalidArgument("admm_solve: need 1 <= d <= t");
  if (!family.jointly_convex()) throw InvalidArgument("admm_solve: family must be jointly convex");
  family.check_domain(x);

  const RowLoss loss = reconstruction_row_loss(x, family);
  AdmmResult res;
  AdmmState& st = res.state;
  st.mu = options.mu > 0 ? options.mu : automatic_mu(x, family);
  st.z = Eigen::MatrixXd::Constant(t, t, 1.0 / static_cast<double>(t));
  st.m = st.z;
  st.lambda = Eigen::MatrixXd::Zero(t, t);
  const double threshold = options.tol * std::sqrt(static_cast<double>(t));

  Eigen::VectorXd values(t);
  // One ADMM sweep from (z_in, lambda_in); fills st.m and returns the next (Z, Lambda). The dual
  // residual is measured against z_ref, the previous unextrapolated iterate.
  auto sweep = [&](const Eigen::MatrixXd& z_in, const Eigen::MatrixXd& lambda_in, const Eigen::MatrixXd& z_ref,
                   Eigen::MatrixXd& z_out, Eigen::MatrixXd& lambda_out) {
    st.m = admm_row_steps(loss, z_in + st.mu * lambda_in, st.mu, st.m, options.row);
    const Eigen::MatrixXd m_hat = options.relaxation * st.m + (1.0 - options.relaxation) * z_in;
    z_out = project_m2(m_hat - st.mu * lambda_in, d);
    lambda_out = lambda_in + (z_out - m_hat) / st.mu;
    res.primal = (st.m - z_out).norm();
    res.dual = (z_out - z_ref).norm() / st.mu;
    ++res.iterations;
    st.primal_history.push_back(res.primal);
    st.dual_history.push_back(res.dual);
    if (!st.m.allFinite() || !lambda_out.allFinite())
      throw DivergedError("admm_solve: non-finite iterate at iteration " + std::to_string(res.iterations));
    if (options.trace) {
      loss.evaluate(st.m, values, nullptr);
      options.trace({"admm", res.iterations, values.sum(), std::max(res.primal, res.dual)});
    }
  };
  // Residual balancing; returns true when the penalty changed.
  auto balance = [&]() {
    if (!options.adapt_mu || res.iterations > options.adapt_iterations) return false;
    const double before = st.mu;
    if (res.primal > 10 * res.dual) st.mu *= 0.5;
    else if (res.dual > 10 * res.primal) st.mu *= 2.0;
    return st.mu != before;
  };

  if (options.anderson_memory > 0) {
    // Type-II Anderson mixing of the fixed-point map (Z, Lambda) -> sweep(Z, Lambda), in the
    // mu-weighted metric; a mixed point is kept only if it does not increase the residual.
    const Eigen::Index n = t * t;
    auto pack = [&](const Eigen::MatrixXd& z, const Eigen::MatrixXd& l) {
      Eigen::VectorXd u(2 * n);
      u.head(n) = Eigen::Map<const Eigen::VectorXd>(z.data(), n) / std::sqrt(st.mu);
      u.tail(n) = Eigen::Map<const Eigen::VectorXd>(l.data(), n) * std::sqrt(st.mu);
      return u;
    };
    auto unpack = [&](const Eigen::VectorXd& u, Eigen::MatrixXd& z, Eigen::MatrixXd& l) {
      z = Eigen::Map<const Eigen::MatrixXd>(u.data(), t, t) * std::sqrt(st.mu);
      l = Eigen::Map<const Eigen::MatrixXd>(u.data() + n, t, t) / std::sqrt(st.mu);
    };
    const int memory = options.anderson_memory;
    std::vector<Eigen::VectorXd> hist_g, hist_f;  // residuals g = T(u) - u and images T(u)
    Eigen::MatrixXd z_in = st.z, lambda_in = st.lambda, z_out, lambda_out;
    Eigen::VectorXd safe_image;  // T of the last accepted point
    double safe_norm = std::numeric_limits<double>::infinity();
    bool mixed = false;
    while (res.iterations < options.max_iter) {
      sweep(z_in, lambda_in, z_in, z_out, lambda_out);
      st.z = z_out;
      st.lambda = lambda_out;
      if (std::max(res.primal, res.dual) < threshold) {
        res.converged = true;
        break;
      }
      const Eigen::VectorXd image = pack(z_out, lambda_out);
      const Eigen::VectorXd g = image - pack(z_in, lambda_in);
      const double g_norm = g.norm();
      if (mixed && g_norm > safe_norm) {
        // Reject the mixed point: fall back to the plain image of the last accepted point.
        hist_g.clear();
        hist_f.clear();
        mixed = false;
        unpack(safe_image, z_in, lambda_in);
        continue;
      }
      safe_norm = g_norm;
      safe_image = image;
      if (balance()) {
        hist_g.clear();
        hist_f.clear();
        mixed = false;
        z_in = z_out;
        lambda_in = lambda_out;
        continue;
      }
      hist_g.push_back(g);
      hist_f.push_back(image);
      if (static_cast<int>(hist_g.size()) > memory + 1) {
        hist_g.erase(hist_g.begin());
        hist_f.erase(hist_f.begin());
      }
      const Eigen::Index k = static_cast<Eigen::Index>(hist_g.size()) - 1;
      if (k == 0) {
        mixed = false;
        z_in = z_out;
        lambda_in = lambda_out;
        continue;
      }
      Eigen::MatrixXd dg(2 * n, k), df(2 * n, k);
      for (Eigen::Index j = 0; j < k; ++j) {
        dg.col(j) = hist_g[static_cast<std::size_t>(j + 1)] - hist_g[static_cast<std::size_t>(j)];
        df.col(j) = hist_f[static_cast<std::size_t>(j + 1)] - hist_f[static_cast<std::size_t>(j)];
      }
      Eigen::MatrixXd gram = dg.transpose() * dg;
      gram.diagonal().array() += 1e-10 * gram.diagonal().maxCoeff() + std::numeric_limits<double>::min();
      const Eigen::VectorXd gamma = gram.ldlt().solve(dg.transpose() * g);
      const Eigen::VectorXd u_next = image - df * gamma;
      if (!u_next.allFinite()) {
        hist_g.clear();
        hist_f.clear();
        mixed = false;
        z_in = z_out;
        lambda_in = lambda_out;
        continue;
      }
      unpack(u_next, z_in, lambda_in);
      mixed = true;
    }
  } else {
    // Restarted Nesterov extrapolation of (Z, Lambda); hats feed the next sweep.
    Eigen::MatrixXd z_hat = st.z;
    Eigen::MatrixXd lambda_hat = st.lambda;
    double momentum = 1.0;
    double combined_prev = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd z_next, lambda_next;
    while (res.iterations < options.max_iter) {
      sweep(z_hat, lambda_hat, st.z, z_next, lambda_next);

      bool restart = true;
      if (options.accelerate) {
        const double combined =
            st.mu * (lambda_next - lambda_hat).squaredNorm() + (z_next - z_hat).squaredNorm() / st.mu;
        if (combined < 0.999 * combined_prev) {
          const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
          const double w = (momentum - 1.0) / next_momentum;
          z_hat = z_next + w * (z_next - st.z);
          lambda_hat = lambda_next + w * (lambda_next - st.lambda);
          momentum = next_momentum;
          combined_prev = combined;
          restart = false;
        }
      }
      st.z = z_next;
      st.lambda = lambda_next;
      if (restart) {
        z_hat = st.z;
        lambda_hat = st.lambda;
        momentum = 1.0;
        combined_prev = std::numeric_limits<double>::infinity();
      }

      if (std::max(res.primal, res.dual) < threshold) {
        res.converged = true;
        break;
      }
      if (balance()) {
        z_hat = st.z;
        lambda_hat = st.lambda;
        momentum = 1.0;
        combined_prev = std::numeric_limits<double>::infinity();
      }
    }
  }
  loss.evaluate(st.m, values, nullptr);
  res.objective = values.sum();
  if (!std::isfinite(res.objective)) {
    Eigen::Index bad = 0;
    for (Eigen::Index i = 0; i < t; ++i)
      if (!std::isfinite(values[i])) bad = i;
    throw DivergedError("admm_solve: non-finite objective at row " + std::to_string(bad));
  }
  return res;
}

}  // namespace bregcvx
