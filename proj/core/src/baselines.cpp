#include "bregcvx/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bregcvx/error.hpp"
#include "bregcvx/metrics.hpp"
#include "bregcvx/random.hpp"
#include "bregcvx/rounding.hpp"

namespace bregcvx {

namespace {

constexpr std::uint64_t kAltStream = 0x616c742d68617264ULL;
constexpr std::uint64_t kEmStream = 0x736f66742d656dULL;

Eigen::MatrixXd admitted(const Eigen::MatrixXd& x, const DivergenceFamily& family) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, j) = family.admit(x(i, j), static_cast<long>(i));
  return out;
}

Assignment random_assignment(Eigen::Index t, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> labels(static_cast<std::size_t>(t));
  for (auto& l : labels) l = static_cast<int>(rng.index(static_cast<std::uint64_t>(d)));
  return Assignment(std::move(labels), d);
}

/// Divergence of every point to every centre, t x d.
Eigen::MatrixXd divergence_table(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                                 const DivergenceFamily& family) {
  Eigen::MatrixXd out(x.rows(), centers.rows());
  for (Eigen::Index j = 0; j < centers.rows(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      out(i, j) = family.divergence(x.row(i).transpose(), centers.row(j).transpose());
  return out;
}

}  // namespace

ClusteringResult alternating_hard(const Eigen::MatrixXd& x, const ModelConfig& config,
                                  const std::vector<int>& labels) {
  config.validate();
  if (x.rows() < config.d) throw InvalidArgument("alternating_hard: need at least d observations");
  const Eigen::MatrixXd xa = admitted(x, config.family);
  ClusteringResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<double> objectives;
  std::vector<double> accuracies;
  for (int r = 0; r < config.restarts; ++r) {
    const Assignment y0 =
        random_assignment(x.rows(), config.d, derive_seed(config.seed, kAltStream, static_cast<std::uint64_t>(r)));
    ClusteringResult run = hard_reopt(xa, y0, config.family, config.tolerances.max_sweeps);
    objectives.push_back(run.objective);
    if (!labels.empty()) {
      AccuracyResult acc = matched_accuracy(run.y, labels);
      accuracies.push_back(acc.value);
      run.accuracy = acc.value;
      run.matching = std::move(acc.matching);
    }
    if (run.objective < best.objective) best = std::move(run);
  }
  best.objective_summary = RestartSummary::of(std::move(objectives));
  best.accuracy_summary = RestartSummary::of(std::move(accuracies));
  return best;
}

SoftEmResult soft_em(const Eigen::MatrixXd& x, const ModelConfig& config, const std::vector<int>& labels) {
  if (config.d < 1) throw InvalidArgument("soft_em: need d >= 1");
  if (x.rows() < config.d) throw InvalidArgument("soft_em: need at least d observations");
  const Eigen::MatrixXd xa = admitted(x, config.family);
  const Eigen::Index t = x.rows();
  const int d = config.d;
  const int restarts = std::max(1, config.restarts);

  SoftEmResult best;
  best.loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> lls, soft_accs, hard_accs;
  for (int r = 0; r < restarts; ++r) {
    SoftEmResult run;
    // Start from the M-step of a random hard assignment.
    const Assignment y0 =
        random_assignment(t, d, derive_seed(config.seed, kEmStream, static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd post = y0.indicator();
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(d, x.cols());
    Eigen::VectorXd q = Eigen::VectorXd::Constant(d, 1.0 / d);
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < config.tolerances.em_max_iter; ++it) {
      // M-step.
      const Eigen::VectorXd mass = post.colwise().sum().transpose();
      for (int j = 0; j < d; ++j) {
        if (mass[j] > 1e-300) {
          centers.row(j) = post.col(j).transpose() * xa / mass[j];
          q[j] = mass[j] / static_cast<double>(t);
        } else {
          q[j] = 0;  // Dead component: keep the previous centre, zero weight.
        }
      }
      // E-step in log space.
      const Eigen::MatrixXd div = divergence_table(xa, centers, config.family);
      double ll = 0;
      for (Eigen::Index i = 0; i < t; ++i) {
        Eigen::VectorXd lp(d);
        for (int j = 0; j < d; ++j)
          lp[j] = q[j] > 0 ? std::log(q[j]) - div(i, j) : -std::numeric_limits<double>::infinity();
        const double lse = log_sum_exp(lp);
        ll += lse;
        post.row(i) = (lp.array() - lse).exp().transpose();
      }
      run.loglik_trace.push_back(ll);
      run.iterations = it + 1;
      if (ll - prev <= config.tolerances.em_tol * std::max(1.0, std::abs(ll))) {
        prev = ll;
        break;
      }
      prev = ll;
    }
    run.posteriors = std::move(post);
    run.q = q;
    run.centers = centers;
    run.loglik = prev;
    lls.push_back(prev);
    if (!labels.empty()) {
      soft_accs.push_back(soft_accuracy(run.posteriors, labels).value);
      hard_accs.push_back(hard_posterior_accuracy(run.q, run.centers, xa, labels, config.family).value);
    }
    if (run.loglik > best.loglik) best = std::move(run);
  }
  best.loglik_summary = RestartSummary::of(std::move(lls));
  best.soft_accuracy_summary = RestartSummary::of(std::move(soft_accs));
  best.hard_accuracy_summary = RestartSummary::of(std::move(hard_accs));
  return best;
}

double joint_hard_objective(const Eigen::MatrixXd& x, const Assignment& y, const DivergenceFamily& family) {
  const double t = static_cast<double>(x.rows());
  double prior = 0;
  for (int n : y.counts())
    if (n > 0) prior -= n * std::log(n / t);
  return prior + cond_objective(x, y, family);
}

ClusteringResult joint_hard_reopt(const Eigen::MatrixXd& x, const Assignment& y0, const ModelConfig& config) {
  if (y0.size() != x.rows()) throw ShapeError("joint_hard_reopt: assignment length mismatch");
  const DivergenceFamily& fam = config.family;
  const Eigen::MatrixXd xa = admitted(x, fam);
  const Eigen::Index t = x.rows();
  const int k = y0.clusters;

  ClusteringResult res;
  std::vector<int> labels = y0.labels;
  double obj = joint_hard_objective(xa, y0, fam);
  res.objective_trace.push_back(obj);

  auto try_reseed = [&] {
    // Fill an empty cluster with the worst-fit point when that does not raise the objective.
    Assignment cur(labels, k);
    std::vector<int> counts = cur.counts();
    const Eigen::MatrixXd centers = cluster_means(xa, cur);
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Eigen::Index far = -1;
      double fd = -1;
      for (Eigen::Index i = 0; i < t; ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(c)] < 2) continue;
        const double di = fam.divergence(xa.row(i).transpose(), centers.row(c).transpose());
        if (di > fd) {
          fd = di;
          far = i;
        }
      }
      if (far < 0) continue;
      std::vector<int> trial = labels;
      trial[static_cast<std::size_t>(far)] = j;
      const double o = joint_hard_objective(xa, Assignment(trial, k), fam);
      if (o <= obj) {
        labels = std::move(trial);
        obj = o;
        counts = Assignment(labels, k).counts();
      }
    }
  };

  try_reseed();
  for (int sweep = 0; sweep < config.tolerances.max_sweeps; ++sweep) {
    const Assignment cur(labels, k);
    const std::vector<int> counts = cur.counts();
    const Eigen::MatrixXd centers = cluster_means(xa, cur);
    Eigen::VectorXd w(k);
    for (int j = 0; j < k; ++j)
      w[j] = counts[static_cast<std::size_t>(j)] > 0
                 ? std::log(counts[static_cast<std::size_t>(j)] / static_cast<double>(t))
                 : -std::numeric_limits<double>::infinity();
    bool changed = false;
    for (Eigen::Index i = 0; i < t; ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      double best = w[c] - fam.divergence(xa.row(i).transpose(), centers.row(c).transpose());
      int arg = c;
      for (int j = 0; j < k; ++j) {
        if (j == c || counts[static_cast<std::size_t>(j)] == 0) continue;
        const double s = w[j] - fam.divergence(xa.row(i).transpose(), centers.row(j).transpose());
        if (s > best) {
          best = s;
          arg = j;
        }
      }
      if (arg != c) {
        labels[static_cast<std::size_t>(i)] = arg;
        changed = true;
      }
    }
    if (!changed) break;
    obj = joint_hard_objective(xa, Assignment(labels, k), fam);
    try_reseed();
    res.objective_trace.push_back(obj);
  }
  res.y = Assignment(labels, k);
  res.centers = cluster_means(xa, res.y);
  res.objective = obj;
  res.log_prior.resize(k);
  const std::vector<int> counts = res.y.counts();
  for (int j = 0; j < k; ++j)
    res.log_prior[j] = counts[static_cast<std::size_t>(j)] > 0
                           ? std::log(counts[static_cast<std::size_t>(j)] / static_cast<double>(t))
                           : -std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace bregcvx
