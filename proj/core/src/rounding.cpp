#include "bregcvx/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bregcvx/error.hpp"
#include "bregcvx/random.hpp"

namespace bregcvx {

RestartSummary RestartSummary::of(std::vector<double> v) {
  RestartSummary s;
  s.values = std::move(v);
  if (s.values.empty()) return s;
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  if (*lo == *hi) {
    // Identical values: report them exactly rather than with summation noise.
    s.mean = *lo;
    return s;
  }
  const double n = static_cast<double>(s.values.size());
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  if (s.values.size() > 1) {
    double ss = 0;
    for (double x : s.values) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (n - 1));
  }
  return s;
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double objective = 0;
  std::vector<double> trace;
};

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

LloydRun lloyd(const Eigen::MatrixXd& p, int k, std::uint64_t seed) {
  const Eigen::Index t = p.rows();
  Rng rng(seed);
  LloydRun run;
  run.centers.resize(k, p.cols());

  // k-means++ seeding.
  std::vector<double> nearest(static_cast<std::size_t>(t), std::numeric_limits<double>::infinity());
  Eigen::Index first = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(t)));
  run.centers.row(0) = p.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0;
    for (Eigen::Index i = 0; i < t; ++i) {
      auto& ni = nearest[static_cast<std::size_t>(i)];
      ni = std::min(ni, squared_distance(p, i, run.centers, c - 1));
      total += ni;
    }
    Eigen::Index pick = t - 1;
    if (total > 0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < t; ++i) {
        target -= nearest[static_cast<std::size_t>(i)];
        if (target < 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(t)));
    }
    run.centers.row(c) = p.row(pick);
  }

  run.labels.assign(static_cast<std::size_t>(t), -1);
  std::vector<double> dist(static_cast<std::size_t>(t));
  for (int it = 0; it < 300; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < t; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dd = squared_distance(p, i, run.centers, c);
        if (dd < bd) {
          bd = dd;
          best = c;
        }
      }
      if (run.labels[static_cast<std::size_t>(i)] != best) changed = true;
      run.labels[static_cast<std::size_t>(i)] = best;
      dist[static_cast<std::size_t>(i)] = bd;
    }
    // Refit centres; an empty cluster takes the point farthest from its centre.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : run.labels) ++counts[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double fd = -1;
      for (Eigen::Index i = 0; i < t; ++i) {
        if (counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (dist[static_cast<std::size_t>(i)] > fd) {
          fd = dist[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      if (far < 0) break;
      --counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(far)])];
      run.labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      dist[static_cast<std::size_t>(far)] = 0;
      changed = true;
    }
    run.centers.setZero();
    for (Eigen::Index i = 0; i < t; ++i) run.centers.row(run.labels[static_cast<std::size_t>(i)]) += p.row(i);
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) run.centers.row(c) /= counts[static_cast<std::size_t>(c)];
    double obj = 0;
    for (Eigen::Index i = 0; i < t; ++i) obj += squared_distance(p, i, run.centers, run.labels[static_cast<std::size_t>(i)]);
    run.objective = obj;
    run.trace.push_back(obj);
    if (!changed) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed) {
  if (k < 1 || k > points.rows()) throw InvalidArgument("kmeans: need 1 <= k <= number of points");
  restarts = std::max(restarts, 1);
  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    LloydRun run = lloyd(points, k, derive_seed(seed, 0x6b6d65616e73ULL, static_cast<std::uint64_t>(r)));
    if (run.objective < best.objective) {
      best.assignment = Assignment(std::move(run.labels), k);
      best.centers = std::move(run.centers);
      best.objective = run.objective;
      best.trace = std::move(run.trace);
    }
  }
  return best;
}

RoundingResult spectral_round(const Eigen::MatrixXd& m, int d, int restarts, std::uint64_t seed) {
  if (m.rows() != m.cols()) throw ShapeError("spectral_round: M must be square");
  const Eigen::Index t = m.rows();
  if (d < 1 || d > t) throw InvalidArgument("spectral_round: need 1 <= d <= t");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = kRankThreshold * std::max(ev.maxCoeff(), 0.0);
  Eigen::Index nonzero = 0;
  for (Eigen::Index k = 0; k < t; ++k)
    if (ev[k] > cutoff && ev[k] > 0) ++nonzero;

  RoundingResult out;
  out.degenerate = nonzero < d;
  out.dimensions = std::max<Eigen::Index>(1, std::min<Eigen::Index>(d, nonzero));
  Eigen::MatrixXd emb = eig.eigenvectors().rightCols(out.dimensions).rowwise().reverse();
  for (Eigen::Index c = 0; c < emb.cols(); ++c) {
    Eigen::Index arg;
    emb.col(c).cwiseAbs().maxCoeff(&arg);
    if (emb(arg, c) < 0) emb.col(c) *= -1;
  }
  for (Eigen::Index i = 0; i < t; ++i) {
    const double nrm = emb.row(i).norm();
    if (nrm > 1e-300) emb.row(i) /= nrm;
  }

  restarts = std::max(restarts, 1);
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KMeansResult km = kmeans(emb, d, 1, derive_seed(seed, 0x726f756e64ULL, static_cast<std::uint64_t>(r)));
    if (km.objective < best) {
      best = km.objective;
      out.best = km.assignment;
    }
    out.kmeans_objectives.push_back(km.objective);
    out.per_restart.push_back(std::move(km.assignment));
  }
  return out;
}

Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& x, const Assignment& y) {
  if (y.size() != x.rows()) throw ShapeError("cluster_means: assignment length mismatch");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(y.clusters, x.cols());
  const auto counts = y.counts();
  for (Eigen::Index i = 0; i < x.rows(); ++i) c.row(y.labels[static_cast<std::size_t>(i)]) += x.row(i);
  for (int j = 0; j < y.clusters; ++j)
    if (counts[static_cast<std::size_t>(j)] > 0) c.row(j) /= counts[static_cast<std::size_t>(j)];
  return c;
}

double cond_objective(const Eigen::MatrixXd& x, const Assignment& y, const DivergenceFamily& family) {
  const Eigen::MatrixXd c = cluster_means(x, y);
  double total = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    total += family.divergence(x.row(i).transpose(), c.row(y.labels[static_cast<std::size_t>(i)]).transpose());
  return total;
}

ClusteringResult hard_reopt(const Eigen::MatrixXd& x, const Assignment& y0, const DivergenceFamily& family,
                            int max_sweeps) {
  if (y0.size() != x.rows()) throw ShapeError("hard_reopt: assignment length mismatch");
  const Eigen::Index t = x.rows();
  const int k = y0.clusters;
  ClusteringResult res;
  std::vector<int> labels = y0.labels;
  std::vector<double> own(static_cast<std::size_t>(t));
  Eigen::MatrixXd centers;

  auto refit = [&] {
    Assignment cur(labels, k);
    centers = cluster_means(x, cur);
    std::vector<int> counts = cur.counts();
    for (Eigen::Index i = 0; i < t; ++i)
      own[static_cast<std::size_t>(i)] =
          family.divergence(x.row(i).transpose(), centers.row(labels[static_cast<std::size_t>(i)]).transpose());
    // Empty cluster: re-seed at the point of maximal divergence from its centre.
    bool reseeded = false;
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Eigen::Index far = -1;
      double fd = -1;
      for (Eigen::Index i = 0; i < t; ++i) {
        if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (own[static_cast<std::size_t>(i)] > fd) {
          fd = own[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      if (far < 0) break;
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = j;
      counts[static_cast<std::size_t>(j)] = 1;
      own[static_cast<std::size_t>(far)] = 0;
      reseeded = true;
    }
    if (reseeded) {
      centers = cluster_means(x, Assignment(labels, k));
      for (Eigen::Index i = 0; i < t; ++i)
        own[static_cast<std::size_t>(i)] =
            family.divergence(x.row(i).transpose(), centers.row(labels[static_cast<std::size_t>(i)]).transpose());
    }
    return std::accumulate(own.begin(), own.end(), 0.0);
  };

  res.objective_trace.push_back(cond_objective(x, y0, family));
  double obj = refit();
  res.objective_trace.push_back(obj);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < t; ++i) {
      const int cur = labels[static_cast<std::size_t>(i)];
      double best = own[static_cast<std::size_t>(i)];
      int arg = cur;
      for (int j = 0; j < k; ++j) {
        if (j == cur) continue;
        const double dj = family.divergence(x.row(i).transpose(), centers.row(j).transpose());
        if (dj < best) {
          best = dj;
          arg = j;
        }
      }
      if (arg != cur) {
        labels[static_cast<std::size_t>(i)] = arg;
        changed = true;
      }
    }
    if (!changed) break;
    obj = refit();
    res.objective_trace.push_back(obj);
  }
  res.y = Assignment(labels, k);
  res.centers = centers;
  res.objective = obj;
  return res;
}

}  // namespace bregcvx
