#include "bregcvx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bregcvx/error.hpp"

namespace bregcvx {

std::vector<int> max_weight_matching(const Eigen::MatrixXd& weight) {
  const Eigen::Index rows = weight.rows();
  const Eigen::Index cols = weight.cols();
  std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return row_to_col;
  if (!weight.allFinite()) throw InvalidArgument("max_weight_matching: non-finite weight");

  // Square min-cost problem on n = max(rows, cols); padding costs nothing.
  const Eigen::Index n = std::max(rows, cols);
  const double top = weight.maxCoeff();
  // Padded cells carry weight zero, i.e. cost `top`.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, n, top);
  cost.topLeftCorner(rows, cols) = (top - weight.array()).matrix();

  // Hungarian method with potentials (1-based internal indexing).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0), v(static_cast<std::size_t>(n + 1), 0);
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Eigen::Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  for (Eigen::Index j = 1; j <= n; ++j) {
    const Eigen::Index i = p[static_cast<std::size_t>(j)];
    if (i >= 1 && i <= rows && j <= cols) row_to_col[static_cast<std::size_t>(i - 1)] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

namespace {

int infer_classes(const std::vector<int>& labels, int classes) {
  int c = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("labels must be nonnegative");
    c = std::max(c, l + 1);
  }
  if (classes > 0) {
    if (c > classes) throw InvalidArgument("label exceeds the declared class count");
    return classes;
  }
  return c;
}

AccuracyResult match(const Eigen::MatrixXd& table, double t) {
  AccuracyResult out;
  out.matching = max_weight_matching(table);
  double total = 0;
  for (Eigen::Index j = 0; j < table.rows(); ++j) {
    const int c = out.matching[static_cast<std::size_t>(j)];
    if (c >= 0) total += table(j, c);
  }
  out.value = t > 0 ? total / t : 0;
  return out;
}

}  // namespace

AccuracyResult matched_accuracy(const Assignment& y, const std::vector<int>& labels, int classes) {
  if (static_cast<Eigen::Index>(labels.size()) != y.size())
    throw ShapeError("matched_accuracy: label count does not match assignment");
  const int c = infer_classes(labels, classes);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(y.clusters, std::max(c, 1));
  for (std::size_t i = 0; i < labels.size(); ++i) table(y.labels[i], labels[i]) += 1;
  return match(table, static_cast<double>(labels.size()));
}

AccuracyResult soft_accuracy(const Eigen::MatrixXd& posteriors, const std::vector<int>& labels, int classes) {
  if (static_cast<Eigen::Index>(labels.size()) != posteriors.rows())
    throw ShapeError("soft_accuracy: label count does not match posterior rows");
  for (Eigen::Index i = 0; i < posteriors.rows(); ++i) {
    if ((posteriors.row(i).array() < -1e-8).any() || std::abs(posteriors.row(i).sum() - 1.0) > 1e-8)
      throw InvalidArgument("soft_accuracy: posterior row " + std::to_string(i) + " is not in the simplex");
  }
  const int c = infer_classes(labels, classes);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(posteriors.cols(), std::max(c, 1));
  for (std::size_t i = 0; i < labels.size(); ++i)
    table.col(labels[i]) += posteriors.row(static_cast<Eigen::Index>(i)).transpose();
  return match(table, static_cast<double>(labels.size()));
}

Assignment map_assignment(const Eigen::VectorXd& q, const Eigen::MatrixXd& centers, const Eigen::MatrixXd& x,
                          const DivergenceFamily& family) {
  if (q.size() != centers.rows()) throw ShapeError("map_assignment: prior and centre count differ");
  if (centers.cols() != x.cols()) throw ShapeError("map_assignment: centre dimension mismatch");
  std::vector<int> labels(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      if (!(q[j] > 0)) continue;
      const double s = std::log(q[j]) - family.divergence(x.row(i).transpose(), centers.row(j).transpose());
      if (s > best) {
        best = s;
        arg = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
  }
  return Assignment(std::move(labels), static_cast<int>(q.size()));
}

AccuracyResult hard_posterior_accuracy(const Eigen::VectorXd& q, const Eigen::MatrixXd& centers,
                                       const Eigen::MatrixXd& x, const std::vector<int>& labels,
                                       const DivergenceFamily& family, int classes) {
  return matched_accuracy(map_assignment(q, centers, x, family), labels, classes);
}

}  // namespace bregcvx
