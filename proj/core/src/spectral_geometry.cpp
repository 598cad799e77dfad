#include "bregcvx/spectral_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "bregcvx/error.hpp"

namespace bregcvx {

Assignment::Assignment(std::vector<int> l, int k) : labels(std::move(l)), clusters(k) {
  if (k <= 0) throw InvalidArgument("Assignment: cluster count must be positive");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k)
      throw InvalidArgument("Assignment: label out of range at row " + std::to_string(i));
  }
}

Assignment Assignment::from_indicator(const Eigen::MatrixXd& y) {
  std::vector<int> labels(static_cast<std::size_t>(y.rows()));
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    int hit = -1;
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      const double v = y(i, j);
      if (v == 1.0) {
        if (hit >= 0) throw InvalidArgument("assignment row " + std::to_string(i) + " has several ones");
        hit = static_cast<int>(j);
      } else if (v != 0.0) {
        throw InvalidArgument("assignment row " + std::to_string(i) + " is not 0/1");
      }
    }
    if (hit < 0) throw InvalidArgument("assignment row " + std::to_string(i) + " has no one");
    labels[static_cast<std::size_t>(i)] = hit;
  }
  return Assignment(std::move(labels), static_cast<int>(y.cols()));
}

Eigen::MatrixXd Assignment::indicator() const {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(size(), clusters);
  for (Eigen::Index i = 0; i < size(); ++i) y(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  return y;
}

std::vector<int> Assignment::counts() const {
  std::vector<int> c(static_cast<std::size_t>(clusters), 0);
  for (int l : labels) ++c[static_cast<std::size_t>(l)];
  return c;
}

int Assignment::nonempty() const {
  const auto c = counts();
  return static_cast<int>(std::count_if(c.begin(), c.end(), [](int v) { return v > 0; }));
}

std::string to_string(SpectralSet s) {
  switch (s) {
    case SpectralSet::M1: return "M1";
    case SpectralSet::M2: return "M2";
    case SpectralSet::M3: return "M3";
  }
  return "?";
}

Eigen::MatrixXd equivalence_from_assignment(const Assignment& y) {
  const auto counts = y.counts();
  const Eigen::Index t = y.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    const int li = y.labels[static_cast<std::size_t>(i)];
    const double w = 1.0 / counts[static_cast<std::size_t>(li)];
    for (Eigen::Index j = 0; j < t; ++j)
      if (y.labels[static_cast<std::size_t>(j)] == li) m(i, j) = w;
  }
  return m;
}

Eigen::MatrixXd equivalence_from_assignment(const Eigen::MatrixXd& indicator) {
  return equivalence_from_assignment(Assignment::from_indicator(indicator));
}

Eigen::MatrixXd centering(Eigen::Index t) {
  return Eigen::MatrixXd::Identity(t, t) -
         Eigen::MatrixXd::Constant(t, t, 1.0 / static_cast<double>(t));
}

namespace {

void note(MembershipReport& r, double violation, const char* name, double tol) {
  if (violation > tol) r.pass = false;
  if (violation > r.worst) {
    r.worst = violation;
    r.violated = name;
  }
}

}  // namespace

MembershipReport check_membership(const Eigen::MatrixXd& m, SpectralSet set, int d, double tol) {
  MembershipReport r;
  if (m.rows() != m.cols()) {
    r.pass = false;
    r.worst = std::numeric_limits<double>::infinity();
    r.violated = "square";
    return r;
  }
  note(r, (m - m.transpose()).cwiseAbs().maxCoeff(), "symmetry", tol);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  note(r, std::max(0.0, -ev.minCoeff()), "eigenvalue >= 0", tol);
  note(r, std::max(0.0, ev.maxCoeff() - 1.0), "eigenvalue <= 1", tol);
  const double budget = set == SpectralSet::M3 ? d - 1.0 : static_cast<double>(d);
  note(r, std::max(0.0, m.trace() - budget), "trace", tol);
  if (set == SpectralSet::M1 || set == SpectralSet::M2) {
    const Eigen::VectorXd rows = m.rowwise().sum();
    note(r, (rows.array() - 1.0).abs().maxCoeff(), "row sum", tol);
  }
  if (set == SpectralSet::M1) note(r, std::max(0.0, -m.minCoeff()), "row nonnegativity", tol);
  if (r.pass) r.violated.clear();
  return r;
}

Eigen::VectorXd capped_box_simplex_project(const Eigen::VectorXd& sigma, double budget) {
  if (!(budget > 0)) throw InvalidArgument("capped_box_simplex_project: budget must be positive");
  const Eigen::Index t = sigma.size();
  auto clipped = [&](double lambda) {
    return sigma.unaryExpr([lambda](double s) { return std::clamp(s - lambda, 0.0, 1.0); }).eval();
  };
  Eigen::VectorXd mu = clipped(0.0);
  double total = mu.sum();
  if (total <= budget) return mu;

  // Sweep lambda over the breakpoints where a coordinate enters (sigma_i - 1)
  // or leaves (sigma_i) the free band 0 < sigma_i - lambda < 1.
  std::vector<std::pair<double, int>> events;
  events.reserve(static_cast<std::size_t>(2 * t));
  long free_count = 0;
  for (Eigen::Index i = 0; i < t; ++i) {
    const double s = sigma[i];
    if (s > 0 && s <= 1) ++free_count;
    if (s > 1) events.emplace_back(s - 1, +1);
    if (s > 0) events.emplace_back(s, -1);
  }
  std::sort(events.begin(), events.end());
  double lambda = 0;
  for (const auto& [at, delta] : events) {
    const double next = total - static_cast<double>(free_count) * (at - lambda);
    if (next <= budget) break;
    total = next;
    lambda = at;
    free_count += delta;
  }
  if (free_count > 0) lambda += (total - budget) / static_cast<double>(free_count);
  return clipped(lambda);
}

Eigen::VectorXd simplex_project(const Eigen::VectorXd& v) {
  const Eigen::Index t = v.size();
  if (t == 0) return v;
  std::vector<double> u(v.data(), v.data() + t);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0, theta = 0;
  for (Eigen::Index k = 0; k < t; ++k) {
    cumulative += u[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - candidate > 0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Eigen::MatrixXd project_m2(const Eigen::MatrixXd& a, int d) {
  if (a.rows() != a.cols()) throw ShapeError("project_m2: input must be square");
  if (d < 1) throw InvalidArgument("project_m2: d must be positive");
  const Eigen::Index t = a.rows();
  const double inv_t = 1.0 / static_cast<double>(t);
  const Eigen::MatrixXd mean = Eigen::MatrixXd::Constant(t, t, inv_t);
  if (d == 1) return mean;

  Eigen::MatrixXd b = 0.5 * (a + a.transpose()) - mean;
  // HBH without forming H: subtract row and column means.
  const Eigen::VectorXd row_mean = b.rowwise().mean();
  const Eigen::RowVectorXd col_mean = b.colwise().mean();
  const double grand = b.mean();
  b.colwise() -= row_mean;
  b.rowwise() -= col_mean;
  b.array() += grand;
  b = 0.5 * (b + b.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  const Eigen::VectorXd mu = capped_box_simplex_project(eig.eigenvalues(), d - 1.0);
  const Eigen::MatrixXd& phi = eig.eigenvectors();
  Eigen::MatrixXd tmat = phi * mu.asDiagonal() * phi.transpose();
  // Keep T 1 = 0 exactly; a zero eigenvalue may mix with 1/sqrt(t) in degenerate spectra.
  const Eigen::VectorXd tr = tmat.rowwise().mean();
  const Eigen::RowVectorXd tc = tmat.colwise().mean();
  const double tg = tmat.mean();
  tmat.colwise() -= tr;
  tmat.rowwise() -= tc;
  tmat.array() += tg;
  return 0.5 * (tmat + tmat.transpose()) + mean;
}

double pinv_quadratic_form(const Eigen::MatrixXd& m, const Eigen::MatrixXd& t, double range_tol) {
  if (m.rows() != m.cols() || m.rows() != t.rows())
    throw ShapeError("pinv_quadratic_form: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  const double cutoff = kRankThreshold * std::max(top, 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev[k] > cutoff && ev[k] > 0) keep.push_back(k);

  Eigen::MatrixXd basis(m.rows(), static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]);
    lambda[static_cast<Eigen::Index>(c)] = ev[keep[c]];
  }
  const Eigen::MatrixXd coeff = basis.transpose() * t;
  const double residual = (t - basis * coeff).norm();
  if (residual > range_tol * std::max(1.0, t.norm()))
    throw RangeError("pinv_quadratic_form: columns of T leave Im(M), residual " +
                         std::to_string(residual),
                     residual);
  double value = 0;
  for (Eigen::Index k = 0; k < coeff.rows(); ++k) value += coeff.row(k).squaredNorm() / lambda[k];
  return value;
}

}  // namespace bregcvx
