#include "bregcvx/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bregcvx/error.hpp"

namespace bregcvx {

std::string_view to_string(FamilyId id) {
  switch (id) {
    case FamilyId::euclidean: return "euclidean";
    case FamilyId::bernoulli: return "bernoulli";
  }
  return "unknown";
}

FamilyId family_from_string(std::string_view name) {
  if (name == "euclidean" || name == "linear") return FamilyId::euclidean;
  if (name == "bernoulli" || name == "sigmoid") return FamilyId::bernoulli;
  throw InvalidArgument("unknown divergence family '" + std::string(name) + "'");
}

double softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (w.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = w.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((w.array() - m).exp().sum());
}

double DivergenceFamily::potential(double x) const {
  switch (id_) {
    case FamilyId::euclidean: return 0.5 * x * x;
    case FamilyId::bernoulli: {
      const double y = admit(x, -1);
      return y * std::log(y) + (1 - y) * std::log1p(-y);
    }
  }
  return 0;
}

double DivergenceFamily::transfer(double x) const {
  switch (id_) {
    case FamilyId::euclidean: return x;
    case FamilyId::bernoulli: {
      const double y = admit(x, -1);
      return std::log(y) - std::log1p(-y);
    }
  }
  return 0;
}

double DivergenceFamily::inverse_transfer(double z) const {
  return id_ == FamilyId::euclidean ? z : sigmoid(z);
}

double DivergenceFamily::conjugate(double z) const {
  return id_ == FamilyId::euclidean ? 0.5 * z * z : softplus(z);
}

double DivergenceFamily::curvature(double x) const {
  if (id_ == FamilyId::euclidean) return 1.0;
  const double y = admit(x, -1);
  return 1.0 / (y * (1 - y));
}

double DivergenceFamily::admit(double x, long index) const {
  if (id_ == FamilyId::euclidean) {
    if (!std::isfinite(x)) throw DomainError("non-finite coordinate", index);
    return x;
  }
  if (!(x >= -kBernoulliClip && x <= 1 + kBernoulliClip)) {
    throw DomainError("bernoulli coordinate " + std::to_string(x) + " outside (0,1) at index " +
                          std::to_string(index),
                      index);
  }
  return std::clamp(x, kBernoulliClip, 1 - kBernoulliClip);
}

Eigen::MatrixXd DivergenceFamily::transfer(const Eigen::MatrixXd& x) const {
  if (id_ == FamilyId::euclidean) return x;
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, j) = transfer(x(i, j));
  return out;
}

Eigen::MatrixXd DivergenceFamily::inverse_transfer(const Eigen::MatrixXd& z) const {
  if (id_ == FamilyId::euclidean) return z;
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

double DivergenceFamily::divergence(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (x.size() != y.size()) throw ShapeError("divergence: length mismatch");
  double total = 0;
  if (id_ == FamilyId::euclidean) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      admit(x[j], j);
      admit(y[j], j);
      const double r = x[j] - y[j];
      total += 0.5 * r * r;
    }
    return total;
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double a = admit(x[j], j);
    const double b = admit(y[j], j);
    // KL between Bernoulli(a) and Bernoulli(b).
    total += a * std::log(a / b) + (1 - a) * std::log((1 - a) / (1 - b));
  }
  return std::max(total, 0.0);
}

double DivergenceFamily::rowwise_divergence(const Eigen::MatrixXd& x,
                                            const Eigen::MatrixXd& y) const {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw ShapeError("rowwise_divergence: shape mismatch");
  double total = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    try {
      total += divergence(x.row(i).transpose(), y.row(i).transpose());
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " (row " + std::to_string(i) + ")",
                        i * x.cols() + e.index());
    }
  }
  return total;
}

double DivergenceFamily::conjugate_divergence(const Eigen::MatrixXd& a,
                                              const Eigen::MatrixXd& b) const {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("conjugate_divergence: shape mismatch");
  if (id_ == FamilyId::euclidean) return 0.5 * (a - b).squaredNorm();
  double total = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double u = a(i, j), v = b(i, j);
      total += softplus(u) - softplus(v) - (u - v) * sigmoid(v);
    }
  }
  return std::max(total, 0.0);
}

Eigen::MatrixXd DivergenceFamily::conjugate_divergence_grad(const Eigen::MatrixXd& a,
                                                            const Eigen::MatrixXd& b) const {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("conjugate_divergence_grad: shape mismatch");
  return inverse_transfer(a) - inverse_transfer(b);
}

void DivergenceFamily::check_domain(const Eigen::MatrixXd& x) const {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) admit(x(i, j), i * x.cols() + j);
}

SoftMaxPotential::SoftMaxPotential(Eigen::Index dimension) : dimension_(dimension) {
  if (dimension <= 0) throw InvalidArgument("SoftMaxPotential: dimension must be positive");
}

double SoftMaxPotential::value(const Eigen::Ref<const Eigen::VectorXd>& w) const {
  if (w.size() != dimension_) throw ShapeError("SoftMaxPotential: dimension mismatch");
  return log_sum_exp(w);
}

Eigen::VectorXd SoftMaxPotential::gradient(const Eigen::Ref<const Eigen::VectorXd>& w) const {
  if (w.size() != dimension_) throw ShapeError("SoftMaxPotential: dimension mismatch");
  const double m = w.maxCoeff();
  Eigen::VectorXd e = (w.array() - m).exp();
  return e / e.sum();
}

}  // namespace bregcvx
