#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace bregcvx {

enum class FamilyId { euclidean, bernoulli };

std::string_view to_string(FamilyId id);
FamilyId family_from_string(std::string_view name);

/// Numerically safe log(1 + exp(z)).
double softplus(double z);
/// Numerically safe 1 / (1 + exp(-z)).
double sigmoid(double z);

/// A separable Bregman family: potential F applied coordinate-wise, its
/// transfer f = F', the inverse transfer f^{-1} = (F*)' and the conjugate F*.
///
/// euclidean: F(x) = x^2/2 on all reals, self-conjugate.
/// bernoulli: F(x) = x log x + (1-x) log(1-x) on (0,1), f = logit,
///            F* = softplus, f^{-1} = sigmoid.
///
/// Primal arguments of the bernoulli family within 1e-12 of [0,1] are clamped
/// into [1e-12, 1-1e-12]; anything further out raises DomainError.
class DivergenceFamily {
 public:
  static constexpr double kBernoulliClip = 1e-12;

  explicit DivergenceFamily(FamilyId id = FamilyId::euclidean) : id_(id) {}

  static DivergenceFamily euclidean() { return DivergenceFamily(FamilyId::euclidean); }
  static DivergenceFamily bernoulli() { return DivergenceFamily(FamilyId::bernoulli); }

  FamilyId id() const noexcept { return id_; }
  std::string_view name() const { return to_string(id_); }

  /// True when D_F is jointly convex in both arguments (both shipped families).
  bool jointly_convex() const noexcept { return true; }

  double potential(double x) const;
  double transfer(double x) const;
  double inverse_transfer(double z) const;
  double conjugate(double z) const;
  /// Second derivative F''(x), used by gradients taken through the second argument.
  double curvature(double x) const;

  /// Clamps a primal coordinate into the open domain or throws DomainError.
  double admit(double x, long index) const;

  Eigen::MatrixXd transfer(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd inverse_transfer(const Eigen::MatrixXd& z) const;

  /// D_F(x, y) summed over coordinates.
  double divergence(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const;

  /// Sum over rows of D_F(X_i:, Y_i:).
  double rowwise_divergence(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;

  /// Row-wise D_{F*}(A, B); both arguments range over all reals.
  double conjugate_divergence(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

  /// Gradient of conjugate_divergence in its first argument: f^{-1}(A) - f^{-1}(B).
  Eigen::MatrixXd conjugate_divergence_grad(const Eigen::MatrixXd& a,
                                            const Eigen::MatrixXd& b) const;

  /// Throws DomainError naming the first coordinate outside the domain.
  void check_domain(const Eigen::MatrixXd& x) const;

  friend bool operator==(const DivergenceFamily&, const DivergenceFamily&) = default;

 private:
  FamilyId id_;
};

/// g(w) = log sum_i exp(w_i) with max-shift stabilisation.
class SoftMaxPotential {
 public:
  explicit SoftMaxPotential(Eigen::Index dimension);

  Eigen::Index dimension() const noexcept { return dimension_; }
  double value(const Eigen::Ref<const Eigen::VectorXd>& w) const;
  /// Softmax vector; sums to one.
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& w) const;

 private:
  Eigen::Index dimension_;
};

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& w);

}  // namespace bregcvx
