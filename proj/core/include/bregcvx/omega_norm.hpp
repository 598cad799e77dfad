#pragma once

#include <Eigen/Dense>

#include "bregcvx/spectral_geometry.hpp"

namespace bregcvx {

/// Nonincreasing, nonnegative singular-value vector paired with a cluster budget d >= 2.
class SingularSpectrum {
 public:
  SingularSpectrum(Eigen::VectorXd values, int d);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  int d() const noexcept { return d_; }

 private:
  Eigen::VectorXd values_;
  int d_;
};

/// Result of the breakpoint search for Omega^2 over a spectrum.
struct OmegaCertificate {
  /// Number of leading singular values whose optimal eigenvalue is capped at 1.
  int k = 0;
  /// Optimal eigenvalues of M, aligned with the spectrum.
  Eigen::VectorXd sigma;
  /// Omega^2, i.e. min over sigma of sum s_i^2 / sigma_i.
  double value = 0;
};

/// Closed-form minimisation of sum s_i^2/sigma_i over 0 <= sigma_i <= 1,
/// sum sigma_i <= d - 1. k is the smallest index in {0..d-2} with
/// sum_{i>k} s_i >= (d-1-k) s_{k+1} (1-based s). Spectra shorter than d-1
/// are zero padded; the returned sigma has the padded length.
OmegaCertificate omega_squared_spectrum(const SingularSpectrum& s);

/// Top-k singular triplets; k is clipped to min(rows, cols).
struct SingularTriplets {
  Eigen::VectorXd values;
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
};
SingularTriplets top_singular_triplets(const Eigen::MatrixXd& r, Eigen::Index k);

/// Omega(T) = sqrt(min_{M in M3, Im T in Im M} tr(T' M^+ T)).
double omega(const Eigen::MatrixXd& t, int d);
/// Dual norm: Euclidean norm of the top d-1 singular values.
double omega_dual(const Eigen::MatrixXd& r, int d);
/// S with Omega(S) = 1 and <R, S> = omega_dual(R). Throws InvalidArgument for R = 0.
Eigen::MatrixXd omega_dual_subgradient(const Eigen::MatrixXd& r, int d);

/// The M attaining Omega^2(T). M3: U diag(sigma) U'. M2: 11'/t + U diag(sigma) U'
/// with U, sigma taken from the centred matrix H T.
Eigen::MatrixXd recover_m(const Eigen::MatrixXd& t, int d, SpectralSet target);

/// Which relaxation the norm is taken over.
///   m3: Omega as above.
///   m2: via H M3 H + 11'/t, giving Omega_2^2(T) = ||1'T||^2 / t + Omega^2(H T).
enum class NormGeometry { m3, m2 };

/// Omega bound to a budget and a geometry; what the solvers consume.
class OmegaNorm {
 public:
  OmegaNorm(int d, NormGeometry geometry = NormGeometry::m3);

  int d() const noexcept { return d_; }
  NormGeometry geometry() const noexcept { return geometry_; }

  double value(const Eigen::MatrixXd& t) const;
  double squared(const Eigen::MatrixXd& t) const;
  double dual(const Eigen::MatrixXd& r) const;
  Eigen::MatrixXd dual_subgradient(const Eigen::MatrixXd& r) const;
  Eigen::MatrixXd recover(const Eigen::MatrixXd& t) const;
  SpectralSet target_set() const noexcept {
    return geometry_ == NormGeometry::m2 ? SpectralSet::M2 : SpectralSet::M3;
  }

 private:
  int d_;
  NormGeometry geometry_;
};

}  // namespace bregcvx
