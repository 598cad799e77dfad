#include "bregcvx/omega_norm.hpp"

#include <algorithm>
#include <cmath>

#include "bregcvx/error.hpp"

namespace bregcvx {

namespace {

// Gram-based triplets beat a full SVD once the short side exceeds this.
constexpr Eigen::Index kGramCrossover = 96;

Eigen::VectorXd singular_values(const Eigen::MatrixXd& t) {
  if (t.size() == 0) return Eigen::VectorXd();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(t);
  return svd.singularValues();
}

Eigen::MatrixXd center_rows(const Eigen::MatrixXd& t) {
  return t.rowwise() - t.colwise().mean();
}

}  // namespace

SingularSpectrum::SingularSpectrum(Eigen::VectorXd values, int d) : values_(std::move(values)), d_(d) {
  if (d < 2) throw InvalidArgument("SingularSpectrum: d must be at least 2");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0)) throw InvalidArgument("SingularSpectrum: negative or NaN entry");
    if (i > 0 && values_[i] > values_[i - 1])
      throw InvalidArgument("SingularSpectrum: values must be nonincreasing");
  }
}

OmegaCertificate omega_squared_spectrum(const SingularSpectrum& spectrum) {
  const int d = spectrum.d();
  const int budget = d - 1;
  Eigen::VectorXd s = spectrum.values();
  if (s.size() < budget) {
    const Eigen::Index old = s.size();
    s.conservativeResize(budget);
    s.tail(budget - old).setZero();
  }
  const Eigen::Index t = s.size();

  // tail[k] = sum_{i >= k} s_i (0-based).
  Eigen::VectorXd tail(t + 1);
  tail[t] = 0;
  for (Eigen::Index i = t - 1; i >= 0; --i) tail[i] = tail[i + 1] + s[i];

  int k = 0;
  for (; k <= d - 2; ++k) {
    if (tail[k] >= (budget - k) * s[k]) break;
  }
  if (k > d - 2) k = d - 2;  // unreachable in exact arithmetic

  OmegaCertificate cert;
  cert.k = k;
  cert.sigma = Eigen::VectorXd::Zero(t);
  double head = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    head += s[i] * s[i];
    cert.sigma[i] = 1.0;
  }
  const double rest = tail[k];
  const double slots = budget - k;
  if (rest > 0) {
    for (Eigen::Index i = k; i < t; ++i) cert.sigma[i] = std::min(1.0, slots * s[i] / rest);
  }
  cert.value = head + rest * rest / slots;
  return cert;
}

SingularTriplets top_singular_triplets(const Eigen::MatrixXd& r, Eigen::Index k) {
  SingularTriplets out;
  const Eigen::Index m = r.rows(), n = r.cols();
  const Eigen::Index short_side = std::min(m, n);
  k = std::clamp<Eigen::Index>(k, 0, short_side);
  if (k == 0) {
    out.u.resize(m, 0);
    out.v.resize(n, 0);
    return out;
  }
  if (short_side <= kGramCrossover) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.values = svd.singularValues().head(k);
    out.u = svd.matrixU().leftCols(k);
    out.v = svd.matrixV().leftCols(k);
    return out;
  }
  // Eigen-decompose the Gram matrix on the short side and lift the other factor.
  const bool rows_short = m <= n;
  const Eigen::MatrixXd gram = rows_short ? Eigen::MatrixXd(r * r.transpose())
                                          : Eigen::MatrixXd(r.transpose() * r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  out.values.resize(k);
  Eigen::MatrixXd near(short_side, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index src = short_side - 1 - c;
    out.values[c] = std::sqrt(std::max(eig.eigenvalues()[src], 0.0));
    near.col(c) = eig.eigenvectors().col(src);
  }
  const double floor = 1e-14 * std::max(out.values[0], 1e-300);
  Eigen::MatrixXd far = rows_short ? Eigen::MatrixXd(r.transpose() * near) : Eigen::MatrixXd(r * near);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (out.values[c] > floor) {
      far.col(c) /= out.values[c];
    } else {
      out.values[c] = 0;
      far.col(c).setZero();
    }
  }
  out.u = rows_short ? near : far;
  out.v = rows_short ? far : near;
  return out;
}

double omega(const Eigen::MatrixXd& t, int d) {
  if (d < 2) throw InvalidArgument("omega: d must be at least 2");
  return std::sqrt(omega_squared_spectrum(SingularSpectrum(singular_values(t), d)).value);
}

double omega_dual(const Eigen::MatrixXd& r, int d) {
  if (d < 2) throw InvalidArgument("omega_dual: d must be at least 2");
  return top_singular_triplets(r, d - 1).values.norm();
}

Eigen::MatrixXd omega_dual_subgradient(const Eigen::MatrixXd& r, int d) {
  if (d < 2) throw InvalidArgument("omega_dual_subgradient: d must be at least 2");
  const SingularTriplets top = top_singular_triplets(r, d - 1);
  const double norm = top.values.norm();
  if (!(norm > 0)) throw InvalidArgument("omega_dual_subgradient: zero input has no direction");
  return top.u * (top.values / norm).asDiagonal() * top.v.transpose();
}

Eigen::MatrixXd recover_m(const Eigen::MatrixXd& t, int d, SpectralSet target) {
  if (d < 2) throw InvalidArgument("recover_m: d must be at least 2");
  if (target == SpectralSet::M1) throw InvalidArgument("recover_m: M1 is not a supported target");
  const Eigen::Index rows = t.rows();
  const Eigen::MatrixXd base = target == SpectralSet::M2 ? center_rows(t) : t;
  if (target == SpectralSet::M3 && !(t.norm() > 0))
    throw InvalidArgument("recover_m: T must be nonzero");

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, rows);
  if (base.norm() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(base, Eigen::ComputeThinU);
    const OmegaCertificate cert = omega_squared_spectrum(SingularSpectrum(svd.singularValues(), d));
    const Eigen::Index k = svd.singularValues().size();
    m = svd.matrixU() * cert.sigma.head(k).asDiagonal() * svd.matrixU().transpose();
  }
  if (target == SpectralSet::M2) m.array() += 1.0 / static_cast<double>(rows);
  return 0.5 * (m + m.transpose());
}

OmegaNorm::OmegaNorm(int d, NormGeometry geometry) : d_(d), geometry_(geometry) {
  if (d < 2) throw InvalidArgument("OmegaNorm: d must be at least 2");
}

double OmegaNorm::squared(const Eigen::MatrixXd& t) const {
  if (geometry_ == NormGeometry::m3) {
    return omega_squared_spectrum(SingularSpectrum(singular_values(t), d_)).value;
  }
  const double mean_part = t.colwise().sum().squaredNorm() / static_cast<double>(t.rows());
  return mean_part + omega_squared_spectrum(SingularSpectrum(singular_values(center_rows(t)), d_)).value;
}

double OmegaNorm::value(const Eigen::MatrixXd& t) const { return std::sqrt(squared(t)); }

double OmegaNorm::dual(const Eigen::MatrixXd& r) const {
  if (geometry_ == NormGeometry::m3) return omega_dual(r, d_);
  const double mean_part = r.colwise().sum().squaredNorm() / static_cast<double>(r.rows());
  const double centred = omega_dual(center_rows(r), d_);
  return std::sqrt(mean_part + centred * centred);
}

Eigen::MatrixXd OmegaNorm::dual_subgradient(const Eigen::MatrixXd& r) const {
  if (geometry_ == NormGeometry::m3) return omega_dual_subgradient(r, d_);
  const Eigen::MatrixXd centred = center_rows(r);
  const Eigen::MatrixXd mean_part = r - centred;
  const double centred_dual = omega_dual(centred, d_);
  const double total = std::sqrt(mean_part.squaredNorm() + centred_dual * centred_dual);
  if (!(total > 0)) throw InvalidArgument("dual_subgradient: zero input has no direction");
  Eigen::MatrixXd s = mean_part;
  if (centred_dual > 0) s += centred_dual * omega_dual_subgradient(centred, d_);
  return s / total;
}

Eigen::MatrixXd OmegaNorm::recover(const Eigen::MatrixXd& t) const { return recover_m(t, d_, target_set()); }

}  // namespace bregcvx
