#include "bregcvx/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "bregcvx/error.hpp"
#include "bregcvx/random.hpp"

namespace bregcvx {
namespace {

constexpr std::uint64_t kCentreStream = 0x63656e747265;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365;
constexpr std::uint64_t kOrderStream = 0x6f72646572;
constexpr int kMaxCentreDraws = 10000;

/// Box-Muller on the library's own uniform generator.
double gaussian(Rng& rng) {
  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  const double v = rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace

Dataset planted_clusters(const PlantedOptions& o) {
  if (o.clusters < 1 || o.per_cluster < 1 || o.features < 1)
    throw InvalidArgument("planted_clusters needs positive cluster, size and feature counts");
  if (!(o.separation >= 0) || !(o.noise >= 0) || !(o.min_gap >= 0))
    throw InvalidArgument("separation, gap and noise must be nonnegative");

  const Eigen::Index t = o.clusters * o.per_cluster;
  Rng centre_rng(derive_seed(o.seed, kCentreStream));
  Eigen::MatrixXd centres(o.clusters, o.features);
  auto closest_pair = [&] {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < centres.rows(); ++a)
      for (Eigen::Index b = a + 1; b < centres.rows(); ++b)
        gap = std::min(gap, (centres.row(a) - centres.row(b)).norm());
    return gap;
  };
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxCentreDraws)
      throw InvalidArgument("planted_clusters: no centre set with the requested minimum gap");
    for (Eigen::Index j = 0; j < centres.rows(); ++j)
      for (Eigen::Index k = 0; k < centres.cols(); ++k) centres(j, k) = o.separation * centre_rng.uniform();
    if (closest_pair() >= o.min_gap) break;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(t));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (o.shuffle) {
    Rng order_rng(derive_seed(o.seed, kOrderStream));
    order_rng.shuffle(order.begin(), order.end());
  }

  Dataset data;
  data.name = "planted";
  data.x.resize(t, o.features);
  data.labels.assign(static_cast<std::size_t>(t), 0);
  Rng noise_rng(derive_seed(o.seed, kNoiseStream));
  for (Eigen::Index s = 0; s < t; ++s) {
    const Eigen::Index row = order[static_cast<std::size_t>(s)];
    const int label = static_cast<int>(s / o.per_cluster);
    data.labels[static_cast<std::size_t>(row)] = label;
    for (Eigen::Index k = 0; k < o.features; ++k) data.x(row, k) = centres(label, k) + o.noise * gaussian(noise_rng);
  }
  for (Eigen::Index k = 0; k < o.features; ++k) data.feature_names.push_back("f" + std::to_string(k));
  data.notes.push_back("planted: " + std::to_string(o.clusters) + " clusters x " + std::to_string(o.per_cluster) +
                       " points, seed " + std::to_string(o.seed));
  return data;
}

}  // namespace bregcvx
