#pragma once

#include <cstdint>

#include "bregcvx/models.hpp"

namespace bregcvx {

/// Gaussian blobs around well-separated centres; the ground-truth partition
/// is stored as labels.
struct PlantedOptions {
  int clusters = 2;
  Eigen::Index per_cluster = 10;
  Eigen::Index features = 4;
  /// Centres are drawn uniformly from [0, separation]^features.
  double separation = 10.0;
  /// Centre sets with a pair closer than this are redrawn (0: accept any draw).
  double min_gap = 0.0;
  double noise = 0.5;
  std::uint64_t seed = 0;
  /// Interleave the rows randomly instead of storing clusters contiguously.
  bool shuffle = true;
};

/// Deterministic for a given options value (toolchain-independent sampling).
/// Throws InvalidArgument when no centre set satisfying min_gap is found in 10000 draws.
Dataset planted_clusters(const PlantedOptions& options);

}  // namespace bregcvx
