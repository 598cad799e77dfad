#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bregcvx/divergence.hpp"
#include "bregcvx/models.hpp"

namespace bregcvx {

struct LoadOptions {
  char delimiter = ',';
  /// Label column: an integer index (negative counts from the end) or a header name.
  std::string label_column = "-1";
  /// Columns to discard (indices or header names), e.g. record identifiers.
  std::vector<std::string> drop_columns;
  /// Rows containing this token are skipped instead of rejected (empty: none).
  std::string missing_token;
};

/// Parses delimited numeric text with one label column. A first line with a
/// non-numeric feature cell is taken as a header. Labels are mapped to
/// 0..c-1 in ascending order (numeric when every label is numeric).
/// Throws ParseError with the 1-based line number on non-numeric cells or ragged rows.
Dataset load_dataset(const std::string& path, const LoadOptions& options = {});
Dataset parse_dataset(const std::string& text, const LoadOptions& options = {}, const std::string& name = "inline");

/// Width of the sigmoid-path squash margin.
inline constexpr double kSquashMargin = 0.01;

/// Shifts every feature to minimum 0 and scales to unit (population) variance.
/// For the Bernoulli family the result is additionally mapped affinely onto
/// [0.01, 0.99]; constant features become 0.5.
Dataset preprocess(const Dataset& data, FamilyId transfer);

/// Per-class proportional sample (largest-remainder quotas), deterministic per seed.
/// Selected rows keep their original order.
Dataset stratified_subsample(const Dataset& data, Eigen::Index target, std::uint64_t seed);

}  // namespace bregcvx
