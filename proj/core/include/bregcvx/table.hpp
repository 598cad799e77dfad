#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bregcvx/experiment.hpp"

namespace bregcvx {

enum class TableFormat { csv, text };

/// Deterministic CSV: fixed column order, %.12g numbers, NaN as an empty cell.
/// Wall-clock time is deliberately excluded.
void write_results_csv(const std::vector<ResultRecord>& records, std::ostream& out);
std::vector<ResultRecord> read_results_csv(std::istream& in);

/// Aligned text grouped by dataset then model; objectives are shown as
/// mean +- std scaled by 10^k per (dataset, transfer) block.
void write_text_table(const std::vector<ResultRecord>& records, std::ostream& out);

/// Per-cell wall-clock seconds.
void write_timings_csv(const std::vector<ResultRecord>& records, std::ostream& out);

/// Writes `records` to `path` in the given format. Throws Error on I/O failure.
void emit_table(const std::vector<ResultRecord>& records, TableFormat format, const std::string& path);

/// Records sorted by (dataset, model, transfer, alpha, beta, gamma, seed).
void sort_records(std::vector<ResultRecord>& records);

}  // namespace bregcvx
