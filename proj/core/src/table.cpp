#include "bregcvx/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "bregcvx/error.hpp"

namespace bregcvx {

namespace {

constexpr const char* kColumns[] = {
    "dataset", "model", "transfer", "t", "n", "d", "alpha", "beta", "gamma", "seed",
    "rounded_objective_mean", "rounded_objective_std", "rounded_accuracy_mean", "rounded_accuracy_std",
    "objective_mean", "objective_std", "objective_best", "accuracy_mean", "accuracy_std",
    "soft_accuracy_mean", "soft_accuracy_std", "hard_accuracy_mean", "hard_accuracy_std",
    "relaxed_objective", "iterations", "converged", "checksum", "status"};

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_num(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

auto sort_key(const ResultRecord& r) {
  return std::tie(r.dataset, r.model, r.transfer, r.alpha, r.beta, r.gamma, r.seed);
}

std::string pm(double mean, double sd, double scale, int decimals) {
  if (std::isnan(mean)) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(decimals) << mean / scale;
  if (!std::isnan(sd)) s << " +- " << std::fixed << std::setprecision(decimals) << sd / scale;
  return s.str();
}

}  // namespace

void sort_records(std::vector<ResultRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const ResultRecord& a, const ResultRecord& b) { return sort_key(a) < sort_key(b); });
}

void write_results_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
  for (std::size_t c = 0; c < std::size(kColumns); ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const ResultRecord& r : records) {
    out << quote(r.dataset) << ',' << r.model << ',' << r.transfer << ',' << r.t << ',' << r.n << ',' << r.d << ','
        << num(r.alpha) << ',' << num(r.beta) << ',' << num(r.gamma) << ',' << r.seed << ','
        << num(r.rounded_objective_mean) << ',' << num(r.rounded_objective_std) << ','
        << num(r.rounded_accuracy_mean) << ',' << num(r.rounded_accuracy_std) << ',' << num(r.objective_mean) << ','
        << num(r.objective_std) << ',' << num(r.objective_best) << ',' << num(r.accuracy_mean) << ','
        << num(r.accuracy_std) << ',' << num(r.soft_accuracy_mean) << ',' << num(r.soft_accuracy_std) << ','
        << num(r.hard_accuracy_mean) << ',' << num(r.hard_accuracy_std) << ',' << num(r.relaxed_objective) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.checksum << ',' << quote(r.status) << '\n';
  }
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::vector<ResultRecord> out;
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) return out;
  ++line_no;
  const auto header = split_csv(line);
  if (header.size() != std::size(kColumns)) throw ParseError("unexpected results header", line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != std::size(kColumns)) throw ParseError("wrong number of result columns", line_no);
    try {
      ResultRecord r;
      std::size_t i = 0;
      r.dataset = f[i++];
      r.model = f[i++];
      r.transfer = f[i++];
      r.t = std::stol(f[i++]);
      r.n = std::stol(f[i++]);
      r.d = std::stoi(f[i++]);
      r.alpha = parse_num(f[i++]);
      r.beta = parse_num(f[i++]);
      r.gamma = parse_num(f[i++]);
      r.seed = std::stoull(f[i++]);
      for (double* v : {&r.rounded_objective_mean, &r.rounded_objective_std, &r.rounded_accuracy_mean,
                        &r.rounded_accuracy_std, &r.objective_mean, &r.objective_std, &r.objective_best,
                        &r.accuracy_mean, &r.accuracy_std, &r.soft_accuracy_mean, &r.soft_accuracy_std,
                        &r.hard_accuracy_mean, &r.hard_accuracy_std, &r.relaxed_objective})
        *v = parse_num(f[i++]);
      r.iterations = std::stol(f[i++]);
      r.converged = f[i++] == "1";
      r.checksum = f[i++];
      r.status = f[i++];
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("malformed number in results row", line_no);
    }
  }
  return out;
}

void write_text_table(const std::vector<ResultRecord>& records_in, std::ostream& out) {
  std::vector<ResultRecord> records = records_in;
  sort_records(records);
  // Power-of-ten scale per (dataset, transfer) block.
  std::map<std::pair<std::string, std::string>, int> exponent;
  for (const ResultRecord& r : records) {
    for (double v : {r.objective_mean, r.rounded_objective_mean}) {
      if (std::isnan(v) || v == 0) continue;
      const int e = static_cast<int>(std::floor(std::log10(std::abs(v))));
      auto [it, inserted] = exponent.emplace(std::make_pair(r.dataset, r.transfer), e);
      if (!inserted) it->second = std::max(it->second, e);
    }
  }
  const std::vector<std::pair<std::string, int>> cols = {
      {"model", 10},  {"transfer", 9}, {"rounded obj", 16}, {"rounded acc(%)", 16}, {"obj", 16},
      {"scale", 7},   {"acc(%)", 14},  {"soft acc(%)", 14}, {"hard acc(%)", 14},    {"status", 8}};
  std::string current;
  bool first = true;
  for (const ResultRecord& r : records) {
    if (first || r.dataset != current) {
      current = r.dataset;
      out << (first ? "" : "\n") << current << " (t=" << r.t << ", n=" << r.n << ", d=" << r.d << ")\n";
      first = false;
      for (const auto& [name, w] : cols) out << std::left << std::setw(w) << name;
      out << '\n';
    }
    const auto it = exponent.find({r.dataset, r.transfer});
    const int e = it == exponent.end() ? 0 : it->second;
    const double scale = std::pow(10.0, e);
    const std::vector<std::string> cells = {
        r.model,
        r.transfer,
        pm(r.rounded_objective_mean, r.rounded_objective_std, scale, 2),
        pm(100 * r.rounded_accuracy_mean, 100 * r.rounded_accuracy_std, 1, 1),
        pm(r.objective_mean, r.objective_std, scale, 2),
        "x10^" + std::to_string(e),
        pm(100 * r.accuracy_mean, 100 * r.accuracy_std, 1, 1),
        pm(100 * r.soft_accuracy_mean, 100 * r.soft_accuracy_std, 1, 1),
        pm(100 * r.hard_accuracy_mean, 100 * r.hard_accuracy_std, 1, 1),
        r.status};
    for (std::size_t c = 0; c < cells.size(); ++c) out << std::left << std::setw(cols[c].second) << cells[c];
    out << '\n';
  }
}

void write_timings_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
  out << "dataset,model,transfer,alpha,beta,gamma,seed,wall_seconds\n";
  for (const ResultRecord& r : records)
    out << quote(r.dataset) << ',' << r.model << ',' << r.transfer << ',' << num(r.alpha) << ',' << num(r.beta)
        << ',' << num(r.gamma) << ',' << r.seed << ',' << num(r.wall_seconds) << '\n';
}

void emit_table(const std::vector<ResultRecord>& records, TableFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  if (format == TableFormat::csv)
    write_results_csv(records, out);
  else
    write_text_table(records, out);
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace bregcvx
