#include "bregcvx/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "bregcvx/error.hpp"
#include "bregcvx/random.hpp"

namespace bregcvx {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"'");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"'");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(trim(tok));
    return out;
  }
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e && std::isfinite(v);
}

bool parse_index(const std::string& s, long& v) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

std::size_t resolve_column(const std::string& spec, const std::vector<std::string>& header, std::size_t width) {
  long idx = 0;
  if (parse_index(spec, idx)) {
    const long w = static_cast<long>(width);
    if (idx < 0) idx += w;
    if (idx < 0 || idx >= w) throw InvalidArgument("column index " + spec + " out of range");
    return static_cast<std::size_t>(idx);
  }
  const auto it = std::find(header.begin(), header.end(), spec);
  if (it == header.end()) throw InvalidArgument("no column named '" + spec + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

Dataset parse_dataset(const std::string& text, const LoadOptions& options, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    rows.push_back(split(line, options.delimiter));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw ParseError("no data rows", line_no);
  const std::size_t width = rows.front().size();
  if (width < 2) throw ParseError("need at least one feature and a label column", line_numbers.front());

  // Header detection: any non-numeric cell outside the label column of row 1.
  std::vector<std::string> header;
  {
    const std::size_t label0 = resolve_column(options.label_column, rows.front(), width);
    bool numeric = true;
    for (std::size_t j = 0; j < width; ++j) {
      double v;
      if (j != label0 && !parse_double(rows.front()[j], v) && rows.front()[j] != options.missing_token) numeric = false;
    }
    if (!numeric) {
      header = rows.front();
      rows.erase(rows.begin());
      line_numbers.erase(line_numbers.begin());
    }
  }
  const std::size_t label_col = resolve_column(options.label_column, header, width);
  std::vector<bool> keep(width, true);
  keep[label_col] = false;
  for (const auto& d : options.drop_columns) keep[resolve_column(d, header, width)] = false;

  Dataset data;
  data.name = name;
  for (std::size_t j = 0; j < width; ++j)
    if (keep[j]) data.feature_names.push_back(header.empty() ? "f" + std::to_string(j) : header[j]);
  const auto n = static_cast<Eigen::Index>(data.feature_names.size());

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t skipped = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != width)
      throw ParseError("expected " + std::to_string(width) + " cells, found " + std::to_string(row.size()),
                       line_numbers[r]);
    if (!options.missing_token.empty() &&
        std::find(row.begin(), row.end(), options.missing_token) != row.end()) {
      ++skipped;
      continue;
    }
    for (std::size_t j = 0; j < width; ++j) {
      if (!keep[j]) continue;
      double v;
      if (!parse_double(row[j], v))
        throw ParseError("non-numeric cell '" + row[j] + "' in column " + std::to_string(j), line_numbers[r]);
      values.push_back(v);
    }
    if (row[label_col].empty()) throw ParseError("empty label", line_numbers[r]);
    raw_labels.push_back(row[label_col]);
  }
  const auto t = static_cast<Eigen::Index>(raw_labels.size());
  if (t == 0) throw ParseError("no complete data rows", line_no);
  data.x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), t, n);

  // Label dictionary in ascending order.
  std::vector<std::string> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const bool numeric_labels = std::all_of(distinct.begin(), distinct.end(), [](const std::string& s) {
    double v;
    return parse_double(s, v);
  });
  if (numeric_labels) {
    std::sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
      double x, y;
      parse_double(a, x);
      parse_double(b, y);
      return x < y;
    });
  }
  std::map<std::string, int> code;
  for (std::size_t i = 0; i < distinct.size(); ++i) code[distinct[i]] = static_cast<int>(i);
  for (const auto& l : raw_labels) data.labels.push_back(code[l]);
  if (skipped > 0) data.notes.push_back("skipped " + std::to_string(skipped) + " incomplete rows");
  return data;
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return parse_dataset(buf.str(), options, name);
}

Dataset preprocess(const Dataset& data, FamilyId transfer) {
  Dataset out = data;
  Eigen::MatrixXd& x = out.x;
  const double t = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    col.array() -= col.minCoeff();
    const double mean = col.sum() / t;
    const double var = (col.array() - mean).square().sum() / t;
    if (var > 0) col /= std::sqrt(var);
  }
  if (transfer == FamilyId::bernoulli) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      auto col = x.col(j);
      const double lo = col.minCoeff();
      const double hi = col.maxCoeff();
      if (hi > lo)
        col = ((col.array() - lo) / (hi - lo) * (1.0 - 2 * kSquashMargin) + kSquashMargin).matrix();
      else
        col.setConstant(0.5);
    }
    out.notes.push_back("features squashed affinely into [0.01, 0.99]");
  }
  out.notes.push_back("features shifted to minimum 0 and scaled to unit variance");
  return out;
}

Dataset stratified_subsample(const Dataset& data, Eigen::Index target, std::uint64_t seed) {
  if (!data.has_labels()) throw InvalidArgument("stratified_subsample needs labels");
  const Eigen::Index t = data.size();
  if (target > t || target < 0) throw InvalidArgument("subsample target exceeds the data size");
  const int c = data.classes();
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(c));
  for (Eigen::Index i = 0; i < t; ++i) members[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])].push_back(i);
  int present = 0;
  for (const auto& m : members) present += m.empty() ? 0 : 1;
  if (target < present) throw InvalidArgument("subsample target is smaller than the number of classes");
  if (target == t) return data;

  // Largest-remainder quotas.
  std::vector<Eigen::Index> quota(static_cast<std::size_t>(c));
  std::vector<std::pair<double, int>> remainders;
  Eigen::Index assigned = 0;
  for (int k = 0; k < c; ++k) {
    const double exact = static_cast<double>(target) * static_cast<double>(members[static_cast<std::size_t>(k)].size()) /
                         static_cast<double>(t);
    quota[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(std::floor(exact));
    assigned += quota[static_cast<std::size_t>(k)];
    remainders.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < target && r < remainders.size(); ++r, ++assigned)
    ++quota[static_cast<std::size_t>(remainders[r].second)];

  std::vector<Eigen::Index> chosen;
  for (int k = 0; k < c; ++k) {
    auto idx = members[static_cast<std::size_t>(k)];
    Rng rng(derive_seed(seed, 0x7374726174ULL, static_cast<std::uint64_t>(k)));
    rng.shuffle(idx.begin(), idx.end());
    idx.resize(static_cast<std::size_t>(quota[static_cast<std::size_t>(k)]));
    chosen.insert(chosen.end(), idx.begin(), idx.end());
  }
  std::sort(chosen.begin(), chosen.end());
  Dataset out;
  out.name = data.name;
  out.feature_names = data.feature_names;
  out.notes = data.notes;
  out.notes.push_back("stratified subsample of " + std::to_string(target) + " rows");
  out.x.resize(static_cast<Eigen::Index>(chosen.size()), data.x.cols());
  for (std::size_t r = 0; r < chosen.size(); ++r) {
    out.x.row(static_cast<Eigen::Index>(r)) = data.x.row(chosen[r]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(chosen[r])]);
  }
  return out;
}

}  // namespace bregcvx
