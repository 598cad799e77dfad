#pragma once

#include <functional>
#include <iosfwd>
#include <mutex>
#include <string>

namespace bregcvx {

/// One solver iteration, emitted for convergence plots.
struct TraceRecord {
  std::string solver;
  int iteration = 0;
  double objective = 0;
  /// ADMM: max(primal, dual) residual. GCG: duality-gap estimate.
  double residual = 0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Writes records as JSON lines. Thread-safe.
class JsonLinesTraceWriter {
 public:
  explicit JsonLinesTraceWriter(std::ostream& out) : out_(out) {}
  void write(const TraceRecord& r);
  TraceSink sink();

 private:
  std::ostream& out_;
  std::mutex mutex_;
};

std::string to_json_line(const TraceRecord& r);

}  // namespace bregcvx
