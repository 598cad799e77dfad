#include "bregcvx/trace.hpp"

#include <ostream>

#include <json.hpp>

namespace bregcvx {

std::string to_json_line(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["solver"] = r.solver;
  j["iteration"] = r.iteration;
  j["objective"] = r.objective;
  j["residual"] = r.residual;
  return j.dump();
}

void JsonLinesTraceWriter::write(const TraceRecord& r) {
  const std::string line = to_json_line(r);
  std::lock_guard lock(mutex_);
  out_ << line << '\n';
}

TraceSink JsonLinesTraceWriter::sink() {
  return [this](const TraceRecord& r) { write(r); };
}

}  // namespace bregcvx
