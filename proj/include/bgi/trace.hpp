#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace bgi {

// One algorithm event. Group/arm/dimension indices inside `payload` are
// 1-based, matching every other user-facing output.
struct TraceEvent {
  std::uint64_t round = 0;
  std::string event;
  nlohmann::json payload;
};

using Trace = std::vector<TraceEvent>;

// Writes one JSON object per line: {"round", "event", "payload"}.
void write_trace_jsonl(const Trace& trace, std::ostream& out);

}  // namespace bgi
