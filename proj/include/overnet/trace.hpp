// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_TRACE_HPP_
#define OVERNET_TRACE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "overnet/message.hpp"

namespace overnet {

enum class LedgerOutcome { kPending, kSuccess, kFail };

// Per-search ledger event emitted by the protocol handlers and recorded in
// the trace. `kViolation` marks a search delivered at a node whose id does
// not match dest_id (possible only with corrupted initial messages).
struct LedgerEvent {
  enum class Kind { kInit, kSuccess, kFail, kViolation, kBatchResolved };
  Kind kind = Kind::kInit;
  std::uint64_t search_id = 0;
  NodeId origin = 0;
  NodeId dest_id = 0;
  std::uint64_t init_step = 0;
  std::uint64_t step = 0;
  std::uint32_t hops = 0;
  std::uint64_t seq = 0;  // batch-resolved only
};

// One atomic action execution. Replaying a trace from the same ScenarioConfig
// reproduces identical events; steps increase strictly by 1.
struct TraceEvent {
  std::uint64_t step = 0;
  NodeId actor = 0;
  std::string kind;  // "timeout" | "receive" | "inject" | "surgery"
  std::optional<Message> message;
  std::uint64_t msg_id = 0;
  std::uint64_t msg_age = 0;
  // (destination, msg_id, message) per emission.
  struct Emission {
    NodeId to = 0;
    std::uint64_t msg_id = 0;
    Message msg;
  };
  std::vector<Emission> emitted;
  // Human-auditable edge-set delta, e.g. "+stable(5,7)" "-temp(5,9)".
  std::vector<std::string> delta;
  std::vector<LedgerEvent> ledger;
};

void to_json(nlohmann::json& j, const LedgerEvent& e);
void from_json(const nlohmann::json& j, LedgerEvent& e);
void to_json(nlohmann::json& j, const TraceEvent& e);

std::string trace_event_line(const TraceEvent& e);

// FNV-1a over the concatenated JSONL lines; stable across platforms.
class TraceHasher {
 public:
  void update(const std::string& line);
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ull;
};

}  // namespace overnet

#endif  // OVERNET_TRACE_HPP_
