// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/trace.hpp"

#include <stdexcept>

namespace overnet {

namespace {

const char* ledger_kind_name(LedgerEvent::Kind k) {
  switch (k) {
    case LedgerEvent::Kind::kInit: return "init";
    case LedgerEvent::Kind::kSuccess: return "success";
    case LedgerEvent::Kind::kFail: return "fail";
    case LedgerEvent::Kind::kViolation: return "violation";
    case LedgerEvent::Kind::kBatchResolved: return "batch-resolved";
  }
  return "?";
}

LedgerEvent::Kind ledger_kind_from_name(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(LedgerEvent::Kind::kBatchResolved); ++k)
    if (s == ledger_kind_name(static_cast<LedgerEvent::Kind>(k)))
      return static_cast<LedgerEvent::Kind>(k);
  throw std::invalid_argument("unknown ledger event kind: " + s);
}

}  // namespace

void to_json(nlohmann::json& j, const LedgerEvent& e) {
  j = nlohmann::json{{"kind", ledger_kind_name(e.kind)},
                     {"search_id", e.search_id},
                     {"origin", e.origin},
                     {"dest_id", e.dest_id},
                     {"init_step", e.init_step},
                     {"step", e.step},
                     {"hops", e.hops},
                     {"seq", e.seq}};
}

void from_json(const nlohmann::json& j, LedgerEvent& e) {
  e.kind = ledger_kind_from_name(j.at("kind").get<std::string>());
  e.search_id = j.value("search_id", std::uint64_t{0});
  e.origin = j.value("origin", NodeId{0});
  e.dest_id = j.value("dest_id", NodeId{0});
  e.init_step = j.value("init_step", std::uint64_t{0});
  e.step = j.value("step", std::uint64_t{0});
  e.hops = j.value("hops", std::uint32_t{0});
  e.seq = j.value("seq", std::uint64_t{0});
}

void to_json(nlohmann::json& j, const TraceEvent& e) {
  j = nlohmann::json{{"step", e.step}, {"actor", e.actor}, {"kind", e.kind}};
  if (e.message) {
    j["message"] = *e.message;
    j["msg_id"] = e.msg_id;
    j["msg_age"] = e.msg_age;
  }
  j["emitted"] = nlohmann::json::array();
  for (const auto& em : e.emitted)
    j["emitted"].push_back(
        {{"to", em.to}, {"msg_id", em.msg_id}, {"msg", em.msg}});
  j["delta"] = e.delta;
  if (!e.ledger.empty()) j["ledger"] = e.ledger;
}

std::string trace_event_line(const TraceEvent& e) {
  return nlohmann::json(e).dump();
}

void TraceHasher::update(const std::string& line) {
  for (unsigned char c : line) {
    h_ ^= c;
    h_ *= 1099511628211ull;
  }
  h_ ^= '\n';
  h_ *= 1099511628211ull;
}

}  // namespace overnet
