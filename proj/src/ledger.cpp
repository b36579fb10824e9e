// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/ledger.hpp"

namespace overnet {

void SearchLedger::apply(const LedgerEvent& e) {
  if (e.kind == LedgerEvent::Kind::kBatchResolved) {
    auto& best = resolved_seqs_[{e.origin, e.dest_id}];
    if (e.seq > best) best = e.seq;
    return;
  }
  if (e.kind == LedgerEvent::Kind::kViolation) {
    wrong_node_ += 1;
    return;
  }
  auto& rec = records_[e.search_id];
  if (rec.search_id == 0) {
    rec.search_id = e.search_id;
    rec.origin = e.origin;
    rec.dest_id = e.dest_id;
    rec.init_step = e.init_step;
  }
  if (e.kind == LedgerEvent::Kind::kInit) return;
  if (rec.outcome != LedgerOutcome::kPending) return;  // resolved only once
  rec.outcome = e.kind == LedgerEvent::Kind::kSuccess ? LedgerOutcome::kSuccess
                                                      : LedgerOutcome::kFail;
  rec.resolution_step = e.step;
  rec.hops = e.hops;
}

Verdict SearchLedger::monotone() const {
  // The guarantee is ordered by the answer, not the request: once a search
  // for a pair has been ANSWERED successfully, every search for that pair
  // initiated afterwards must succeed. A failure merely initiated after an
  // earlier (still unanswered) request is allowed. Track the earliest
  // successful answer per (origin, dest_id).
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> first_answer;
  for (const auto& [id, r] : records_) {
    if (r.outcome != LedgerOutcome::kSuccess) continue;
    auto [it, inserted] = first_answer.try_emplace({r.origin, r.dest_id},
                                                   r.resolution_step);
    if (!inserted && r.resolution_step < it->second)
      it->second = r.resolution_step;
  }
  for (const auto& [id, r] : records_) {
    if (r.outcome != LedgerOutcome::kFail) continue;
    auto it = first_answer.find({r.origin, r.dest_id});
    if (it != first_answer.end() && r.init_step > it->second)
      return {"monotonic", false,
              "search " + std::to_string(r.search_id) + " (" +
                  std::to_string(r.origin) + " -> " +
                  std::to_string(r.dest_id) + ", initiated at step " +
                  std::to_string(r.init_step) +
                  ") failed although a search was answered successfully at "
                  "step " +
                  std::to_string(it->second)};
  }
  return {"monotonic", true, ""};
}

std::size_t SearchLedger::count(LedgerOutcome o) const {
  std::size_t c = 0;
  for (const auto& [id, r] : records_)
    if (r.outcome == o) c += 1;
  return c;
}

}  // namespace overnet
