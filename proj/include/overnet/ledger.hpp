// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_LEDGER_HPP_
#define OVERNET_LEDGER_HPP_

#include <map>
#include <vector>

#include "overnet/oracle.hpp"
#include "overnet/trace.hpp"

namespace overnet {

// Resolution record of one search request.
struct SearchRecord {
  std::uint64_t search_id = 0;
  NodeId origin = 0;
  NodeId dest_id = 0;
  std::uint64_t init_step = 0;
  LedgerOutcome outcome = LedgerOutcome::kPending;
  std::uint64_t resolution_step = 0;
  std::uint32_t hops = 0;
};

// Accumulates the per-search ledger events of a run and answers the
// monotonicity question: a search that once succeeded for a given
// (origin, destination) pair must never be followed by a later-initiated
// search for the same pair that fails.
class SearchLedger {
 public:
  void apply(const LedgerEvent& e);

  Verdict monotone() const;

  const std::map<std::uint64_t, SearchRecord>& records() const {
    return records_;
  }
  // Batch resolutions seen per (origin, dest_id): highest resolved seq.
  const std::map<std::pair<NodeId, NodeId>, std::uint64_t>& resolved_seqs()
      const {
    return resolved_seqs_;
  }

  std::size_t total() const { return records_.size(); }
  std::size_t succeeded() const { return count(LedgerOutcome::kSuccess); }
  std::size_t failed() const { return count(LedgerOutcome::kFail); }
  std::size_t unresolved() const { return count(LedgerOutcome::kPending); }
  // Searches delivered at a node whose id is not the searched id; possible
  // only with corrupted initial messages.
  std::size_t wrong_node_deliveries() const { return wrong_node_; }

 private:
  std::size_t count(LedgerOutcome o) const;

  std::map<std::uint64_t, SearchRecord> records_;
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> resolved_seqs_;
  std::size_t wrong_node_ = 0;
};

}  // namespace overnet

#endif  // OVERNET_LEDGER_HPP_
