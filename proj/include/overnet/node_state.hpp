// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_NODE_STATE_HPP_
#define OVERNET_NODE_STATE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "overnet/ids.hpp"
#include "overnet/message.hpp"

namespace overnet {

enum class EdgeKind { kStable, kTemporary };

// One explicit edge held by a node. `instance` identifies this particular
// reference instance across reclassifications; the oracle uses it to check
// that an instance a node demoted to temporary is never promoted back.
struct EdgeRecord {
  NodeId target = 0;
  EdgeKind kind = EdgeKind::kStable;
  std::optional<OriginTag> origin;
  std::uint64_t instance = 0;
  // 1 + step of the most recent delegate-req for this temporary (0 = none
  // sent yet). Channels never lose messages, so re-requesting on every
  // timeout only floods the network; the timeout action instead retries on a
  // fixed interval, which still recovers from any initial state.
  std::uint64_t req_epoch = 0;

  bool operator==(const EdgeRecord&) const = default;
};

// Per-neighbor delegation sequence numbers. Absent entries read as 0;
// entries never decrease over a node's lifetime.
struct EseqTable {
  std::map<NodeId, std::uint64_t> entries;

  std::uint64_t get(NodeId v) const {
    auto it = entries.find(v);
    return it == entries.end() ? 0 : it->second;
  }
  // Raises the entry to `value` if larger; lowering is not representable.
  void raise(NodeId v, std::uint64_t value) {
    auto& e = entries[v];
    if (value > e) e = value;
  }
};

struct SearchBuffers {
  // WaitingFor[dest_id]: searches buffered until the probe for dest_id
  // resolves. Each entry is a full search message (carries its ledger id).
  std::map<NodeId, std::vector<Message>> waiting_for;
  // seq[dest_id]; monotonically non-decreasing.
  std::map<NodeId, std::uint64_t> seq_table;
  // 1 + step of the most recent probe initiated per destination while the
  // batch is open (0 = none yet). Probes cannot get lost, so initiating one
  // on every timeout only multiplies traffic; the timeout action retries on
  // an exponentially backed-off interval instead. Cleared when the batch
  // resolves.
  std::map<NodeId, std::uint64_t> probe_epoch;
  // Probes initiated for the open batch, driving the backoff.
  std::map<NodeId, std::uint32_t> probe_tries;
  std::uint64_t global_seq = 0;

  std::uint64_t seq(NodeId dest_id) const {
    auto it = seq_table.find(dest_id);
    return it == seq_table.end() ? 0 : it->second;
  }
};

// A node's entire local memory: the list neighborhood (stable left/right plus
// temporaries slated for delegation), the eseq table and the search state.
struct NodeState {
  NodeId id = 0;

  std::optional<EdgeRecord> left;   // stable, largest id < id
  std::optional<EdgeRecord> right;  // stable, smallest id > id
  std::vector<EdgeRecord> temporaries;

  EseqTable eseq;
  SearchBuffers search;

  std::uint64_t last_timeout_step = 0;
  // 1 + step of the most recent keep-alive round (0 = none yet). Neighbor
  // introductions cannot get lost, so sending them on every timeout mostly
  // burns delivery capacity; the timeout action refreshes them on a fixed
  // interval instead.
  std::uint64_t keepalive_epoch = 0;

  bool has_explicit_edge(NodeId target) const;
  // All explicit neighbors (stable and temporary), sorted, deduplicated.
  std::vector<NodeId> explicit_neighbors() const;
  std::vector<NodeId> stable_neighbors() const;
  // Stable neighbor on the side of `subject`, if any.
  std::optional<NodeId> side_neighbor(NodeId subject) const;
};

void to_json(nlohmann::json& j, const NodeState& s);
void from_json(const nlohmann::json& j, NodeState& s);

}  // namespace overnet

#endif  // OVERNET_NODE_STATE_HPP_
