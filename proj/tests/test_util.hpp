// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_TESTS_TEST_UTIL_HPP_
#define OVERNET_TESTS_TEST_UTIL_HPP_

#include <vector>

#include "overnet/global_state.hpp"
#include "overnet/protocol.hpp"

namespace overnet::testutil {

// Protocol context wired to local counters, for driving handlers directly.
struct CtxHarness {
  std::uint64_t next_instance = 100;
  std::uint64_t next_search_id = 1;
  ProtocolCtx ctx;

  explicit CtxHarness(Mode mode = Mode::kIsf, std::uint64_t step = 0) {
    ctx.mode = mode;
    ctx.step = step;
    ctx.next_edge_instance = &next_instance;
    ctx.next_search_id = &next_search_id;
  }

  // Emissions of a given kind, in emission order.
  std::vector<Emission> emitted(MsgKind kind) const {
    std::vector<Emission> out;
    for (const auto& e : ctx.emissions)
      if (e.msg.kind == kind) out.push_back(e);
    return out;
  }
};

inline EdgeRecord stable_edge(NodeId target, std::uint64_t instance) {
  return {target, EdgeKind::kStable, std::nullopt, instance};
}

inline EdgeRecord temp_edge(NodeId target, std::uint64_t instance) {
  return {target, EdgeKind::kTemporary, std::nullopt, instance};
}

// A node already embedded in a sorted list: left/right stable neighbors.
inline NodeState list_node(NodeId id, std::optional<NodeId> left,
                           std::optional<NodeId> right) {
  NodeState n;
  n.id = id;
  std::uint64_t inst = 1;
  if (left) n.left = stable_edge(*left, inst++);
  if (right) n.right = stable_edge(*right, inst++);
  return n;
}

// Perfect sorted list over `ids` (must be sorted ascending).
inline GlobalState list_state(const std::vector<NodeId>& ids) {
  GlobalState s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto left = i > 0 ? std::optional<NodeId>(ids[i - 1]) : std::nullopt;
    auto right =
        i + 1 < ids.size() ? std::optional<NodeId>(ids[i + 1]) : std::nullopt;
    NodeState n = list_node(ids[i], left, right);
    if (n.left) n.left->instance = s.next_edge_instance++;
    if (n.right) n.right->instance = s.next_edge_instance++;
    s.nodes[ids[i]] = std::move(n);
  }
  return s;
}

// Puts a message into a channel with a far-away delivery deadline.
inline std::uint64_t put_message(GlobalState& s, NodeId to, Message m) {
  ChannelEntry e;
  e.msg_id = s.next_msg_id++;
  e.send_step = s.step;
  e.pending_at_send = s.pending_messages();
  e.deadline = s.step + 1000000;
  e.msg = std::move(m);
  s.channels[to].push_back(e);
  return e.msg_id;
}

}  // namespace overnet::testutil

#endif  // OVERNET_TESTS_TEST_UTIL_HPP_
