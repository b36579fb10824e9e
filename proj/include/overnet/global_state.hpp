// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_GLOBAL_STATE_HPP_
#define OVERNET_GLOBAL_STATE_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "overnet/node_state.hpp"

namespace overnet {

// One message at rest in a channel. Channels are unordered multisets; the
// entry index carries no delivery-order meaning. `deadline` is the aging-fair
// delivery bound fixed at send time.
struct ChannelEntry {
  std::uint64_t msg_id = 0;
  std::uint64_t send_step = 0;
  std::uint64_t pending_at_send = 0;
  std::uint64_t deadline = 0;
  Message msg;
};

// The whole system: every node's local state plus every channel. A plain
// value; copying it snapshots the system.
struct GlobalState {
  std::map<NodeId, NodeState> nodes;
  std::map<NodeId, std::vector<ChannelEntry>> channels;
  std::uint64_t step = 0;
  std::uint64_t next_msg_id = 1;
  std::uint64_t next_edge_instance = 1;
  std::uint64_t next_search_id = 1;

  std::size_t pending_messages() const {
    std::size_t n = 0;
    for (const auto& [id, ch] : channels) n += ch.size();
    return n;
  }
};

void to_json(nlohmann::json& j, const GlobalState& s);
void from_json(const nlohmann::json& j, GlobalState& s);

}  // namespace overnet

#endif  // OVERNET_GLOBAL_STATE_HPP_
