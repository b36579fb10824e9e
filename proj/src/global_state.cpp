// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/global_state.hpp"

namespace overnet {

static void to_json(nlohmann::json& j, const ChannelEntry& e) {
  j = nlohmann::json{{"msg_id", e.msg_id},
                     {"send_step", e.send_step},
                     {"pending_at_send", e.pending_at_send},
                     {"deadline", e.deadline},
                     {"msg", e.msg}};
}

static void from_json(const nlohmann::json& j, ChannelEntry& e) {
  j.at("msg_id").get_to(e.msg_id);
  j.at("send_step").get_to(e.send_step);
  j.at("pending_at_send").get_to(e.pending_at_send);
  j.at("deadline").get_to(e.deadline);
  j.at("msg").get_to(e.msg);
}

void to_json(nlohmann::json& j, const GlobalState& s) {
  j = nlohmann::json::object();
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& [id, n] : s.nodes) nodes.push_back(n);
  auto& channels = j["channels"] = nlohmann::json::object();
  for (const auto& [id, ch] : s.channels) {
    if (ch.empty()) continue;
    channels[std::to_string(id)] = ch;
  }
  j["step"] = s.step;
  j["next_msg_id"] = s.next_msg_id;
  j["next_edge_instance"] = s.next_edge_instance;
  j["next_search_id"] = s.next_search_id;
}

void from_json(const nlohmann::json& j, GlobalState& s) {
  s = GlobalState{};
  for (const auto& jn : j.at("nodes")) {
    NodeState n = jn.get<NodeState>();
    s.nodes[n.id] = std::move(n);
  }
  if (j.contains("channels")) {
    for (const auto& [key, jch] : j.at("channels").items()) {
      s.channels[std::stoll(key)] =
          jch.get<std::vector<ChannelEntry>>();
    }
  }
  s.step = j.value("step", std::uint64_t{0});
  s.next_msg_id = j.value("next_msg_id", std::uint64_t{1});
  s.next_edge_instance = j.value("next_edge_instance", std::uint64_t{1});
  s.next_search_id = j.value("next_search_id", std::uint64_t{1});
}

}  // namespace overnet
