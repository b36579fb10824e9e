// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/node_state.hpp"

#include <algorithm>

namespace overnet {

bool NodeState::has_explicit_edge(NodeId target) const {
  if (left && left->target == target) return true;
  if (right && right->target == target) return true;
  return std::any_of(temporaries.begin(), temporaries.end(),
                     [target](const EdgeRecord& e) { return e.target == target; });
}

std::vector<NodeId> NodeState::explicit_neighbors() const {
  std::vector<NodeId> out;
  if (left) out.push_back(left->target);
  if (right) out.push_back(right->target);
  for (const auto& e : temporaries) out.push_back(e.target);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> NodeState::stable_neighbors() const {
  std::vector<NodeId> out;
  if (left) out.push_back(left->target);
  if (right) out.push_back(right->target);
  return out;
}

std::optional<NodeId> NodeState::side_neighbor(NodeId subject) const {
  if (subject > id) return right ? std::optional(right->target) : std::nullopt;
  if (subject < id) return left ? std::optional(left->target) : std::nullopt;
  return std::nullopt;
}

namespace {

nlohmann::json edge_to_json(const EdgeRecord& e) {
  nlohmann::json j{{"target", e.target},
                   {"kind", e.kind == EdgeKind::kStable ? "stable" : "temporary"},
                   {"instance", e.instance}};
  if (e.req_epoch != 0) j["req_epoch"] = e.req_epoch;
  if (e.origin)
    j["origin"] = {{"action", e.origin->action}, {"subject", e.origin->subject}};
  return j;
}

EdgeRecord edge_from_json(const nlohmann::json& j) {
  EdgeRecord e;
  e.target = j.at("target").get<NodeId>();
  e.kind = j.at("kind").get<std::string>() == "stable" ? EdgeKind::kStable
                                                       : EdgeKind::kTemporary;
  e.instance = j.value("instance", std::uint64_t{0});
  e.req_epoch = j.value("req_epoch", std::uint64_t{0});
  if (j.contains("origin")) {
    OriginTag t;
    t.action = j["origin"].at("action").get<std::string>();
    t.subject = j["origin"].at("subject").get<NodeId>();
    e.origin = t;
  }
  return e;
}

}  // namespace

void to_json(nlohmann::json& j, const NodeState& s) {
  j = nlohmann::json{{"id", s.id}};
  if (s.left) j["left"] = edge_to_json(*s.left);
  if (s.right) j["right"] = edge_to_json(*s.right);
  j["temporaries"] = nlohmann::json::array();
  for (const auto& e : s.temporaries) j["temporaries"].push_back(edge_to_json(e));
  j["eseq"] = nlohmann::json::object();
  for (const auto& [v, n] : s.eseq.entries) j["eseq"][std::to_string(v)] = n;
  j["seq"] = nlohmann::json::object();
  for (const auto& [d, n] : s.search.seq_table) j["seq"][std::to_string(d)] = n;
  if (!s.search.probe_epoch.empty()) {
    j["probe_epoch"] = nlohmann::json::object();
    for (const auto& [d, n] : s.search.probe_epoch)
      j["probe_epoch"][std::to_string(d)] = n;
  }
  if (!s.search.probe_tries.empty()) {
    j["probe_tries"] = nlohmann::json::object();
    for (const auto& [d, n] : s.search.probe_tries)
      j["probe_tries"][std::to_string(d)] = n;
  }
  j["global_seq"] = s.search.global_seq;
  if (s.keepalive_epoch != 0) j["keepalive_epoch"] = s.keepalive_epoch;
  j["waiting_for"] = nlohmann::json::object();
  for (const auto& [d, msgs] : s.search.waiting_for) {
    if (msgs.empty()) continue;
    j["waiting_for"][std::to_string(d)] = msgs;
  }
}

void from_json(const nlohmann::json& j, NodeState& s) {
  s = NodeState{};
  s.id = j.at("id").get<NodeId>();
  if (j.contains("left")) s.left = edge_from_json(j["left"]);
  if (j.contains("right")) s.right = edge_from_json(j["right"]);
  for (const auto& e : j.value("temporaries", nlohmann::json::array()))
    s.temporaries.push_back(edge_from_json(e));
  if (j.contains("eseq"))
    for (auto it = j["eseq"].begin(); it != j["eseq"].end(); ++it)
      s.eseq.entries[std::stoll(it.key())] = it.value().get<std::uint64_t>();
  if (j.contains("seq"))
    for (auto it = j["seq"].begin(); it != j["seq"].end(); ++it)
      s.search.seq_table[std::stoll(it.key())] = it.value().get<std::uint64_t>();
  if (j.contains("probe_epoch"))
    for (auto it = j["probe_epoch"].begin(); it != j["probe_epoch"].end(); ++it)
      s.search.probe_epoch[std::stoll(it.key())] =
          it.value().get<std::uint64_t>();
  if (j.contains("probe_tries"))
    for (auto it = j["probe_tries"].begin(); it != j["probe_tries"].end(); ++it)
      s.search.probe_tries[std::stoll(it.key())] =
          it.value().get<std::uint32_t>();
  s.search.global_seq = j.value("global_seq", std::uint64_t{0});
  s.keepalive_epoch = j.value("keepalive_epoch", std::uint64_t{0});
  if (j.contains("waiting_for"))
    for (auto it = j["waiting_for"].begin(); it != j["waiting_for"].end(); ++it)
      s.search.waiting_for[std::stoll(it.key())] =
          it.value().get<std::vector<Message>>();
}

}  // namespace overnet
