// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/message.hpp"

#include <stdexcept>

namespace overnet {

const char* msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::kIntroduce: return "introduce";
    case MsgKind::kDelegateReq: return "delegate-req";
    case MsgKind::kDelegateAck: return "delegate-ack";
    case MsgKind::kImplDelegate: return "impl-delegate";
    case MsgKind::kProbe: return "probe";
    case MsgKind::kFastProbe: return "fastprobe";
    case MsgKind::kPSuccess: return "psuccess";
    case MsgKind::kPFail: return "pfail";
    case MsgKind::kSearch: return "search";
  }
  return "?";
}

MsgKind msg_kind_from_name(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(MsgKind::kSearch); ++k) {
    if (name == msg_kind_name(static_cast<MsgKind>(k)))
      return static_cast<MsgKind>(k);
  }
  throw std::invalid_argument("unknown message kind: " + name);
}

std::vector<NodeId> embedded_references(const Message& m) {
  switch (m.kind) {
    case MsgKind::kIntroduce:
    case MsgKind::kDelegateAck:
    case MsgKind::kImplDelegate:
      return {m.subject};
    case MsgKind::kDelegateReq:
      return {m.sender, m.subject};
    case MsgKind::kProbe: {
      std::vector<NodeId> refs = m.next;
      refs.push_back(m.source);
      return refs;
    }
    case MsgKind::kFastProbe:
      return {m.source};
    case MsgKind::kPSuccess:
      return {m.dest};
    case MsgKind::kPFail:
      return {};
    case MsgKind::kSearch:
      return {m.origin_node};
  }
  return {};
}

bool is_search_protocol_msg(const Message& m) {
  switch (m.kind) {
    case MsgKind::kProbe:
    case MsgKind::kFastProbe:
    case MsgKind::kPSuccess:
    case MsgKind::kPFail:
    case MsgKind::kSearch:
      return true;
    default:
      return false;
  }
}

void to_json(nlohmann::json& j, const Message& m) {
  j = nlohmann::json{{"kind", msg_kind_name(m.kind)}};
  if (m.origin) {
    j["origin"] = {{"action", m.origin->action}, {"subject", m.origin->subject}};
  }
  switch (m.kind) {
    case MsgKind::kIntroduce:
    case MsgKind::kImplDelegate:
      j["subject"] = m.subject;
      break;
    case MsgKind::kDelegateReq:
      j["sender"] = m.sender;
      j["subject"] = m.subject;
      j["eseq"] = m.eseq;
      break;
    case MsgKind::kDelegateAck:
      j["subject"] = m.subject;
      j["eseq"] = m.eseq;
      break;
    case MsgKind::kProbe:
      j["source"] = m.source;
      j["dest_id"] = m.dest_id;
      j["next"] = m.next;
      j["seq"] = m.seq;
      j["forwarded"] = m.forwarded;
      j["hops"] = m.hops;
      break;
    case MsgKind::kFastProbe:
      j["source"] = m.source;
      j["dest_id"] = m.dest_id;
      j["hops"] = m.hops;
      break;
    case MsgKind::kPSuccess:
      j["dest_id"] = m.dest_id;
      j["dest"] = m.dest;
      j["hops"] = m.hops;
      break;
    case MsgKind::kPFail:
      j["dest_id"] = m.dest_id;
      j["seq"] = m.seq;
      break;
    case MsgKind::kSearch:
      j["origin"] = m.origin_node;
      j["dest_id"] = m.dest_id;
      j["search_id"] = m.search_id;
      j["init_step"] = m.init_step;
      j["hops"] = m.hops;
      break;
  }
}

void from_json(const nlohmann::json& j, Message& m) {
  m = Message{};
  m.kind = msg_kind_from_name(j.at("kind").get<std::string>());
  if (m.kind != MsgKind::kSearch && j.contains("origin")) {
    OriginTag t;
    t.action = j["origin"].at("action").get<std::string>();
    t.subject = j["origin"].at("subject").get<NodeId>();
    m.origin = t;
  }
  auto get = [&j](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  get("subject", m.subject);
  get("sender", m.sender);
  get("eseq", m.eseq);
  get("source", m.source);
  get("dest_id", m.dest_id);
  get("next", m.next);
  get("seq", m.seq);
  get("dest", m.dest);
  get("forwarded", m.forwarded);
  get("search_id", m.search_id);
  get("init_step", m.init_step);
  get("hops", m.hops);
  if (m.kind == MsgKind::kSearch) get("origin", m.origin_node);
}

Message make_introduce(NodeId subject) {
  Message m;
  m.kind = MsgKind::kIntroduce;
  m.subject = subject;
  return m;
}

Message make_delegate_req(NodeId sender, NodeId subject, std::uint64_t eseq,
                          std::optional<OriginTag> origin) {
  Message m;
  m.kind = MsgKind::kDelegateReq;
  m.sender = sender;
  m.subject = subject;
  m.eseq = eseq;
  m.origin = std::move(origin);
  return m;
}

Message make_delegate_ack(NodeId subject, std::uint64_t eseq,
                          std::optional<OriginTag> origin) {
  Message m;
  m.kind = MsgKind::kDelegateAck;
  m.subject = subject;
  m.eseq = eseq;
  m.origin = std::move(origin);
  return m;
}

Message make_impl_delegate(NodeId subject, std::optional<OriginTag> origin) {
  Message m;
  m.kind = MsgKind::kImplDelegate;
  m.subject = subject;
  m.origin = std::move(origin);
  return m;
}

}  // namespace overnet
