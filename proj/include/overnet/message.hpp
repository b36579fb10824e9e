// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_MESSAGE_HPP_
#define OVERNET_MESSAGE_HPP_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "overnet/ids.hpp"

namespace overnet {

enum class MsgKind {
  kIntroduce,     // introduce(subject): sender keeps its own reference
  kDelegateReq,   // delegate-req(sender, subject, eseq)
  kDelegateAck,   // delegate-ack(subject, eseq)
  kImplDelegate,  // impl-delegate(subject): an implicit edge in transit
  kProbe,         // probe(source, dest_id, next, seq); `forwarded` marks hops
  kFastProbe,     // fastprobe(source, dest_id), greedy-routed, droppable
  kPSuccess,      // psuccess(dest_id, dest)
  kPFail,         // pfail(dest_id, seq)
  kSearch,        // search(origin, dest_id), sent only after a psuccess
};

const char* msg_kind_name(MsgKind k);
MsgKind msg_kind_from_name(const std::string& name);

// Marker carried by Safe-Delegation messages and temporary edges so the
// delegation can be traced back to the topology action that caused it.
struct OriginTag {
  std::string action;  // e.g. "delegate-right" / "delegate-left"
  NodeId subject = 0;  // payload of the original delegation

  bool operator==(const OriginTag&) const = default;
};

// Tagged union over every protocol message. One struct with per-kind fields
// keeps (de)serialization and channel bookkeeping uniform; only the fields
// listed for a kind are meaningful.
struct Message {
  MsgKind kind = MsgKind::kIntroduce;

  NodeId subject = 0;               // introduce / delegate-* / impl-delegate
  NodeId sender = 0;                // delegate-req
  std::uint64_t eseq = 0;           // delegate-req / delegate-ack
  std::optional<OriginTag> origin;  // safe-delegation bookkeeping

  NodeId source = 0;               // probe / fastprobe
  NodeId dest_id = 0;              // probe / fastprobe / psuccess / pfail / search
  std::vector<NodeId> next;        // probe
  std::uint64_t seq = 0;           // probe / pfail
  NodeId dest = 0;                 // psuccess
  bool forwarded = false;          // probe: false only for the initiating hop
  NodeId origin_node = 0;          // search
  std::uint64_t search_id = 0;     // search: ledger key
  std::uint64_t init_step = 0;     // search: initiation step (ledger order)
  std::uint32_t hops = 0;          // probe / fastprobe / psuccess / search
};

// References embedded in the message; these are the implicit edges a channel
// holding this message contributes to NG.
std::vector<NodeId> embedded_references(const Message& m);

bool is_search_protocol_msg(const Message& m);

void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);

Message make_introduce(NodeId subject);
Message make_delegate_req(NodeId sender, NodeId subject, std::uint64_t eseq,
                          std::optional<OriginTag> origin);
Message make_delegate_ack(NodeId subject, std::uint64_t eseq,
                          std::optional<OriginTag> origin);
Message make_impl_delegate(NodeId subject, std::optional<OriginTag> origin);

}  // namespace overnet

#endif  // OVERNET_MESSAGE_HPP_
