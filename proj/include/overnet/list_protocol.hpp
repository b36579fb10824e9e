// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_LIST_PROTOCOL_HPP_
#define OVERNET_LIST_PROTOCOL_HPP_

#include <optional>

#include "overnet/protocol.hpp"

namespace overnet {

// How a reference reached the node. Delegated arrivals are already explicit
// (Safe-Delegation added the edge before the triggered action runs); implicit
// arrivals may be kept or forwarded without ever becoming explicit.
enum class Arrival { kImplicit, kExplicitDelegated };

// Stable neighbor on subject's side, i.e. the node a reference of `subject`
// is delegated to. Every hop strictly decreases |id - subject|.
std::optional<NodeId> delegation_target(const NodeState& self, NodeId subject);

// The list classification rule: keep the reference as the new stable
// left/right neighbor if it is strictly closer than the current one (the
// displaced neighbor turns temporary, is safe-delegated toward the new
// neighbor and introduced to it); otherwise hold it as temporary (explicit
// arrival) or forward it one hop (implicit arrival).
void list_on_reference(NodeState& self, NodeId subject, Arrival arrival,
                       std::optional<OriginTag> origin, ProtocolCtx& ctx);

// Timeout maintenance: keep-alive introductions to both stable neighbors and
// one delegate-req per temporary edge.
void list_timeout(NodeState& self, ProtocolCtx& ctx);

void on_delegate_req(NodeState& self, const Message& msg, ProtocolCtx& ctx);
void on_delegate_ack(NodeState& self, const Message& msg, ProtocolCtx& ctx);
void on_impl_delegate(NodeState& self, const Message& msg, ProtocolCtx& ctx);

// Negative-control counterparts built on plain Delegation.
void idf_on_reference(NodeState& self, NodeId subject, ProtocolCtx& ctx);
void idf_timeout(NodeState& self, ProtocolCtx& ctx);

}  // namespace overnet

#endif  // OVERNET_LIST_PROTOCOL_HPP_
