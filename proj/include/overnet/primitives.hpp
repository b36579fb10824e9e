// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_PRIMITIVES_HPP_
#define OVERNET_PRIMITIVES_HPP_

#include <optional>

#include "overnet/protocol.hpp"

namespace overnet {

// Introduction: self sends a copy of subject's reference to target while
// keeping its own. Self-introduction (subject == self.id) is allowed.
// Returns false if self lacks either reference or subject == target.
bool introduce(NodeState& self, NodeId subject, NodeId target, ProtocolCtx& ctx);

// First half of Safe-Delegation for the temporary edge (self, subject):
// emits delegate-req(self, subject, eseq[subject]) to `via` and raises
// eseq[via] to at least eseq[subject] + 1. The edge stays explicit until the
// matching ack arrives. Requires (self, via) stable and (self, subject)
// temporary.
bool safe_delegate_start(NodeState& self, NodeId subject, NodeId via,
                         ProtocolCtx& ctx);

// Plain Delegation from the original primitive set: sends subject's reference
// to `via` and deletes it immediately. Kept only for the negative-control
// mode; rejected in ISF mode.
bool plain_delegate(NodeState& self, NodeId subject, NodeId via,
                    ProtocolCtx& ctx);

// Fusion of two records for the same target; stable wins over temporary.
// Returns nullopt if the targets differ.
std::optional<EdgeRecord> fuse_records(const EdgeRecord& a, const EdgeRecord& b);

// Fuses duplicate temporaries and temporaries shadowed by a stable edge.
void fuse_duplicates(NodeState& self);

// Adds a temporary record, fusing with an existing record for the same
// target. Returns true if the record was actually added.
bool add_temporary(NodeState& self, EdgeRecord record);

}  // namespace overnet

#endif  // OVERNET_PRIMITIVES_HPP_
