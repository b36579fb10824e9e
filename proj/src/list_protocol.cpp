// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/list_protocol.hpp"

#include <algorithm>

#include "overnet/primitives.hpp"

namespace overnet {

namespace {

// How long (in steps) a node waits for a delegate-ack before the timeout
// action re-requests the delegation of a temporary edge.
constexpr std::uint64_t kDelegateRetryInterval = 256;

// A node re-introduces itself to its stable neighbors every
// ctx.keepalive_interval steps. One action delivers at most one message per
// step, so the interval has to stay large against the number of nodes or the
// keep-alive traffic alone saturates the system.
bool keepalive_due(NodeState& self, const ProtocolCtx& ctx) {
  if (self.keepalive_epoch != 0 &&
      ctx.step + 1 < self.keepalive_epoch + ctx.keepalive_interval)
    return false;
  self.keepalive_epoch = ctx.step + 1;
  return true;
}

const char* side_action(const NodeState& self, NodeId subject) {
  return subject > self.id ? "delegate-right" : "delegate-left";
}

EdgeRecord* find_temporary(NodeState& s, NodeId target) {
  for (auto& e : s.temporaries)
    if (e.target == target) return &e;
  return nullptr;
}

void erase_temporary(NodeState& s, std::uint64_t instance) {
  std::erase_if(s.temporaries,
                [instance](const EdgeRecord& e) { return e.instance == instance; });
}

}  // namespace

std::optional<NodeId> delegation_target(const NodeState& self, NodeId subject) {
  return self.side_neighbor(subject);
}

void list_on_reference(NodeState& self, NodeId subject, Arrival arrival,
                       std::optional<OriginTag> origin, ProtocolCtx& ctx) {
  if (subject == self.id) return;            // fused with the trivial self ref
  if (self.has_explicit_edge(subject)) return;  // fusion with existing record
  auto& side = subject > self.id ? self.right : self.left;

  if (!side || dist(subject, self.id) < dist(side->target, self.id)) {
    std::optional<EdgeRecord> displaced;
    if (side) displaced = *side;
    side = EdgeRecord{subject, EdgeKind::kStable, std::nullopt,
                      ctx.alloc_instance()};
    if (displaced) {
      // The old neighbor keeps its reference instance but turns temporary;
      // it is delegated toward the new neighbor, which sits strictly between
      // the two, and introduced to it.
      EdgeRecord t = *displaced;
      t.kind = EdgeKind::kTemporary;
      t.origin = OriginTag{side_action(self, displaced->target), displaced->target};
      if (add_temporary(self, std::move(t))) {
        introduce(self, displaced->target, subject, ctx);
        safe_delegate_start(self, displaced->target, subject, ctx);
      }
    }
    return;
  }

  if (arrival == Arrival::kExplicitDelegated) {
    EdgeRecord t{subject, EdgeKind::kTemporary,
                 OriginTag{side_action(self, subject), subject},
                 ctx.alloc_instance()};
    if (add_temporary(self, std::move(t)))
      safe_delegate_start(self, subject, side->target, ctx);
  } else {
    // Implicit references are forwarded one hop toward the subject without
    // touching local state.
    if (!origin) origin = OriginTag{side_action(self, subject), subject};
    ctx.send(side->target, make_impl_delegate(subject, origin));
  }
}

void list_timeout(NodeState& self, ProtocolCtx& ctx) {
  fuse_duplicates(self);
  if (keepalive_due(self, ctx)) {
    if (self.left) introduce(self, self.id, self.left->target, ctx);
    if (self.right) introduce(self, self.id, self.right->target, ctx);
  }

  const std::vector<EdgeRecord> temps = self.temporaries;
  for (const auto& temp : temps) {
    if (find_temporary(self, temp.target) == nullptr) continue;
    auto via = delegation_target(self, temp.target);
    if (via) {
      if (temp.req_epoch == 0 ||
          ctx.step + 1 >= temp.req_epoch + kDelegateRetryInterval)
        safe_delegate_start(self, temp.target, *via, ctx);
    } else {
      // Bootstrap: nothing to delegate to on that side yet, so the reference
      // is re-presented and becomes the stable neighbor itself.
      erase_temporary(self, temp.instance);
      list_on_reference(self, temp.target, Arrival::kExplicitDelegated,
                        temp.origin, ctx);
    }
  }
}

void on_delegate_req(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  self.eseq.raise(msg.subject, msg.eseq + 1);
  ctx.send(msg.sender, make_delegate_ack(msg.subject, msg.eseq, msg.origin));
  if (msg.subject == self.id) return;  // degenerate self edge, fused trivially
  list_on_reference(self, msg.subject, Arrival::kExplicitDelegated, msg.origin,
                    ctx);
}

void on_delegate_ack(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  const NodeId w = msg.subject;
  EdgeRecord* temp = find_temporary(self, w);
  if (temp != nullptr && msg.eseq == self.eseq.get(w)) {
    auto via = delegation_target(self, w);
    if (via) {
      auto origin = temp->origin;
      erase_temporary(self, temp->instance);
      ctx.send(*via, make_impl_delegate(w, origin));
      return;
    }
  }
  // Stale eseq, a non-temporary edge (corrupt start) or no delegation target:
  // act as upon receipt of an impl-delegate for w.
  list_on_reference(self, w, Arrival::kImplicit, msg.origin, ctx);
}

void on_impl_delegate(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  list_on_reference(self, msg.subject, Arrival::kImplicit, msg.origin, ctx);
}

void idf_on_reference(NodeState& self, NodeId subject, ProtocolCtx& ctx) {
  if (subject == self.id) return;
  if (self.has_explicit_edge(subject)) return;
  auto& side = subject > self.id ? self.right : self.left;
  if (!side || dist(subject, self.id) < dist(side->target, self.id)) {
    std::optional<EdgeRecord> displaced;
    if (side) displaced = *side;
    side = EdgeRecord{subject, EdgeKind::kStable, std::nullopt,
                      ctx.alloc_instance()};
    if (displaced) {
      EdgeRecord t = *displaced;
      t.kind = EdgeKind::kTemporary;
      if (add_temporary(self, std::move(t))) {
        introduce(self, displaced->target, subject, ctx);
        plain_delegate(self, displaced->target, subject, ctx);
      }
    }
  } else {
    ctx.send(side->target, make_impl_delegate(subject, std::nullopt));
  }
}

void idf_timeout(NodeState& self, ProtocolCtx& ctx) {
  fuse_duplicates(self);
  if (keepalive_due(self, ctx)) {
    if (self.left) introduce(self, self.id, self.left->target, ctx);
    if (self.right) introduce(self, self.id, self.right->target, ctx);
  }
  const std::vector<EdgeRecord> temps = self.temporaries;
  for (const auto& temp : temps) {
    if (find_temporary(self, temp.target) == nullptr) continue;
    auto via = delegation_target(self, temp.target);
    if (via) {
      plain_delegate(self, temp.target, *via, ctx);
    } else {
      erase_temporary(self, temp.instance);
      idf_on_reference(self, temp.target, ctx);
    }
  }
}

}  // namespace overnet
