// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/primitives.hpp"

#include <algorithm>

namespace overnet {

namespace {

bool is_stable_neighbor(const NodeState& s, NodeId v) {
  return (s.left && s.left->target == v) || (s.right && s.right->target == v);
}

EdgeRecord* find_temporary(NodeState& s, NodeId target) {
  for (auto& e : s.temporaries)
    if (e.target == target) return &e;
  return nullptr;
}

}  // namespace

bool introduce(NodeState& self, NodeId subject, NodeId target, ProtocolCtx& ctx) {
  if (subject == target) return false;
  const bool holds_subject = subject == self.id || self.has_explicit_edge(subject);
  if (!holds_subject || !self.has_explicit_edge(target)) return false;
  ctx.send(target, make_introduce(subject));
  return true;
}

bool safe_delegate_start(NodeState& self, NodeId subject, NodeId via,
                         ProtocolCtx& ctx) {
  if (!is_stable_neighbor(self, via)) return false;
  EdgeRecord* temp = find_temporary(self, subject);
  if (temp == nullptr) return false;
  const std::uint64_t subject_eseq = self.eseq.get(subject);
  ctx.send(via, make_delegate_req(self.id, subject, subject_eseq, temp->origin));
  self.eseq.raise(via, subject_eseq + 1);
  temp->req_epoch = ctx.step + 1;
  return true;
}

bool plain_delegate(NodeState& self, NodeId subject, NodeId via,
                    ProtocolCtx& ctx) {
  if (ctx.mode != Mode::kNegativeControlIdf) return false;
  if (subject == via || subject == self.id || via == self.id) return false;
  if (!self.has_explicit_edge(subject) || !self.has_explicit_edge(via)) return false;
  // Delete every record of subject, then send the reference onward.
  if (self.left && self.left->target == subject) self.left.reset();
  if (self.right && self.right->target == subject) self.right.reset();
  std::erase_if(self.temporaries,
                [subject](const EdgeRecord& e) { return e.target == subject; });
  ctx.send(via, make_impl_delegate(subject, std::nullopt));
  return true;
}

std::optional<EdgeRecord> fuse_records(const EdgeRecord& a, const EdgeRecord& b) {
  if (a.target != b.target) return std::nullopt;
  if (a.kind == EdgeKind::kStable) return a;
  if (b.kind == EdgeKind::kStable) return b;
  return a;
}

void fuse_duplicates(NodeState& self) {
  std::erase_if(self.temporaries, [&self](const EdgeRecord& e) {
    return (self.left && self.left->target == e.target) ||
           (self.right && self.right->target == e.target);
  });
  std::vector<EdgeRecord> kept;
  for (const auto& e : self.temporaries) {
    auto it = std::find_if(kept.begin(), kept.end(), [&e](const EdgeRecord& k) {
      return k.target == e.target;
    });
    if (it == kept.end()) kept.push_back(e);
  }
  self.temporaries = std::move(kept);
}

bool add_temporary(NodeState& self, EdgeRecord record) {
  record.kind = EdgeKind::kTemporary;
  if (self.has_explicit_edge(record.target)) return false;  // fused away
  self.temporaries.push_back(std::move(record));
  return true;
}

}  // namespace overnet
