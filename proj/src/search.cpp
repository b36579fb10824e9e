// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/search.hpp"

#include <algorithm>

namespace overnet {

namespace {

// The wait before the timeout action initiates another probe for the same
// open destination doubles per retry: a probe crosses the network one
// delivery at a time, so under congestion retries must thin out or they feed
// the very backlog that delayed the response.
constexpr std::uint32_t kProbeRetryMaxDoublings = 5;

std::uint64_t probe_retry_interval(std::uint64_t base, std::uint32_t tries) {
  return base << std::min(tries == 0 ? 0 : tries - 1, kProbeRetryMaxDoublings);
}

std::vector<NodeId> closer_neighbors(const NodeState& self, NodeId dest_id) {
  std::vector<NodeId> out;
  const auto own = dist(self.id, dest_id);
  for (NodeId w : self.explicit_neighbors())
    if (dist(w, dest_id) < own) out.push_back(w);
  return out;
}

// Member of `next` with maximum distance to dest_id; ties break toward the
// smaller id so replays are deterministic.
NodeId argmax_dist(const std::vector<NodeId>& next, NodeId dest_id) {
  NodeId best = next.front();
  for (NodeId w : next)
    if (dist(w, dest_id) > dist(best, dest_id)) best = w;
  return best;
}

std::optional<NodeId> greedy_stable_hop(const NodeState& self, NodeId dest_id) {
  const auto own = dist(self.id, dest_id);
  std::optional<NodeId> best;
  for (NodeId w : self.stable_neighbors()) {
    if (dist(w, dest_id) >= own) continue;
    if (!best || dist(w, dest_id) < dist(*best, dest_id)) best = w;
  }
  return best;
}

LedgerEvent search_event(LedgerEvent::Kind kind, const Message& m,
                         std::uint64_t step) {
  LedgerEvent e;
  e.kind = kind;
  e.search_id = m.search_id;
  e.origin = m.origin_node;
  e.dest_id = m.dest_id;
  e.init_step = m.init_step;
  e.step = step;
  e.hops = m.hops;
  return e;
}

void drop_batch(NodeState& self, NodeId dest_id, ProtocolCtx& ctx) {
  auto& buf = self.search.waiting_for[dest_id];
  for (const auto& m : buf)
    ctx.ledger.push_back(search_event(LedgerEvent::Kind::kFail, m, ctx.step));
  LedgerEvent batch;
  batch.kind = LedgerEvent::Kind::kBatchResolved;
  batch.origin = self.id;
  batch.dest_id = dest_id;
  batch.step = ctx.step;
  batch.seq = self.search.seq(dest_id);
  ctx.ledger.push_back(batch);
  buf.clear();
  self.search.seq_table[dest_id] = self.search.seq(dest_id) + 1;
  self.search.probe_epoch.erase(dest_id);
  self.search.probe_tries.erase(dest_id);
}

}  // namespace

void init_search(NodeState& self, NodeId dest_id, ProtocolCtx& ctx) {
  Message m;
  m.kind = MsgKind::kSearch;
  m.origin_node = self.id;
  m.dest_id = dest_id;
  m.search_id = ctx.alloc_search_id();
  m.init_step = ctx.step;
  ctx.ledger.push_back(search_event(LedgerEvent::Kind::kInit, m, ctx.step));

  if (dest_id == self.id) {
    // Degenerate self-search: delivered locally without probing.
    ctx.ledger.push_back(search_event(LedgerEvent::Kind::kSuccess, m, ctx.step));
    return;
  }

  auto& buf = self.search.waiting_for[dest_id];
  const bool was_empty = buf.empty();
  if (was_empty) {
    self.search.global_seq += 1;
    self.search.seq_table[dest_id] = self.search.global_seq;
  }
  buf.push_back(m);

  if (was_empty && ctx.fastprobe_enabled) {
    if (auto hop = greedy_stable_hop(self, dest_id)) {
      Message fp;
      fp.kind = MsgKind::kFastProbe;
      fp.source = self.id;
      fp.dest_id = dest_id;
      ctx.send(*hop, fp);
      // A probe for this destination is now in flight, so the slow probe is
      // deferred by one retry interval; it only fires if the fast probe got
      // stuck.
      self.search.probe_epoch[dest_id] = ctx.step + 1;
    }
  }
}

void probe_timeout(NodeState& self, ProtocolCtx& ctx) {
  std::vector<NodeId> pending;
  for (const auto& [d, buf] : self.search.waiting_for)
    if (!buf.empty()) pending.push_back(d);

  for (NodeId dest_id : pending) {
    const auto next = closer_neighbors(self, dest_id);
    if (next.empty()) {
      // No strictly closer neighbor: resolving locally is observationally a
      // pfail addressed to ourselves.
      drop_batch(self, dest_id, ctx);
      continue;
    }
    const std::uint64_t epoch = self.search.probe_epoch[dest_id];
    if (epoch != 0 &&
        ctx.step + 1 < epoch + probe_retry_interval(
                                   ctx.probe_retry_interval,
                                   self.search.probe_tries[dest_id]))
      continue;
    Message p;
    p.kind = MsgKind::kProbe;
    p.source = self.id;
    p.dest_id = dest_id;
    p.next = next;
    p.seq = self.search.seq(dest_id);
    ctx.send(argmax_dist(next, dest_id), p);
    self.search.probe_epoch[dest_id] = ctx.step + 1;
    self.search.probe_tries[dest_id] += 1;
  }
}

void on_probe(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  if (msg.dest_id == self.id) {
    // Stray members beside ourselves can only occur in corrupted initial
    // probes; absorb them to keep their references alive.
    for (NodeId w : msg.next)
      if (w != self.id) ctx.send(self.id, make_impl_delegate(w, std::nullopt));
    Message ok;
    ok.kind = MsgKind::kPSuccess;
    ok.dest_id = msg.dest_id;
    ok.dest = self.id;
    ok.hops = msg.hops + 1;
    ctx.send(msg.source, ok);
    if (msg.source != self.id)
      ctx.send(self.id, make_impl_delegate(msg.source, std::nullopt));
    return;
  }

  std::vector<NodeId> next;
  for (NodeId w : msg.next)
    if (w != self.id) next.push_back(w);
  for (NodeId w : closer_neighbors(self, msg.dest_id)) next.push_back(w);
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());

  if (next.empty()) {
    Message fail;
    fail.kind = MsgKind::kPFail;
    fail.dest_id = msg.dest_id;
    fail.seq = msg.seq;
    ctx.send(msg.source, fail);
    if (msg.source != self.id)  // to maintain connectivity
      ctx.send(self.id, make_impl_delegate(msg.source, std::nullopt));
    return;
  }

  const NodeId hop = argmax_dist(next, msg.dest_id);
  if (hop != self.id && !self.has_explicit_edge(hop))
    ctx.send(self.id, make_impl_delegate(hop, std::nullopt));
  Message fwd = msg;
  fwd.next = next;
  fwd.forwarded = true;
  fwd.hops = msg.hops + 1;
  ctx.send(hop, fwd);
}

void on_psuccess(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  auto& buf = self.search.waiting_for[msg.dest_id];
  for (auto m : buf) {
    m.hops = msg.hops + 1;
    ctx.send(msg.dest, m);
  }
  if (!buf.empty()) {
    LedgerEvent batch;
    batch.kind = LedgerEvent::Kind::kBatchResolved;
    batch.origin = self.id;
    batch.dest_id = msg.dest_id;
    batch.step = ctx.step;
    batch.seq = self.search.seq(msg.dest_id);
    ctx.ledger.push_back(batch);
  }
  buf.clear();
  self.search.seq_table[msg.dest_id] = self.search.seq(msg.dest_id) + 1;
  self.search.probe_epoch.erase(msg.dest_id);
  self.search.probe_tries.erase(msg.dest_id);
  if (msg.dest != self.id)
    ctx.send(self.id, make_impl_delegate(msg.dest, std::nullopt));
}

void on_pfail(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  if (msg.seq < self.search.seq(msg.dest_id)) return;  // stale reply
  drop_batch(self, msg.dest_id, ctx);
}

void on_fastprobe(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  if (msg.dest_id == self.id) {
    Message ok;
    ok.kind = MsgKind::kPSuccess;
    ok.dest_id = msg.dest_id;
    ok.dest = self.id;
    ok.hops = msg.hops + 1;
    ctx.send(msg.source, ok);
    if (msg.source != self.id)
      ctx.send(self.id, make_impl_delegate(msg.source, std::nullopt));
    return;
  }
  if (auto hop = greedy_stable_hop(self, msg.dest_id)) {
    Message fwd = msg;
    fwd.hops = msg.hops + 1;
    ctx.send(*hop, fwd);
  }
  // Stuck: dropped silently; the slow probe is still pending.
}

void on_search(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  if (self.id == msg.dest_id) {
    ctx.ledger.push_back(search_event(LedgerEvent::Kind::kSuccess, msg, ctx.step));
  } else {
    // Reachable only from corrupted initial messages (Invariant 6).
    ctx.ledger.push_back(search_event(LedgerEvent::Kind::kViolation, msg, ctx.step));
    ctx.ledger.push_back(search_event(LedgerEvent::Kind::kFail, msg, ctx.step));
  }
  if (msg.origin_node != self.id)
    ctx.send(self.id, make_impl_delegate(msg.origin_node, std::nullopt));
}

}  // namespace overnet
