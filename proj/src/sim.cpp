// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/sim.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "overnet/search.hpp"

namespace overnet {

namespace {

std::vector<std::string> edge_snapshot(const NodeState& n) {
  std::vector<std::string> out;
  auto tag = [&](const EdgeRecord& e) {
    const char* kind = e.kind == EdgeKind::kStable ? "stable" : "temp";
    out.push_back(std::string(kind) + "(" + std::to_string(n.id) + "," +
                  std::to_string(e.target) + ")#" +
                  std::to_string(e.instance));
  };
  if (n.left) tag(*n.left);
  if (n.right) tag(*n.right);
  for (const auto& e : n.temporaries) tag(e);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> edge_delta(const std::vector<std::string>& before,
                                    const std::vector<std::string>& after) {
  std::vector<std::string> delta, gone, added;
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                      std::back_inserter(gone));
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                      std::back_inserter(added));
  for (const auto& e : gone) delta.push_back("-" + e);
  for (const auto& e : added) delta.push_back("+" + e);
  return delta;
}

ProtocolCtx make_ctx(GlobalState& s, const SimOptions& opts) {
  ProtocolCtx ctx;
  ctx.mode = opts.mode;
  ctx.fastprobe_enabled = opts.fastprobe_enabled;
  ctx.probe_retry_interval = opts.probe_retry_interval;
  ctx.keepalive_interval = opts.keepalive_interval;
  ctx.step = s.step;
  ctx.next_edge_instance = &s.next_edge_instance;
  ctx.next_search_id = &s.next_search_id;
  return ctx;
}

// Moves the handler's emissions into the channels, stamping ids and delivery
// deadlines, and records them on the trace event. Emissions addressed to ids
// without a node are dropped: the system is closed.
void enqueue_emissions(GlobalState& s, Scheduler* sched, ProtocolCtx& ctx,
                       TraceEvent& ev) {
  for (auto& em : ctx.emissions) {
    if (!s.nodes.contains(em.to)) continue;
    ChannelEntry entry;
    entry.msg_id = s.next_msg_id++;
    entry.send_step = s.step;
    entry.pending_at_send = s.pending_messages();
    entry.deadline = sched ? sched->message_deadline(s)
                           : s.step + 4 * s.nodes.size() *
                                 (entry.pending_at_send + s.nodes.size());
    entry.msg = em.msg;
    ev.emitted.push_back({em.to, entry.msg_id, em.msg});
    s.channels[em.to].push_back(std::move(entry));
  }
  ev.ledger = std::move(ctx.ledger);
}

}  // namespace

TraceEvent sim_step(GlobalState& s, Scheduler& sched, const SimOptions& opts) {
  const ActionRef action = sched.pick(s);
  auto node_it = s.nodes.find(action.node);
  if (node_it == s.nodes.end())
    throw std::logic_error("scheduler picked a nonexistent node");
  NodeState& node = node_it->second;

  TraceEvent ev;
  ev.step = s.step;
  ev.actor = action.node;
  const auto before = edge_snapshot(node);
  ProtocolCtx ctx = make_ctx(s, opts);

  if (action.kind == ActionKind::kTimeout) {
    ev.kind = "timeout";
    handle_timeout(node, ctx);
    node.last_timeout_step = s.step;
  } else {
    ev.kind = "receive";
    auto& ch = s.channels[action.node];
    auto it = std::find_if(ch.begin(), ch.end(), [&](const ChannelEntry& e) {
      return e.msg_id == action.msg_id;
    });
    if (it == ch.end())
      throw std::logic_error("scheduler picked a nonexistent message");
    const ChannelEntry entry = *it;
    ch.erase(it);
    if (ch.empty()) s.channels.erase(action.node);
    ev.message = entry.msg;
    ev.msg_id = entry.msg_id;
    ev.msg_age = s.step - entry.send_step;
    handle_message(node, entry.msg, ctx);
  }

  enqueue_emissions(s, &sched, ctx, ev);
  ev.delta = edge_delta(before, edge_snapshot(node));
  s.step += 1;
  return ev;
}

TraceEvent sim_inject_search(GlobalState& s, Scheduler& sched,
                             const SimOptions& opts, NodeId origin,
                             NodeId dest_id) {
  auto node_it = s.nodes.find(origin);
  if (node_it == s.nodes.end())
    throw std::invalid_argument("search injected at a nonexistent node");

  TraceEvent ev;
  ev.step = s.step;
  ev.actor = origin;
  ev.kind = "inject";
  const auto before = edge_snapshot(node_it->second);
  ProtocolCtx ctx = make_ctx(s, opts);
  init_search(node_it->second, dest_id, ctx);
  enqueue_emissions(s, &sched, ctx, ev);
  ev.delta = edge_delta(before, edge_snapshot(node_it->second));
  s.step += 1;
  return ev;
}

TraceEvent sim_surgery_drop_edge(GlobalState& s, NodeId node, NodeId target) {
  auto node_it = s.nodes.find(node);
  if (node_it == s.nodes.end())
    throw std::invalid_argument("surgery on a nonexistent node");
  NodeState& n = node_it->second;

  TraceEvent ev;
  ev.step = s.step;
  ev.actor = node;
  ev.kind = "surgery";
  const auto before = edge_snapshot(n);
  if (n.left && n.left->target == target) n.left.reset();
  if (n.right && n.right->target == target) n.right.reset();
  std::erase_if(n.temporaries,
                [target](const EdgeRecord& e) { return e.target == target; });
  ev.delta = edge_delta(before, edge_snapshot(n));
  s.step += 1;
  return ev;
}

}  // namespace overnet
