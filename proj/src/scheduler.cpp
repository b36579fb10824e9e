// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace overnet {

namespace {

// (deadline, action) pair used for the earliest-deadline-first forcing scan.
struct Obligation {
  std::uint64_t deadline = 0;
  ActionRef action;
};

}  // namespace

std::vector<ActionRef> enabled_actions(const GlobalState& s) {
  std::vector<ActionRef> out;
  for (const auto& [id, n] : s.nodes)
    out.push_back({ActionKind::kTimeout, id, 0});
  for (const auto& [id, ch] : s.channels)
    for (const auto& e : ch) out.push_back({ActionKind::kReceive, id, e.msg_id});
  return out;
}

Scheduler::Scheduler(SchedulerOptions opts)
    : opts_(std::move(opts)), rng_(opts_.seed) {
  static const char* known[] = {"uniform-random", "aging-fair", "fifo-ish",
                                "adversarial-script"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
        return opts_.policy == k;
      }) == std::end(known))
    throw std::invalid_argument("unknown scheduler policy: " + opts_.policy);
}

std::uint64_t Scheduler::message_deadline(const GlobalState& s) const {
  const auto n = static_cast<double>(s.nodes.size());
  const double window =
      4.0 * n * (static_cast<double>(s.pending_messages()) + n) *
      opts_.age_factor;
  return s.step + std::max<std::uint64_t>(
                      1, static_cast<std::uint64_t>(std::llround(window)));
}

std::uint64_t Scheduler::timeout_gap_bound(const GlobalState& s) const {
  const double bound = 8.0 * static_cast<double>(s.nodes.size()) *
                       opts_.gap_factor;
  return std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::llround(bound)));
}

ActionRef Scheduler::pick(const GlobalState& s) {
  const std::uint64_t pending = s.pending_messages();

  // Fairness harness: collect every obligation (each message must be
  // delivered by its deadline, each node must time out once per gap bound)
  // and check earliest-deadline-first feasibility. Only when some prefix of
  // the deadline-sorted obligations no longer fits into the steps remaining
  // before it expires does the harness override the policy; this keeps the
  // bounds honored without letting far-off deadlines starve anyone.
  std::vector<Obligation> obligations;
  const std::uint64_t gap_bound = timeout_gap_bound(s);
  for (const auto& [id, node] : s.nodes)
    obligations.push_back(
        {node.last_timeout_step + gap_bound, {ActionKind::kTimeout, id, 0}});
  for (const auto& [id, ch] : s.channels)
    for (const auto& e : ch)
      obligations.push_back({e.deadline, {ActionKind::kReceive, id, e.msg_id}});
  std::sort(obligations.begin(), obligations.end(),
            [](const Obligation& a, const Obligation& b) {
              if (a.deadline != b.deadline) return a.deadline < b.deadline;
              if (a.action.kind != b.action.kind)
                return a.action.kind == ActionKind::kTimeout;
              if (a.action.node != b.action.node)
                return a.action.node < b.action.node;
              return a.action.msg_id < b.action.msg_id;
            });
  for (std::size_t i = 0; i < obligations.size(); ++i)
    if (obligations[i].deadline <= s.step + i + 1)
      return obligations.front().action;

  if (opts_.policy == "uniform-random") {
    auto actions = enabled_actions(s);
    return actions[std::uniform_int_distribution<std::size_t>(
        0, actions.size() - 1)(rng_)];
  }

  if (opts_.policy == "aging-fair") {
    // Backlog-draining: usually deliver the message closest to its deadline,
    // sometimes wander to keep interleavings diverse.
    if (pending > 0 && std::uniform_int_distribution<int>(0, 3)(rng_) != 0) {
      for (const Obligation& o : obligations)
        if (o.action.kind == ActionKind::kReceive) return o.action;
    }
    auto actions = enabled_actions(s);
    return actions[std::uniform_int_distribution<std::size_t>(
        0, actions.size() - 1)(rng_)];
  }

  if (opts_.policy == "fifo-ish") {
    if (s.step % 4 == 0 || pending == 0) {
      // Timeout of the node idle the longest; ties go to the smaller id.
      NodeId best = s.nodes.begin()->first;
      for (const auto& [id, node] : s.nodes)
        if (node.last_timeout_step < s.nodes.at(best).last_timeout_step)
          best = id;
      return {ActionKind::kTimeout, best, 0};
    }
    // Oldest message first; msg ids are allocated in send order.
    const ChannelEntry* oldest = nullptr;
    NodeId to = 0;
    for (const auto& [id, ch] : s.channels)
      for (const auto& e : ch)
        if (!oldest || e.msg_id < oldest->msg_id) {
          oldest = &e;
          to = id;
        }
    return {ActionKind::kReceive, to, oldest->msg_id};
  }

  // adversarial-script: newest message first (LIFO-lean) to keep references
  // in flight as long as the fairness harness allows, with occasional
  // timeouts of a random node.
  if (pending > 0 && std::uniform_int_distribution<int>(0, 3)(rng_) != 0) {
    const ChannelEntry* newest = nullptr;
    NodeId to = 0;
    for (const auto& [id, ch] : s.channels)
      for (const auto& e : ch)
        if (!newest || e.msg_id > newest->msg_id) {
          newest = &e;
          to = id;
        }
    return {ActionKind::kReceive, to, newest->msg_id};
  }
  auto it = s.nodes.begin();
  std::advance(it, std::uniform_int_distribution<std::size_t>(
                       0, s.nodes.size() - 1)(rng_));
  return {ActionKind::kTimeout, it->first, 0};
}

}  // namespace overnet
