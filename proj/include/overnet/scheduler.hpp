// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_SCHEDULER_HPP_
#define OVERNET_SCHEDULER_HPP_

#include <random>
#include <string>
#include <vector>

#include "overnet/global_state.hpp"

namespace overnet {

enum class ActionKind { kTimeout, kReceive };

// One enabled atomic action: either the timeout action of `node` or the
// receipt of the channel entry `msg_id` addressed to `node`.
struct ActionRef {
  ActionKind kind = ActionKind::kTimeout;
  NodeId node = 0;
  std::uint64_t msg_id = 0;

  bool operator==(const ActionRef&) const = default;
};

// Every action enabled in `s`: one timeout per node plus one receive per
// pending message, in deterministic order (timeouts by node id first).
std::vector<ActionRef> enabled_actions(const GlobalState& s);

struct SchedulerOptions {
  // "uniform-random" | "aging-fair" | "fifo-ish" | "adversarial-script"
  std::string policy = "aging-fair";
  std::uint64_t seed = 0;
  // Scale factors on the fairness windows; 1.0 gives a delivery window of
  // 4n(pending_at_send + n) steps and a timeout gap bound of 8n steps.
  double age_factor = 1.0;
  double gap_factor = 1.0;
};

// Seeded action picker. Every policy is wrapped in the same fairness harness:
// a message whose delivery deadline comes within the current backlog is
// served earliest-deadline-first, and a node whose timeout has been starved
// close to the gap bound is fired, regardless of the policy's own taste. The
// policies only differ in what they do when nothing is urgent.
class Scheduler {
 public:
  explicit Scheduler(SchedulerOptions opts);

  ActionRef pick(const GlobalState& s);

  // Delivery deadline assigned to a message sent now; fixed at send time.
  std::uint64_t message_deadline(const GlobalState& s) const;
  // Upper bound on the steps between two timeouts of the same node.
  std::uint64_t timeout_gap_bound(const GlobalState& s) const;

  const SchedulerOptions& options() const { return opts_; }

 private:
  SchedulerOptions opts_;
  std::mt19937_64 rng_;
};

}  // namespace overnet

#endif  // OVERNET_SCHEDULER_HPP_
