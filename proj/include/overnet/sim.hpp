// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_SIM_HPP_
#define OVERNET_SIM_HPP_

#include "overnet/protocol.hpp"
#include "overnet/scheduler.hpp"

namespace overnet {

struct SimOptions {
  Mode mode = Mode::kIsf;
  bool fastprobe_enabled = true;
  std::uint64_t probe_retry_interval = 512;
  std::uint64_t keepalive_interval = 1024;
};

// Executes one scheduler-chosen atomic action: removes the triggering message
// (receive) or fires the timeout, runs the handler, enqueues its emissions
// with fresh message ids and delivery deadlines, and advances the step
// counter. Returns the fully described trace event.
TraceEvent sim_step(GlobalState& s, Scheduler& sched, const SimOptions& opts);

// Application-level search injection at `origin`; consumes one step like any
// other action and is traced with kind "inject".
TraceEvent sim_inject_search(GlobalState& s, Scheduler& sched,
                             const SimOptions& opts, NodeId origin,
                             NodeId dest_id);

// Adversarial state surgery: deletes every record of `target` held by `node`.
// Consumes one step; traced with kind "surgery".
TraceEvent sim_surgery_drop_edge(GlobalState& s, NodeId node, NodeId target);

}  // namespace overnet

#endif  // OVERNET_SIM_HPP_
