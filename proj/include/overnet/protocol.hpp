// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_PROTOCOL_HPP_
#define OVERNET_PROTOCOL_HPP_

#include <cstdint>
#include <vector>

#include "overnet/node_state.hpp"
#include "overnet/trace.hpp"

namespace overnet {

enum class Mode { kIsf, kNegativeControlIdf };

struct Emission {
  NodeId to = 0;
  Message msg;
};

// Per-action context the kernel hands to the handlers. Handlers are pure in
// the sense that all their effects are the NodeState mutation plus what they
// record here.
struct ProtocolCtx {
  Mode mode = Mode::kIsf;
  bool fastprobe_enabled = true;
  // Base interval (in steps) between probe initiations for the same open
  // destination; doubles per retry. Part of the environment cadence, not the
  // protocol logic, so scenarios may tighten it to stress-test.
  std::uint64_t probe_retry_interval = 512;
  // Steps between keep-alive introduction rounds toward stable neighbors.
  std::uint64_t keepalive_interval = 1024;
  std::uint64_t step = 0;
  std::uint64_t* next_edge_instance = nullptr;
  std::uint64_t* next_search_id = nullptr;

  std::vector<Emission> emissions;
  std::vector<LedgerEvent> ledger;

  void send(NodeId to, Message m) { emissions.push_back({to, std::move(m)}); }
  std::uint64_t alloc_instance() { return (*next_edge_instance)++; }
  std::uint64_t alloc_search_id() { return (*next_search_id)++; }
};

// Dispatch for the two action kinds of the execution model. Timeout runs the
// topology maintenance plus the periodic probing; receive runs the handler
// selected by the message kind.
void handle_timeout(NodeState& self, ProtocolCtx& ctx);
void handle_message(NodeState& self, const Message& msg, ProtocolCtx& ctx);

}  // namespace overnet

#endif  // OVERNET_PROTOCOL_HPP_
