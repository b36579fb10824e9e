// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_SEARCH_HPP_
#define OVERNET_SEARCH_HPP_

#include "overnet/protocol.hpp"

namespace overnet {

// Application-triggered: buffer a search for dest_id and, when it opens a new
// batch, bump the sequence counters and launch the fast probe.
void init_search(NodeState& self, NodeId dest_id, ProtocolCtx& ctx);

// Re-probes every pending destination; called from the timeout action.
void probe_timeout(NodeState& self, ProtocolCtx& ctx);

void on_probe(NodeState& self, const Message& msg, ProtocolCtx& ctx);
void on_psuccess(NodeState& self, const Message& msg, ProtocolCtx& ctx);
void on_pfail(NodeState& self, const Message& msg, ProtocolCtx& ctx);
void on_fastprobe(NodeState& self, const Message& msg, ProtocolCtx& ctx);
void on_search(NodeState& self, const Message& msg, ProtocolCtx& ctx);

}  // namespace overnet

#endif  // OVERNET_SEARCH_HPP_
