// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/protocol.hpp"

#include "overnet/list_protocol.hpp"
#include "overnet/search.hpp"

namespace overnet {

void handle_timeout(NodeState& self, ProtocolCtx& ctx) {
  if (ctx.mode == Mode::kIsf)
    list_timeout(self, ctx);
  else
    idf_timeout(self, ctx);
  probe_timeout(self, ctx);
}

void handle_message(NodeState& self, const Message& msg, ProtocolCtx& ctx) {
  const bool isf = ctx.mode == Mode::kIsf;
  switch (msg.kind) {
    case MsgKind::kIntroduce:
      if (isf)
        list_on_reference(self, msg.subject, Arrival::kImplicit, std::nullopt,
                          ctx);
      else
        idf_on_reference(self, msg.subject, ctx);
      break;
    case MsgKind::kDelegateReq:
      if (isf) {
        on_delegate_req(self, msg, ctx);
      } else {
        // Never generated in this mode; a planted one degrades to the two
        // references it carries.
        idf_on_reference(self, msg.subject, ctx);
        idf_on_reference(self, msg.sender, ctx);
      }
      break;
    case MsgKind::kDelegateAck:
      if (isf)
        on_delegate_ack(self, msg, ctx);
      else
        idf_on_reference(self, msg.subject, ctx);
      break;
    case MsgKind::kImplDelegate:
      if (isf)
        on_impl_delegate(self, msg, ctx);
      else
        idf_on_reference(self, msg.subject, ctx);
      break;
    case MsgKind::kProbe:
      on_probe(self, msg, ctx);
      break;
    case MsgKind::kFastProbe:
      on_fastprobe(self, msg, ctx);
      break;
    case MsgKind::kPSuccess:
      on_psuccess(self, msg, ctx);
      break;
    case MsgKind::kPFail:
      on_pfail(self, msg, ctx);
      break;
    case MsgKind::kSearch:
      on_search(self, msg, ctx);
      break;
  }
}

}  // namespace overnet
