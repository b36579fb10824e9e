// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "overnet/list_protocol.hpp"
#include "overnet/primitives.hpp"
#include "test_util.hpp"

using namespace overnet;
using namespace overnet::testutil;

TEST_CASE("introduce keeps the sender's reference and emits one message") {
  NodeState u = list_node(5, 2, 9);
  CtxHarness h;
  CHECK(introduce(u, 9, 2, h.ctx));
  REQUIRE(h.ctx.emissions.size() == 1);
  CHECK(h.ctx.emissions[0].to == 2);
  CHECK(h.ctx.emissions[0].msg.kind == MsgKind::kIntroduce);
  CHECK(h.ctx.emissions[0].msg.subject == 9);
  CHECK(u.right->target == 9);  // edge kept
}

TEST_CASE("self-introduction is allowed") {
  NodeState u = list_node(5, std::nullopt, 9);
  CtxHarness h;
  CHECK(introduce(u, 5, 9, h.ctx));
  CHECK(h.ctx.emissions[0].msg.subject == 5);
}

TEST_CASE("introduce rejects missing references") {
  NodeState u = list_node(5, std::nullopt, 9);
  CtxHarness h;
  CHECK_FALSE(introduce(u, 3, 9, h.ctx));   // subject not held
  CHECK_FALSE(introduce(u, 9, 2, h.ctx));   // target not held
  CHECK_FALSE(introduce(u, 9, 9, h.ctx));   // subject == target
  CHECK(h.ctx.emissions.empty());
}

TEST_CASE("safe_delegate_start applies the eseq max-rule") {
  NodeState u = list_node(5, std::nullopt, 7);
  u.temporaries.push_back(temp_edge(12, 3));

  SUBCASE("eseq[subject]=3, eseq[via]=1: req carries 3, via entry becomes 4") {
    u.eseq.raise(12, 3);
    u.eseq.raise(7, 1);
    CtxHarness h;
    REQUIRE(safe_delegate_start(u, 12, 7, h.ctx));
    REQUIRE(h.ctx.emissions.size() == 1);
    const Message& req = h.ctx.emissions[0].msg;
    CHECK(req.kind == MsgKind::kDelegateReq);
    CHECK(h.ctx.emissions[0].to == 7);
    CHECK(req.sender == 5);
    CHECK(req.subject == 12);
    CHECK(req.eseq == 3);
    CHECK(u.eseq.get(7) == 4);
  }

  SUBCASE("eseq[subject]=0, eseq[via]=5: req carries 0, via entry stays 5") {
    u.eseq.raise(7, 5);
    CtxHarness h;
    REQUIRE(safe_delegate_start(u, 12, 7, h.ctx));
    CHECK(h.ctx.emissions[0].msg.eseq == 0);
    CHECK(u.eseq.get(7) == 5);
  }

  SUBCASE("the delegated edge stays explicit until the ack") {
    CtxHarness h;
    REQUIRE(safe_delegate_start(u, 12, 7, h.ctx));
    CHECK(u.has_explicit_edge(12));
  }
}

TEST_CASE("safe_delegate_start rejects bad preconditions") {
  NodeState u = list_node(5, std::nullopt, 7);
  u.temporaries.push_back(temp_edge(12, 3));
  CtxHarness h;
  CHECK_FALSE(safe_delegate_start(u, 12, 9, h.ctx));  // via not stable
  CHECK_FALSE(safe_delegate_start(u, 7, 7, h.ctx));   // subject not temporary
  CHECK(h.ctx.emissions.empty());
}

TEST_CASE("delegate-req receipt bumps eseq and acks") {
  CtxHarness h;

  SUBCASE("unknown subject becomes explicit; eseq set past the message") {
    NodeState v = list_node(9, 7, std::nullopt);
    Message req = make_delegate_req(5, 12, 2, std::nullopt);
    on_delegate_req(v, req, h.ctx);
    CHECK(v.has_explicit_edge(12));
    CHECK(v.eseq.get(12) == 3);
    auto acks = h.emitted(MsgKind::kDelegateAck);
    REQUIRE(acks.size() == 1);
    CHECK(acks[0].to == 5);
    CHECK(acks[0].msg.subject == 12);
    CHECK(acks[0].msg.eseq == 2);
  }

  SUBCASE("existing stable edge fuses; higher eseq survives; ack still sent") {
    NodeState v = list_node(9, 7, 12);
    v.eseq.raise(12, 7);
    Message req = make_delegate_req(5, 12, 2, std::nullopt);
    on_delegate_req(v, req, h.ctx);
    CHECK(v.right->target == 12);
    CHECK(v.temporaries.empty());
    CHECK(v.eseq.get(12) == 7);
    REQUIRE(h.emitted(MsgKind::kDelegateAck).size() == 1);
    CHECK(h.emitted(MsgKind::kDelegateAck)[0].msg.eseq == 2);
  }

  SUBCASE("self-subject fuses trivially, ack still sent") {
    NodeState v = list_node(9, 7, std::nullopt);
    Message req = make_delegate_req(5, 9, 0, std::nullopt);
    on_delegate_req(v, req, h.ctx);
    CHECK_FALSE(v.has_explicit_edge(9));
    CHECK(h.emitted(MsgKind::kDelegateAck).size() == 1);
  }
}

TEST_CASE("delegate-ack removes the edge only when fresh and temporary") {
  SUBCASE("matching eseq on a temporary edge: removed, delegated onward") {
    NodeState u = list_node(5, std::nullopt, 7);
    u.temporaries.push_back(temp_edge(12, 3));
    u.eseq.raise(12, 4);
    CtxHarness h;
    on_delegate_ack(u, make_delegate_ack(12, 4, std::nullopt), h.ctx);
    CHECK_FALSE(u.has_explicit_edge(12));
    auto impl = h.emitted(MsgKind::kImplDelegate);
    REQUIRE(impl.size() == 1);
    CHECK(impl[0].to == 7);
    CHECK(impl[0].msg.subject == 12);
  }

  SUBCASE("stale eseq: treated as an implicit reference") {
    NodeState u = list_node(5, std::nullopt, 7);
    u.temporaries.push_back(temp_edge(12, 3));
    u.eseq.raise(12, 4);
    CtxHarness h;
    on_delegate_ack(u, make_delegate_ack(12, 1, std::nullopt), h.ctx);
    CHECK(u.has_explicit_edge(12));  // fused with the existing record
  }

  SUBCASE("edge already stable (corrupt start): never demoted") {
    NodeState u = list_node(5, std::nullopt, 7);
    CtxHarness h;
    on_delegate_ack(u, make_delegate_ack(7, 0, std::nullopt), h.ctx);
    CHECK(u.right.has_value());
    CHECK(u.right->target == 7);
  }
}

TEST_CASE("eseq entries never decrease") {
  EseqTable t;
  t.raise(3, 5);
  t.raise(3, 2);
  CHECK(t.get(3) == 5);
  t.raise(3, 9);
  CHECK(t.get(3) == 9);
  CHECK(t.get(4) == 0);  // absent reads as zero
}

TEST_CASE("fusion keeps one record, stable wins") {
  const EdgeRecord stable = stable_edge(7, 1);
  const EdgeRecord temp = temp_edge(7, 2);
  SUBCASE("stable + temporary") {
    auto fused = fuse_records(stable, temp);
    REQUIRE(fused.has_value());
    CHECK(fused->kind == EdgeKind::kStable);
  }
  SUBCASE("two temporaries") {
    auto fused = fuse_records(temp_edge(7, 2), temp_edge(7, 3));
    REQUIRE(fused.has_value());
    CHECK(fused->kind == EdgeKind::kTemporary);
  }
  SUBCASE("different targets rejected") {
    CHECK_FALSE(fuse_records(stable, temp_edge(8, 2)).has_value());
  }
}

TEST_CASE("fuse_duplicates drops shadowed and duplicated temporaries") {
  NodeState u = list_node(5, std::nullopt, 7);
  u.temporaries.push_back(temp_edge(7, 2));   // shadowed by stable right
  u.temporaries.push_back(temp_edge(12, 3));
  u.temporaries.push_back(temp_edge(12, 4));  // duplicate
  fuse_duplicates(u);
  REQUIRE(u.temporaries.size() == 1);
  CHECK(u.temporaries[0].target == 12);
}

TEST_CASE("plain delegation is fenced off outside the negative-control mode") {
  NodeState u = list_node(5, 2, 9);
  SUBCASE("mode off: rejected") {
    CtxHarness h(Mode::kIsf);
    CHECK_FALSE(plain_delegate(u, 9, 2, h.ctx));
    CHECK(u.has_explicit_edge(9));
  }
  SUBCASE("mode on: reference forwarded, edge deleted immediately") {
    CtxHarness h(Mode::kNegativeControlIdf);
    CHECK(plain_delegate(u, 9, 2, h.ctx));
    CHECK_FALSE(u.has_explicit_edge(9));
    auto impl = h.emitted(MsgKind::kImplDelegate);
    REQUIRE(impl.size() == 1);
    CHECK(impl[0].to == 2);
    CHECK(impl[0].msg.subject == 9);
  }
  SUBCASE("distinctness required") {
    CtxHarness h(Mode::kNegativeControlIdf);
    CHECK_FALSE(plain_delegate(u, 9, 9, h.ctx));
  }
}
