// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "overnet/ledger.hpp"
#include "overnet/oracle.hpp"
#include "overnet/primitives.hpp"
#include "test_util.hpp"

using namespace overnet;
using namespace overnet::testutil;

namespace {

LedgerEvent mk_event(LedgerEvent::Kind kind, std::uint64_t search_id,
                     NodeId origin, NodeId dest_id, std::uint64_t init_step,
                     std::uint64_t step) {
  LedgerEvent e;
  e.kind = kind;
  e.search_id = search_id;
  e.origin = origin;
  e.dest_id = dest_id;
  e.init_step = init_step;
  e.step = step;
  return e;
}

}  // namespace

TEST_CASE("reach follows only strictly distance-decreasing explicit edges") {
  GlobalState s = list_state({1, 3, 5});
  CHECK(reach(s, 1, 5) == std::set<NodeId>{1, 3, 5});
  CHECK(reach(s, 5, 1) == std::set<NodeId>{1, 3, 5});
  // Toward 3 the outer nodes stop after one hop; 3 has nowhere closer to go.
  CHECK(reach(s, 1, 3) == std::set<NodeId>{1, 3});
  CHECK(reach(s, 3, 3) == std::set<NodeId>{3});
  // An edgeless node reaches only itself.
  GlobalState lone;
  lone.nodes[7] = list_node(7, std::nullopt, std::nullopt);
  CHECK(reach(lone, 7, 1) == std::set<NodeId>{7});

  CHECK(reach_of_set(s, {1, 5}, 5) == std::set<NodeId>{1, 3, 5});
  CHECK(explicit_path_exists(s, 1, 5));
  CHECK_FALSE(explicit_path_exists(lone, 7, 1));
}

TEST_CASE("invariant 1 accepts the handshake produced by safe delegation") {
  GlobalState s = list_state({5, 7});
  s.nodes[5].temporaries.push_back(temp_edge(12, s.next_edge_instance++));
  s.nodes[12] = list_node(12, std::nullopt, std::nullopt);
  CtxHarness h;
  REQUIRE(safe_delegate_start(s.nodes[5], 12, 7, h.ctx));
  put_message(s, 7, h.ctx.emissions[0].msg);
  Verdict v = check_invariant_1(s);
  CHECK(v.holds);
}

TEST_CASE("invariant 1 rejects a planted request with no eseq support") {
  GlobalState s = list_state({5, 7});
  s.nodes[5].temporaries.push_back(temp_edge(12, s.next_edge_instance++));
  s.nodes[12] = list_node(12, std::nullopt, std::nullopt);
  // A request that claims 5 delegated 12 via 7, but 5 never raised eseq[7]:
  // the required strictly-raised path from 5 to the holder does not exist.
  put_message(s, 7, make_delegate_req(5, 12, 0, std::nullopt));
  Verdict v = check_invariant_1(s);
  CHECK_FALSE(v.holds);
  CHECK_FALSE(v.witness.empty());
}

TEST_CASE("invariant 1 lets stale requests escape via the sender's eseq") {
  GlobalState s = list_state({5, 7});
  s.nodes[12] = list_node(12, std::nullopt, std::nullopt);
  s.nodes[5].eseq.raise(12, 5);  // the sender has long moved on
  put_message(s, 7, make_delegate_req(5, 12, 0, std::nullopt));
  CHECK(check_invariant_1(s).holds);
}

TEST_CASE("invariant 2 accepts an ack covered by a raised path") {
  GlobalState s = list_state({5, 7, 12});
  s.nodes[5].eseq.raise(7, 1);
  s.nodes[7].eseq.raise(12, 1);
  put_message(s, 5, make_delegate_ack(12, 0, std::nullopt));
  CHECK(check_invariant_2(s).holds);

  // Without the raised hops the same ack is unsupported.
  GlobalState bad = list_state({5, 7, 12});
  put_message(bad, 5, make_delegate_ack(12, 0, std::nullopt));
  CHECK_FALSE(check_invariant_2(bad).holds);
}

TEST_CASE("search-message invariants flag a corrupted psuccess") {
  GlobalState s = list_state({5, 7, 9});
  Message ok;
  ok.kind = MsgKind::kPSuccess;
  ok.dest_id = 9;
  ok.dest = 7;  // lies about who answered
  put_message(s, 5, ok);
  SnapshotCache cache;
  const auto verdicts = check_invariants_3_to_6(s, cache);
  REQUIRE(verdicts.size() == 4);
  for (const auto& v : verdicts) {
    if (v.id == "4") {
      CHECK_FALSE(v.holds);
    } else {
      CHECK(v.holds);
    }
  }
  CHECK_FALSE(admissible(s, cache).holds);
}

TEST_CASE("search-message invariants accept a well-formed probe") {
  GlobalState s = list_state({5, 7, 9});
  Message p;
  p.kind = MsgKind::kProbe;
  p.source = 5;
  p.dest_id = 9;
  p.next = {7};
  p.seq = 1;
  put_message(s, 7, p);
  SnapshotCache cache;
  for (const auto& v : check_invariants_3_to_6(s, cache)) CHECK(v.holds);
  CHECK(admissible(s, cache).holds);
}

TEST_CASE("a search pending at the wrong node violates invariant 6") {
  GlobalState s = list_state({5, 7, 9});
  Message m;
  m.kind = MsgKind::kSearch;
  m.origin_node = 5;
  m.dest_id = 9;
  put_message(s, 7, m);
  SnapshotCache cache;
  for (const auto& v : check_invariants_3_to_6(s, cache))
    CHECK(v.holds == (v.id != "6"));
}

TEST_CASE("the snapshot cache remembers when a pair was reachable") {
  GlobalState s = list_state({5, 7, 9});
  s.nodes[5].search.seq_table[9] = 3;
  SnapshotCache cache;
  CHECK_FALSE(cache.min_seq_when_reachable(5, 9).has_value());
  cache.record_admissible(s);
  REQUIRE(cache.min_seq_when_reachable(5, 9).has_value());
  CHECK(*cache.min_seq_when_reachable(5, 9) == 3);
  // A later state with a higher seq does not raise the recorded minimum.
  s.nodes[5].search.seq_table[9] = 8;
  cache.record_admissible(s);
  CHECK(*cache.min_seq_when_reachable(5, 9) == 3);
}

TEST_CASE("psi counts members as powers of n by distance") {
  using boost::multiprecision::cpp_int;
  CHECK(psi({5, 7}, 9, 3) == 90);  // 3^4 + 3^2
  CHECK(psi({5}, 5, 3) == 1);      // n^0
  CHECK(psi({}, 9, 3) == 0);
}

TEST_CASE("psi_less agrees with the exact potential on random sets") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<NodeId> id_dist(0, 40);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t n = 2 + rng() % 6;
    auto draw = [&] {
      std::vector<NodeId> v(1 + rng() % 5);
      for (auto& x : v) x = id_dist(rng);
      return v;
    };
    const auto a = draw();
    const auto b = draw();
    const NodeId dest = id_dist(rng);
    CAPTURE(iter);
    CHECK(psi_less(a, b, dest, n) == (psi(a, dest, n) < psi(b, dest, n)));
  }
}

TEST_CASE("phi_temporary measures the remaining delegation path lengths") {
  GlobalState s = list_state({5, 7, 9});
  CHECK(phi_temporary(s) == 0);
  // A temporary (5 -> 9) still has to travel one rank: phi = rankdist - 1 = 1.
  s.nodes[5].temporaries.push_back(temp_edge(9, s.next_edge_instance++));
  CHECK(phi_temporary(s) == 1);
}

TEST_CASE("weak components include references carried by pending messages") {
  GlobalState s = list_state({5, 7});
  s.nodes[9] = list_node(9, std::nullopt, 12);
  s.nodes[12] = list_node(12, 9, std::nullopt);
  CHECK(weakly_connected_components(s).size() == 2);
  // An in-flight reference to 5 bridges the two halves.
  put_message(s, 9, make_introduce(5));
  CHECK(weakly_connected_components(s).size() == 1);

  GlobalState empty;
  CHECK(weakly_connected_components(empty).empty());
}

TEST_CASE("the search ledger detects non-monotone resolutions") {
  SUBCASE("failures before the first success are fine") {
    SearchLedger l;
    l.apply(mk_event(LedgerEvent::Kind::kInit, 1, 5, 9, 10, 10));
    l.apply(mk_event(LedgerEvent::Kind::kFail, 1, 5, 9, 10, 20));
    l.apply(mk_event(LedgerEvent::Kind::kInit, 2, 5, 9, 30, 30));
    l.apply(mk_event(LedgerEvent::Kind::kSuccess, 2, 5, 9, 30, 40));
    CHECK(l.monotone().holds);
    CHECK(l.total() == 2);
    CHECK(l.failed() == 1);
    CHECK(l.succeeded() == 1);
  }
  SUBCASE("a later-initiated failure after a success is a violation") {
    SearchLedger l;
    l.apply(mk_event(LedgerEvent::Kind::kInit, 1, 5, 9, 10, 10));
    l.apply(mk_event(LedgerEvent::Kind::kSuccess, 1, 5, 9, 10, 20));
    l.apply(mk_event(LedgerEvent::Kind::kInit, 2, 5, 9, 30, 30));
    l.apply(mk_event(LedgerEvent::Kind::kFail, 2, 5, 9, 30, 40));
    Verdict v = l.monotone();
    CHECK_FALSE(v.holds);
    CHECK_FALSE(v.witness.empty());
  }
  SUBCASE("a failure initiated before the success was answered is fine") {
    SearchLedger l;
    l.apply(mk_event(LedgerEvent::Kind::kInit, 1, 5, 9, 10, 10));
    l.apply(mk_event(LedgerEvent::Kind::kInit, 2, 5, 9, 30, 30));
    l.apply(mk_event(LedgerEvent::Kind::kFail, 2, 5, 9, 30, 40));
    l.apply(mk_event(LedgerEvent::Kind::kSuccess, 1, 5, 9, 10, 50));
    CHECK(l.monotone().holds);
  }
  SUBCASE("different pairs never interact") {
    SearchLedger l;
    l.apply(mk_event(LedgerEvent::Kind::kInit, 1, 5, 9, 10, 10));
    l.apply(mk_event(LedgerEvent::Kind::kSuccess, 1, 5, 9, 10, 20));
    l.apply(mk_event(LedgerEvent::Kind::kInit, 2, 7, 9, 30, 30));
    l.apply(mk_event(LedgerEvent::Kind::kFail, 2, 7, 9, 30, 40));
    CHECK(l.monotone().holds);
  }
}

TEST_CASE("legitimacy demands the exact sorted list and silence") {
  GlobalState s = list_state({2, 5, 7, 9});
  CHECK(legitimate_list(s).holds);

  SUBCASE("a temporary edge breaks it") {
    s.nodes[5].temporaries.push_back(temp_edge(9, s.next_edge_instance++));
    CHECK_FALSE(legitimate_list(s).holds);
  }
  SUBCASE("an in-flight delegation handshake breaks it") {
    put_message(s, 5, make_delegate_ack(9, 0, std::nullopt));
    CHECK_FALSE(legitimate_list(s).holds);
  }
  SUBCASE("a wrong neighbor breaks it") {
    s.nodes[5].right = stable_edge(9, s.next_edge_instance++);
    CHECK_FALSE(legitimate_list(s).holds);
  }
  SUBCASE("keep-alive traffic is allowed") {
    put_message(s, 5, make_introduce(2));
    CHECK(legitimate_list(s).holds);
  }
}
