// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "overnet/sim.hpp"
#include "test_util.hpp"

using namespace overnet;
using namespace overnet::testutil;

namespace {

Scheduler make_sched(const std::string& policy, std::uint64_t seed) {
  SchedulerOptions o;
  o.policy = policy;
  o.seed = seed;
  return Scheduler(o);
}

}  // namespace

TEST_CASE("enabled_actions lists one timeout per node plus one receive per "
          "message") {
  GlobalState s = list_state({5, 7});
  CHECK(enabled_actions(s).size() == 2);

  put_message(s, 7, make_introduce(9));
  const auto acts = enabled_actions(s);
  REQUIRE(acts.size() == 3);
  CHECK(acts[0].kind == ActionKind::kTimeout);
  CHECK(acts[0].node == 5);
  CHECK(acts[1].kind == ActionKind::kTimeout);
  CHECK(acts[1].node == 7);
  CHECK(acts[2].kind == ActionKind::kReceive);
  CHECK(acts[2].node == 7);
}

TEST_CASE("unknown scheduler policy is rejected") {
  SchedulerOptions o;
  o.policy = "round-robin";
  CHECK_THROWS_AS(Scheduler{o}, std::invalid_argument);
}

TEST_CASE("a single silent node only ever times out") {
  GlobalState s = list_state({5});
  Scheduler sched = make_sched("uniform-random", 1);
  SimOptions opts;
  for (int i = 0; i < 10; ++i) {
    TraceEvent ev = sim_step(s, sched, opts);
    CHECK(ev.kind == "timeout");
    CHECK(ev.actor == 5);
    CHECK(ev.step == static_cast<std::uint64_t>(i));
  }
  CHECK(s.step == 10);
}

TEST_CASE("identical seeds reproduce byte-identical traces") {
  for (const char* policy :
       {"uniform-random", "aging-fair", "fifo-ish", "adversarial-script"}) {
    CAPTURE(policy);
    std::uint64_t hashes[2];
    for (int rep = 0; rep < 2; ++rep) {
      GlobalState s = list_state({2, 5, 7, 9});
      put_message(s, 5, make_introduce(9));
      put_message(s, 9, make_impl_delegate(2, std::nullopt));
      Scheduler sched = make_sched(policy, 42);
      SimOptions opts;
      TraceHasher h;
      for (int i = 0; i < 300; ++i)
        h.update(trace_event_line(sim_step(s, sched, opts)));
      hashes[rep] = h.digest();
    }
    CHECK(hashes[0] == hashes[1]);
  }
}

TEST_CASE("every policy honors the delivery and timeout fairness bounds") {
  for (const char* policy :
       {"uniform-random", "aging-fair", "fifo-ish", "adversarial-script"}) {
    CAPTURE(policy);
    // A scrambled state keeps traffic flowing for the whole run.
    GlobalState s = list_state({2, 5, 7, 9, 12});
    put_message(s, 2, make_introduce(12));
    put_message(s, 12, make_introduce(2));
    Scheduler sched = make_sched(policy, 7);
    SimOptions opts;
    std::map<NodeId, std::uint64_t> last_timeout;
    for (const auto& [id, n] : s.nodes) last_timeout[id] = 0;
    for (int i = 0; i < 2000; ++i) {
      const std::uint64_t gap = sched.timeout_gap_bound(s);
      TraceEvent ev = sim_step(s, sched, opts);
      if (ev.kind == "timeout") last_timeout[ev.actor] = s.step;
      for (const auto& [to, ch] : s.channels)
        for (const auto& e : ch)
          CHECK(e.deadline >= s.step);  // no message left past its deadline
      for (const auto& [id, t] : last_timeout)
        CHECK(s.step - t <= gap);
    }
  }
}

TEST_CASE("messages are emitted once and delivered at most once") {
  GlobalState s = list_state({2, 5, 7, 9});
  put_message(s, 5, make_introduce(9));
  Scheduler sched = make_sched("uniform-random", 3);
  SimOptions opts;
  std::set<std::uint64_t> emitted{1};  // the planted message
  std::set<std::uint64_t> delivered;
  for (int i = 0; i < 1000; ++i) {
    TraceEvent ev = sim_step(s, sched, opts);
    for (const auto& em : ev.emitted)
      CHECK(emitted.insert(em.msg_id).second);  // ids are never reused
    if (ev.kind == "receive") {
      CHECK(emitted.count(ev.msg_id) == 1);
      CHECK(delivered.insert(ev.msg_id).second);  // delivered at most once
    }
  }
  // Everything still pending was emitted and not yet delivered.
  for (const auto& [to, ch] : s.channels)
    for (const auto& e : ch) {
      CHECK(emitted.count(e.msg_id) == 1);
      CHECK(delivered.count(e.msg_id) == 0);
    }
}

TEST_CASE("search injection is traced and opens a ledger record") {
  GlobalState s = list_state({5, 7, 9});
  Scheduler sched = make_sched("aging-fair", 1);
  SimOptions opts;
  TraceEvent ev = sim_inject_search(s, sched, opts, 5, 9);
  CHECK(ev.kind == "inject");
  CHECK(ev.actor == 5);
  REQUIRE(ev.ledger.size() == 1);
  CHECK(ev.ledger[0].kind == LedgerEvent::Kind::kInit);
  CHECK(ev.ledger[0].origin == 5);
  CHECK(ev.ledger[0].dest_id == 9);
  CHECK(s.nodes[5].search.waiting_for.size() == 1);
  CHECK(s.step == 1);
}

TEST_CASE("edge surgery removes every record of the target and is traced") {
  GlobalState s = list_state({5, 7, 9});
  TraceEvent ev = sim_surgery_drop_edge(s, 7, 9);
  CHECK(ev.kind == "surgery");
  CHECK(ev.actor == 7);
  CHECK_FALSE(s.nodes[7].has_explicit_edge(9));
  REQUIRE(ev.delta.size() == 1);
  CHECK(ev.delta[0].substr(0, 1) == "-");
}
