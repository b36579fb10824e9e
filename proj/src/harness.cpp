// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <set>
#include <thread>

#include "overnet/oracle.hpp"

namespace overnet {

namespace {

using StableEdges = std::vector<std::pair<NodeId, NodeId>>;

StableEdges stable_edges(const GlobalState& s) {
  StableEdges out;
  for (const auto& [id, n] : s.nodes) {
    if (n.left) out.emplace_back(id, n.left->target);
    if (n.right) out.emplace_back(id, n.right->target);
  }
  return out;
}

// A state with no delegation-handshake and no search-protocol messages in
// flight satisfies all six invariants vacuously.
bool vacuously_admissible(const GlobalState& s) {
  for (const auto& [owner, ch] : s.channels)
    for (const auto& e : ch)
      if (e.msg.kind != MsgKind::kIntroduce &&
          e.msg.kind != MsgKind::kImplDelegate)
        return false;
  return true;
}

}  // namespace

bool Report::ok() const {
  if (!error.empty()) return false;
  for (const auto& [id, st] : invariants)
    if (st.failures > 0) return false;
  if (config.checks.connectivity && component_increases > 0) return false;
  if (!monotonic.holds) return false;
  if (psi_violations > 0 || reach_shrink_events > 0 ||
      fairness_violations > 0)
    return false;
  if (config.checks.probe_answering && probes_unanswered > 0) return false;
  if (config.stop == "legitimate" && (!converged_step || !closure_ok))
    return false;
  if (config.stop == "searches-resolved" && searches_unresolved > 0)
    return false;
  return true;
}

static void to_json(nlohmann::json& j, const InvariantStat& s) {
  j = {{"checked", s.checked},
       {"failures", s.failures},
       {"first_violation_step", s.first_violation_step},
       {"witness", s.witness}};
}
static void from_json(const nlohmann::json& j, InvariantStat& s) {
  s.checked = j.value("checked", std::uint64_t{0});
  s.failures = j.value("failures", std::uint64_t{0});
  s.first_violation_step = j.value("first_violation_step", std::uint64_t{0});
  s.witness = j.value("witness", std::string{});
}

void to_json(nlohmann::json& j, const Report& r) {
  j = nlohmann::json{
      {"config", r.config},
      {"steps", r.steps},
      {"trace_hash", r.trace_hash},
      {"admissible_start", r.admissible_start},
      {"closure_ok", r.closure_ok},
      {"closure_steps_observed", r.closure_steps_observed},
      {"initial_components", r.initial_components},
      {"final_components", r.final_components},
      {"component_increases", r.component_increases},
      {"invariants", r.invariants},
      {"searches_total", r.searches_total},
      {"searches_succeeded", r.searches_succeeded},
      {"searches_failed", r.searches_failed},
      {"searches_unresolved", r.searches_unresolved},
      {"wrong_node_deliveries", r.wrong_node_deliveries},
      {"max_success_hops", r.max_success_hops},
      {"monotonic",
       {{"holds", r.monotonic.holds}, {"witness", r.monotonic.witness}}},
      {"psi_checked", r.psi_checked},
      {"psi_violations", r.psi_violations},
      {"reach_checked", r.reach_checked},
      {"reach_shrink_events", r.reach_shrink_events},
      {"fairness_violations", r.fairness_violations},
      {"probes_initiated", r.probes_initiated},
      {"probes_unanswered", r.probes_unanswered},
      {"error", r.error},
      {"ok", r.ok()}};
  if (r.converged_step) j["converged_step"] = *r.converged_step;
}

void from_json(const nlohmann::json& j, Report& r) {
  r = Report{};
  j.at("config").get_to(r.config);
  r.steps = j.value("steps", std::uint64_t{0});
  r.trace_hash = j.value("trace_hash", std::uint64_t{0});
  r.admissible_start = j.value("admissible_start", false);
  if (j.contains("converged_step"))
    r.converged_step = j.at("converged_step").get<std::uint64_t>();
  r.closure_ok = j.value("closure_ok", true);
  r.closure_steps_observed = j.value("closure_steps_observed", std::uint64_t{0});
  r.initial_components = j.value("initial_components", std::size_t{0});
  r.final_components = j.value("final_components", std::size_t{0});
  r.component_increases = j.value("component_increases", std::uint64_t{0});
  if (j.contains("invariants"))
    r.invariants =
        j.at("invariants").get<std::map<std::string, InvariantStat>>();
  r.searches_total = j.value("searches_total", std::size_t{0});
  r.searches_succeeded = j.value("searches_succeeded", std::size_t{0});
  r.searches_failed = j.value("searches_failed", std::size_t{0});
  r.searches_unresolved = j.value("searches_unresolved", std::size_t{0});
  r.wrong_node_deliveries = j.value("wrong_node_deliveries", std::size_t{0});
  r.max_success_hops = j.value("max_success_hops", std::uint32_t{0});
  if (j.contains("monotonic")) {
    r.monotonic.holds = j.at("monotonic").value("holds", true);
    r.monotonic.witness = j.at("monotonic").value("witness", std::string{});
  }
  r.psi_checked = j.value("psi_checked", std::uint64_t{0});
  r.psi_violations = j.value("psi_violations", std::uint64_t{0});
  r.reach_checked = j.value("reach_checked", std::uint64_t{0});
  r.reach_shrink_events = j.value("reach_shrink_events", std::uint64_t{0});
  r.fairness_violations = j.value("fairness_violations", std::uint64_t{0});
  r.probes_initiated = j.value("probes_initiated", std::uint64_t{0});
  r.probes_unanswered = j.value("probes_unanswered", std::uint64_t{0});
  r.error = j.value("error", std::string{});
}

Report run_scenario(const ScenarioConfig& cfg, std::ostream* trace_out,
                    std::map<std::uint64_t, SearchRecord>* records_out) {
  Report r;
  r.config = cfg;
  GlobalState state;
  try {
    state = generate_initial_state(cfg);
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }

  Scheduler sched(cfg.scheduler_options());
  const SimOptions sim = cfg.sim_options();
  const std::vector<SearchOp> plan = materialize_search_plan(cfg, state);
  std::vector<SurgeryOp> surgery = cfg.surgery;
  std::stable_sort(surgery.begin(), surgery.end(),
                   [](const SurgeryOp& a, const SurgeryOp& b) {
                     return a.step < b.step;
                   });

  SearchLedger ledger;
  SnapshotCache cache;
  TraceHasher hasher;
  const std::uint64_t cadence = cfg.effective_cadence();
  const std::size_t n = state.nodes.size();

  bool last_admissible = !cfg.checks.invariants;
  std::size_t prev_components = 0;
  StableEdges closure_snapshot;
  std::map<std::pair<NodeId, NodeId>, std::set<NodeId>> prev_reach;
  std::vector<std::pair<NodeId, NodeId>> reach_samples;
  if (cfg.checks.reach_monotone) {
    std::vector<NodeId> ids;
    for (const auto& [id, node] : state.nodes) ids.push_back(id);
    const std::size_t pairs = std::min<std::size_t>(8, ids.size());
    for (std::size_t i = 0; i < pairs; ++i)
      reach_samples.emplace_back(ids[i], ids[(i * 7 + ids.size() / 2) %
                                             ids.size()]);
  }
  std::map<std::pair<NodeId, NodeId>, std::set<std::uint64_t>> outstanding;
  std::set<std::uint64_t> overdue_flagged;
  std::set<NodeId> gap_flagged;

  auto check_state = [&] {
    if (cfg.checks.invariants) {
      std::vector<Verdict> verdicts{check_invariant_1(state),
                                    check_invariant_2(state)};
      for (Verdict& v : check_invariants_3_to_6(state, cache))
        verdicts.push_back(std::move(v));
      bool all = true;
      for (const Verdict& v : verdicts) {
        InvariantStat& st = r.invariants[v.id];
        st.checked += 1;
        if (!v.holds) {
          if (st.failures == 0) {
            st.first_violation_step = state.step;
            st.witness = v.witness;
          }
          st.failures += 1;
          all = false;
        }
      }
      last_admissible = all;
      if (all) cache.record_admissible(state);
    }
    if (cfg.checks.connectivity) {
      const std::size_t c = weakly_connected_components(state).size();
      if (prev_components > 0 && c > prev_components)
        r.component_increases += 1;
      if (prev_components == 0) r.initial_components = c;
      prev_components = c;
      r.final_components = c;
    }
    if (cfg.checks.legitimacy) {
      if (!r.converged_step) {
        if (legitimate_list(state).holds) {
          r.converged_step = state.step;
          closure_snapshot = stable_edges(state);
        }
      } else {
        r.closure_steps_observed += 1;
        if (stable_edges(state) != closure_snapshot) r.closure_ok = false;
      }
    }
    for (const auto& [u, d] : reach_samples) {
      const auto cur = reach(state, u, d);
      auto it = prev_reach.find({u, d});
      if (it != prev_reach.end()) {
        r.reach_checked += 1;
        if (!std::includes(cur.begin(), cur.end(), it->second.begin(),
                           it->second.end()))
          r.reach_shrink_events += 1;
      }
      prev_reach[{u, d}] = cur;
    }
  };

  r.admissible_start =
      vacuously_admissible(state) ||
      (cfg.checks.invariants && admissible(state, cache).holds);
  check_state();

  const std::uint64_t max_total =
      cfg.max_steps + (cfg.stop == "legitimate" ? cfg.closure_steps : 0);
  std::size_t pi = 0, si = 0;

  auto process_event = [&](const TraceEvent& ev) {
    const std::string line = trace_event_line(ev);
    hasher.update(line);
    if (trace_out) *trace_out << line << '\n';
    for (const LedgerEvent& le : ev.ledger) {
      ledger.apply(le);
      if (le.kind == LedgerEvent::Kind::kSuccess &&
          le.hops > r.max_success_hops)
        r.max_success_hops = le.hops;
      if (le.kind == LedgerEvent::Kind::kBatchResolved) {
        auto it = outstanding.find({le.origin, le.dest_id});
        if (it != outstanding.end()) {
          std::erase_if(it->second,
                        [&](std::uint64_t seq) { return seq <= le.seq; });
          if (it->second.empty()) outstanding.erase(it);
        }
      }
    }
    if (cfg.checks.probe_answering && ev.kind == "timeout")
      for (const auto& em : ev.emitted)
        if (em.msg.kind == MsgKind::kProbe && !em.msg.forwarded) {
          outstanding[{em.msg.source, em.msg.dest_id}].insert(em.msg.seq);
          r.probes_initiated += 1;
        }
    if (cfg.checks.psi_decrease && ev.kind == "receive" && ev.message &&
        ev.message->kind == MsgKind::kProbe && last_admissible)
      for (const auto& em : ev.emitted)
        if (em.msg.kind == MsgKind::kProbe && em.msg.forwarded) {
          r.psi_checked += 1;
          if (!psi_less(em.msg.next, ev.message->next, ev.message->dest_id, n))
            r.psi_violations += 1;
        }
    if (cfg.checks.fairness) {
      if (ev.kind == "timeout") gap_flagged.erase(ev.actor);
      for (const auto& [to, ch] : state.channels)
        for (const auto& e : ch)
          if (e.deadline < state.step && overdue_flagged.insert(e.msg_id).second)
            r.fairness_violations += 1;
      const std::uint64_t gap_bound = sched.timeout_gap_bound(state);
      for (const auto& [id, node] : state.nodes)
        if (state.step > node.last_timeout_step + gap_bound &&
            gap_flagged.insert(id).second)
          r.fairness_violations += 1;
    }
  };

  try {
    while (state.step < max_total) {
      if (cfg.stop == "legitimate" && r.converged_step &&
          state.step >= *r.converged_step + cfg.closure_steps)
        break;
      if (cfg.stop == "searches-resolved" && pi == plan.size() &&
          si == surgery.size() && state.step > 0 &&
          ledger.unresolved() == 0 && outstanding.empty())
        break;

      TraceEvent ev;
      if (si < surgery.size() && surgery[si].step <= state.step) {
        ev = sim_surgery_drop_edge(state, surgery[si].node,
                                   surgery[si].target);
        si += 1;
      } else if (pi < plan.size() && plan[pi].step <= state.step) {
        ev = sim_inject_search(state, sched, sim, plan[pi].origin,
                               plan[pi].dest_id);
        pi += 1;
      } else {
        ev = sim_step(state, sched, sim);
      }
      process_event(ev);
      if (state.step % cadence == 0) check_state();
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }

  check_state();
  r.steps = state.step;
  r.trace_hash = hasher.digest();
  r.searches_total = ledger.total();
  r.searches_succeeded = ledger.succeeded();
  r.searches_failed = ledger.failed();
  r.searches_unresolved = ledger.unresolved();
  r.wrong_node_deliveries = ledger.wrong_node_deliveries();
  r.monotonic = ledger.monotone();
  for (const auto& [key, seqs] : outstanding) r.probes_unanswered += seqs.size();
  if (records_out) *records_out = ledger.records();
  return r;
}

std::vector<Report> run_suite(const std::vector<ScenarioConfig>& cfgs,
                              std::size_t parallelism) {
  std::vector<Report> out(cfgs.size());
  if (cfgs.empty()) return out;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(parallelism, cfgs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < cfgs.size();
         i = next.fetch_add(1))
      out[i] = run_scenario(cfgs[i]);
  };
  if (workers == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

ScenarioConfig shrink_monotonicity(const ScenarioConfig& cfg) {
  auto violates = [](const ScenarioConfig& c) {
    return !run_scenario(c).monotonic.holds;
  };
  if (!violates(cfg)) return cfg;

  ScenarioConfig cur = cfg;
  {
    // Pin the generated plan down so single injections can be dropped.
    ScenarioConfig t = cur;
    t.search_plan = materialize_search_plan(t, generate_initial_state(t));
    t.searches = 0;
    if (violates(t)) cur = t;
  }

  bool progress = true;
  while (progress) {
    progress = false;
    while (cur.max_steps > 2) {
      ScenarioConfig t = cur;
      t.max_steps = cur.max_steps / 2;
      if (!violates(t)) break;
      cur = t;
      progress = true;
    }
    for (std::size_t i = cur.search_plan.size(); i-- > 0;) {
      if (cur.search_plan.size() <= 2) break;
      ScenarioConfig t = cur;
      t.search_plan.erase(t.search_plan.begin() +
                          static_cast<std::ptrdiff_t>(i));
      if (violates(t)) {
        cur = t;
        progress = true;
      }
    }
    if (cur.id_assignment == "contiguous") {
      for (std::size_t cand = 2; cand < cur.n; ++cand) {
        ScenarioConfig t = cur;
        t.n = cand;
        std::erase_if(t.search_plan, [&](const SearchOp& op) {
          return op.origin >= static_cast<NodeId>(cand);
        });
        if (t.search_plan.size() < 2 && !t.search_plan.empty()) continue;
        if (violates(t)) {
          cur = t;
          progress = true;
          break;
        }
      }
    }
  }
  return cur;
}

}  // namespace overnet
