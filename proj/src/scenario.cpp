// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>

namespace overnet {

namespace {

const char* kGraphKinds[] = {"sorted-list",       "random-weakly-connected",
                             "star",              "reversed-line",
                             "clique",            "soup-with-temporaries",
                             "scripted"};

// Mirrors the list classification: stores the reference as the stable side
// neighbor when it is closer than (or replaces an absent) current one, and
// as a temporary otherwise.
void present_reference(GlobalState& s, NodeState& node, NodeId target) {
  if (target == node.id || node.has_explicit_edge(target)) return;
  auto& side = target > node.id ? node.right : node.left;
  EdgeRecord rec{target, EdgeKind::kStable, std::nullopt,
                 s.next_edge_instance++};
  if (!side || dist(target, node.id) < dist(side->target, node.id)) {
    if (side) {
      EdgeRecord t = *side;
      t.kind = EdgeKind::kTemporary;
      node.temporaries.push_back(std::move(t));
    }
    side = rec;
  } else {
    rec.kind = EdgeKind::kTemporary;
    node.temporaries.push_back(std::move(rec));
  }
}

void append_message(GlobalState& s, NodeId to, Message m, double age_factor) {
  ChannelEntry e;
  e.msg_id = s.next_msg_id++;
  e.send_step = 0;
  e.pending_at_send = s.pending_messages();
  const double n = static_cast<double>(s.nodes.size());
  e.deadline = static_cast<std::uint64_t>(std::llround(
      4.0 * n * (static_cast<double>(e.pending_at_send) + n) * age_factor));
  if (e.deadline == 0) e.deadline = 1;
  e.msg = std::move(m);
  s.channels[to].push_back(std::move(e));
}

std::vector<NodeId> assign_ids(const ScenarioConfig& c, std::mt19937_64& rng) {
  std::vector<NodeId> ids;
  if (c.id_assignment == "contiguous") {
    for (std::size_t i = 0; i < c.n; ++i) ids.push_back(static_cast<NodeId>(i));
    return ids;
  }
  std::set<NodeId> picked;
  std::uniform_int_distribution<NodeId> d(0, 1000000);
  while (picked.size() < c.n) picked.insert(d(rng));
  ids.assign(picked.begin(), picked.end());
  return ids;
}

// Links the weakly connected components of NG into one by planting
// introduction messages between component representatives.
void repair_connectivity(GlobalState& s, double age_factor) {
  std::map<NodeId, NodeId> parent;
  std::function<NodeId(NodeId)> find = [&](NodeId x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    return parent[x] = find(it->second);
  };
  auto unite = [&](NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  };
  for (const auto& [id, n] : s.nodes)
    for (NodeId w : n.explicit_neighbors())
      if (s.nodes.contains(w)) unite(id, w);
  for (const auto& [owner, ch] : s.channels)
    for (const auto& e : ch)
      for (NodeId w : embedded_references(e.msg))
        if (s.nodes.contains(w)) unite(owner, w);

  std::map<NodeId, NodeId> reps;  // root -> smallest member
  for (const auto& [id, n] : s.nodes) reps.try_emplace(find(id), id);
  std::optional<NodeId> prev;
  for (const auto& [root, rep] : reps) {
    if (prev) {
      append_message(s, *prev, make_introduce(rep), age_factor);
      unite(*prev, rep);
    }
    prev = rep;
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (id_assignment != "contiguous" && id_assignment != "random-sparse")
    throw std::invalid_argument("unknown id assignment: " + id_assignment);
  if (std::find_if(std::begin(kGraphKinds), std::end(kGraphKinds),
                   [&](const char* k) { return initial_graph == k; }) ==
      std::end(kGraphKinds))
    throw std::invalid_argument("unknown initial graph: " + initial_graph);
  if (initial_graph == "scripted" && !scripted_state)
    throw std::invalid_argument("scripted initial graph needs scripted_state");
  if (!planted.empty() && !corrupt_start)
    throw std::invalid_argument("planted messages require corrupt_start");
  if (mode != "isf" && mode != "negative-control-idf")
    throw std::invalid_argument("unknown mode: " + mode);
  if (probe_retry_interval == 0)
    throw std::invalid_argument("probe_retry_interval must be positive");
  if (keepalive_interval == 0)
    throw std::invalid_argument("keepalive_interval must be positive");
  if (stop != "max-steps" && stop != "legitimate" && stop != "searches-resolved")
    throw std::invalid_argument("unknown stop condition: " + stop);
  Scheduler probe{scheduler_options()};  // rejects unknown policies
  (void)probe;
}

Mode ScenarioConfig::mode_enum() const {
  return mode == "isf" ? Mode::kIsf : Mode::kNegativeControlIdf;
}

SimOptions ScenarioConfig::sim_options() const {
  return {mode_enum(), fastprobe, probe_retry_interval, keepalive_interval};
}

SchedulerOptions ScenarioConfig::scheduler_options() const {
  SchedulerOptions o;
  o.policy = scheduler_policy;
  o.seed = seed ^ 0x9e3779b97f4a7c15ull;
  o.age_factor = age_factor;
  o.gap_factor = gap_factor;
  return o;
}

std::uint64_t ScenarioConfig::effective_cadence() const {
  if (oracle_cadence > 0) return oracle_cadence;
  return n <= 32 ? 1 : 16;
}

static void to_json(nlohmann::json& j, const SearchOp& o) {
  j = {{"step", o.step}, {"origin", o.origin}, {"dest_id", o.dest_id}};
}
static void from_json(const nlohmann::json& j, SearchOp& o) {
  j.at("step").get_to(o.step);
  j.at("origin").get_to(o.origin);
  j.at("dest_id").get_to(o.dest_id);
}
static void to_json(nlohmann::json& j, const SurgeryOp& o) {
  j = {{"step", o.step}, {"node", o.node}, {"target", o.target}};
}
static void from_json(const nlohmann::json& j, SurgeryOp& o) {
  j.at("step").get_to(o.step);
  j.at("node").get_to(o.node);
  j.at("target").get_to(o.target);
}
static void to_json(nlohmann::json& j, const PlantedMessage& p) {
  j = {{"to", p.to}, {"msg", p.msg}};
}
static void from_json(const nlohmann::json& j, PlantedMessage& p) {
  j.at("to").get_to(p.to);
  j.at("msg").get_to(p.msg);
}
static void to_json(nlohmann::json& j, const CheckFlags& f) {
  j = {{"invariants", f.invariants},
       {"connectivity", f.connectivity},
       {"legitimacy", f.legitimacy},
       {"reach_monotone", f.reach_monotone},
       {"psi_decrease", f.psi_decrease},
       {"fairness", f.fairness},
       {"probe_answering", f.probe_answering}};
}
static void from_json(const nlohmann::json& j, CheckFlags& f) {
  f.invariants = j.value("invariants", false);
  f.connectivity = j.value("connectivity", true);
  f.legitimacy = j.value("legitimacy", true);
  f.reach_monotone = j.value("reach_monotone", false);
  f.psi_decrease = j.value("psi_decrease", false);
  f.fairness = j.value("fairness", true);
  f.probe_answering = j.value("probe_answering", true);
}

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = nlohmann::json{{"seed", c.seed},
                     {"n", c.n},
                     {"id_assignment", c.id_assignment},
                     {"initial_graph", c.initial_graph},
                     {"corrupt_start", c.corrupt_start},
                     {"planted", c.planted},
                     {"mode", c.mode},
                     {"fastprobe", c.fastprobe},
                     {"probe_retry_interval", c.probe_retry_interval},
                     {"keepalive_interval", c.keepalive_interval},
                     {"scheduler_policy", c.scheduler_policy},
                     {"age_factor", c.age_factor},
                     {"gap_factor", c.gap_factor},
                     {"search_plan", c.search_plan},
                     {"searches", c.searches},
                     {"search_window", c.search_window},
                     {"search_missing_targets", c.search_missing_targets},
                     {"surgery", c.surgery},
                     {"max_steps", c.max_steps},
                     {"stop", c.stop},
                     {"closure_steps", c.closure_steps},
                     {"oracle_cadence", c.oracle_cadence},
                     {"checks", c.checks}};
  if (c.scripted_state) j["scripted_state"] = *c.scripted_state;
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  c = ScenarioConfig{};
  c.seed = j.value("seed", std::uint64_t{0});
  c.n = j.value("n", std::size_t{4});
  c.id_assignment = j.value("id_assignment", std::string("contiguous"));
  c.initial_graph =
      j.value("initial_graph", std::string("random-weakly-connected"));
  c.corrupt_start = j.value("corrupt_start", false);
  if (j.contains("planted"))
    c.planted = j.at("planted").get<std::vector<PlantedMessage>>();
  if (j.contains("scripted_state")) c.scripted_state = j.at("scripted_state");
  c.mode = j.value("mode", std::string("isf"));
  c.fastprobe = j.value("fastprobe", true);
  c.probe_retry_interval =
      j.value("probe_retry_interval", std::uint64_t{512});
  c.keepalive_interval = j.value("keepalive_interval", std::uint64_t{1024});
  c.scheduler_policy = j.value("scheduler_policy", std::string("aging-fair"));
  c.age_factor = j.value("age_factor", 1.0);
  c.gap_factor = j.value("gap_factor", 1.0);
  if (j.contains("search_plan"))
    c.search_plan = j.at("search_plan").get<std::vector<SearchOp>>();
  c.searches = j.value("searches", std::size_t{0});
  c.search_window = j.value("search_window", std::uint64_t{0});
  c.search_missing_targets = j.value("search_missing_targets", true);
  if (j.contains("surgery"))
    c.surgery = j.at("surgery").get<std::vector<SurgeryOp>>();
  c.max_steps = j.value("max_steps", std::uint64_t{10000});
  c.stop = j.value("stop", std::string("max-steps"));
  c.closure_steps = j.value("closure_steps", std::uint64_t{0});
  c.oracle_cadence = j.value("oracle_cadence", std::uint64_t{0});
  if (j.contains("checks")) c.checks = j.at("checks").get<CheckFlags>();
}

GlobalState generate_initial_state(const ScenarioConfig& c) {
  c.validate();
  if (c.initial_graph == "scripted") {
    GlobalState s = c.scripted_state->get<GlobalState>();
    for (const auto& p : c.planted) append_message(s, p.to, p.msg, c.age_factor);
    return s;
  }

  std::mt19937_64 rng(c.seed);
  GlobalState s;
  const std::vector<NodeId> ids = assign_ids(c, rng);
  for (NodeId id : ids) {
    NodeState n;
    n.id = id;
    s.nodes[id] = std::move(n);
  }

  auto random_id = [&] {
    return ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(
        rng)];
  };

  if (c.initial_graph == "sorted-list") {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i > 0)
        s.nodes[ids[i]].left = EdgeRecord{ids[i - 1], EdgeKind::kStable,
                                          std::nullopt, s.next_edge_instance++};
      if (i + 1 < ids.size())
        s.nodes[ids[i]].right = EdgeRecord{ids[i + 1], EdgeKind::kStable,
                                           std::nullopt,
                                           s.next_edge_instance++};
    }
  } else if (c.initial_graph == "star") {
    NodeState& center = s.nodes[ids.front()];
    for (std::size_t i = 1; i < ids.size(); ++i)
      present_reference(s, center, ids[i]);
  } else if (c.initial_graph == "reversed-line") {
    for (std::size_t i = 1; i < ids.size(); ++i)
      s.nodes[ids[i]].left = EdgeRecord{ids[i - 1], EdgeKind::kStable,
                                        std::nullopt, s.next_edge_instance++};
  } else if (c.initial_graph == "clique") {
    for (NodeId u : ids) {
      NodeState& node = s.nodes[u];
      for (NodeId w : ids) present_reference(s, node, w);
    }
  } else {  // random-weakly-connected / soup-with-temporaries
    for (NodeId u : ids) {
      NodeState& node = s.nodes[u];
      const int refs = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int k = 0; k < refs; ++k) present_reference(s, node, random_id());
    }
    if (c.initial_graph == "soup-with-temporaries") {
      // Sprinkle references in transit on top of the random edges.
      const std::size_t extra = 2 * ids.size();
      for (std::size_t k = 0; k < extra; ++k) {
        const NodeId to = random_id();
        const NodeId subject = random_id();
        Message m = std::uniform_int_distribution<int>(0, 1)(rng)
                        ? make_introduce(subject)
                        : make_impl_delegate(subject, std::nullopt);
        append_message(s, to, std::move(m), c.age_factor);
      }
    }
  }

  // Randomized-but-typed residue: eseq entries are arbitrary small values
  // (the tables are monotone counters, any start is a legal start).
  for (auto& [id, node] : s.nodes)
    for (NodeId w : node.explicit_neighbors())
      node.eseq.raise(w, std::uniform_int_distribution<std::uint64_t>(0, 3)(rng));

  repair_connectivity(s, c.age_factor);
  for (const auto& p : c.planted) append_message(s, p.to, p.msg, c.age_factor);
  return s;
}

std::vector<SearchOp> materialize_search_plan(const ScenarioConfig& c,
                                              const GlobalState& initial) {
  std::vector<SearchOp> plan = c.search_plan;
  if (plan.empty() && c.searches > 0) {
    std::mt19937_64 rng(c.seed ^ 0x5ee45ee45ee45ee4ull);
    std::vector<NodeId> ids;
    for (const auto& [id, n] : initial.nodes) ids.push_back(id);
    const std::uint64_t window =
        c.search_window > 0 ? c.search_window : std::max<std::uint64_t>(
                                                    1, c.max_steps / 2);
    for (std::size_t k = 0; k < c.searches; ++k) {
      SearchOp op;
      op.step = std::uniform_int_distribution<std::uint64_t>(0, window)(rng);
      op.origin = ids[std::uniform_int_distribution<std::size_t>(
          0, ids.size() - 1)(rng)];
      if (c.search_missing_targets &&
          std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
        NodeId miss;
        do {
          miss = std::uniform_int_distribution<NodeId>(0, 1000100)(rng);
        } while (initial.nodes.contains(miss));
        op.dest_id = miss;
      } else {
        op.dest_id = ids[std::uniform_int_distribution<std::size_t>(
            0, ids.size() - 1)(rng)];
      }
      plan.push_back(op);
    }
  }
  std::stable_sort(plan.begin(), plan.end(),
                   [](const SearchOp& a, const SearchOp& b) {
                     return a.step < b.step;
                   });
  return plan;
}

}  // namespace overnet
