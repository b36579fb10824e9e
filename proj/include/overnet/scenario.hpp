// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_SCENARIO_HPP_
#define OVERNET_SCENARIO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "overnet/global_state.hpp"
#include "overnet/scheduler.hpp"
#include "overnet/sim.hpp"

namespace overnet {

// One scheduled search injection.
struct SearchOp {
  std::uint64_t step = 0;
  NodeId origin = 0;
  NodeId dest_id = 0;
};

// One scheduled state surgery (drop every record of `target` at `node`).
struct SurgeryOp {
  std::uint64_t step = 0;
  NodeId node = 0;
  NodeId target = 0;
};

// A message planted into a channel of the initial state (corrupt starts).
struct PlantedMessage {
  NodeId to = 0;
  Message msg;
};

// Which oracle checks the harness runs during the scenario. The heavyweight
// checks are opt-in so long convergence sweeps stay fast.
struct CheckFlags {
  bool invariants = false;     // invariants 1-6 at every checked step
  bool connectivity = true;    // component count never increases
  bool legitimacy = true;      // convergence + closure tracking
  bool reach_monotone = false; // sampled reach sets inclusion-monotone
  bool psi_decrease = false;   // Psi strictly shrinks per forwarded probe
  bool fairness = true;        // delivery deadlines and timeout gaps honored
  bool probe_answering = true; // every initiated probe seq gets resolved
};

// Full description of one run. The seed determines everything: the initial
// state, the scheduler and the generated search plan.
struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::size_t n = 4;
  std::string id_assignment = "contiguous";  // or "random-sparse"
  // "sorted-list" | "random-weakly-connected" | "star" | "reversed-line" |
  // "clique" | "soup-with-temporaries" | "scripted"
  std::string initial_graph = "random-weakly-connected";
  bool corrupt_start = false;
  std::vector<PlantedMessage> planted;
  std::optional<nlohmann::json> scripted_state;  // initial_graph == "scripted"

  std::string mode = "isf";  // or "negative-control-idf"
  bool fastprobe = true;
  // Base steps between probe initiations for one open destination (doubles
  // per retry). Scenarios tighten it to probe aggressively during churn.
  std::uint64_t probe_retry_interval = 512;
  // Steps between keep-alive introduction rounds toward stable neighbors.
  std::uint64_t keepalive_interval = 1024;
  std::string scheduler_policy = "aging-fair";
  double age_factor = 1.0;
  double gap_factor = 1.0;

  // Explicit plan wins; otherwise `searches` requests are generated from the
  // seed, spread over the first `search_window` steps.
  std::vector<SearchOp> search_plan;
  std::size_t searches = 0;
  std::uint64_t search_window = 0;
  bool search_missing_targets = true;

  std::vector<SurgeryOp> surgery;

  std::uint64_t max_steps = 10000;
  // "max-steps" | "legitimate" | "searches-resolved"
  std::string stop = "max-steps";
  std::uint64_t closure_steps = 0;  // extra steps after convergence
  std::uint64_t oracle_cadence = 0;  // 0 = auto: 1 if n <= 32, else 16

  CheckFlags checks;

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;

  Mode mode_enum() const;
  SimOptions sim_options() const;
  SchedulerOptions scheduler_options() const;
  std::uint64_t effective_cadence() const;
};

void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);

// Builds the seeded initial state. Non-corrupt states are repaired to weak
// connectivity (checked, by construction) before being returned.
GlobalState generate_initial_state(const ScenarioConfig& c);

// The search plan actually used for a run: the explicit plan if present,
// otherwise `searches` seeded injections over the configured window.
std::vector<SearchOp> materialize_search_plan(const ScenarioConfig& c,
                                              const GlobalState& initial);

}  // namespace overnet

#endif  // OVERNET_SCENARIO_HPP_
