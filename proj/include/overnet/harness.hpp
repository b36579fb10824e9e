// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_HARNESS_HPP_
#define OVERNET_HARNESS_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "overnet/ledger.hpp"
#include "overnet/scenario.hpp"

namespace overnet {

// Aggregated outcome of one checked property over a run.
struct InvariantStat {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  std::uint64_t first_violation_step = 0;
  std::string witness;
};

// Machine-parseable result of one run; together with the config it pins the
// run down completely (replaying reproduces the identical trace hash).
struct Report {
  ScenarioConfig config;
  std::uint64_t steps = 0;
  std::uint64_t trace_hash = 0;

  bool admissible_start = false;
  std::optional<std::uint64_t> converged_step;
  bool closure_ok = true;
  std::uint64_t closure_steps_observed = 0;

  std::size_t initial_components = 0;
  std::size_t final_components = 0;
  std::uint64_t component_increases = 0;

  std::map<std::string, InvariantStat> invariants;  // keys "1".."6"

  std::size_t searches_total = 0;
  std::size_t searches_succeeded = 0;
  std::size_t searches_failed = 0;
  std::size_t searches_unresolved = 0;
  std::size_t wrong_node_deliveries = 0;
  std::uint32_t max_success_hops = 0;
  Verdict monotonic{"monotonic", true, ""};

  std::uint64_t psi_checked = 0;
  std::uint64_t psi_violations = 0;
  std::uint64_t reach_checked = 0;
  std::uint64_t reach_shrink_events = 0;
  std::uint64_t fairness_violations = 0;
  std::uint64_t probes_initiated = 0;
  std::uint64_t probes_unanswered = 0;

  std::string error;

  // True iff no enabled check was violated and the configured stop goal was
  // reached. Negative-control expectations are the caller's concern.
  bool ok() const;
};

void to_json(nlohmann::json& j, const Report& r);
void from_json(const nlohmann::json& j, Report& r);

// Executes one scenario. When `trace_out` is given, every trace event is
// appended to it as one JSON line; the trace hash is computed either way.
// `records_out`, when given, receives the full per-search ledger.
Report run_scenario(const ScenarioConfig& cfg, std::ostream* trace_out = nullptr,
                    std::map<std::uint64_t, SearchRecord>* records_out = nullptr);

// Independent runs, optionally spread over worker threads. Result order
// matches the input order regardless of parallelism.
std::vector<Report> run_suite(const std::vector<ScenarioConfig>& cfgs,
                              std::size_t parallelism);

// Greedy minimization of a config that exhibits a ledger monotonicity
// violation: fewer steps, fewer planned searches, fewer nodes. Returns the
// input unchanged when it does not violate, and is idempotent at a fixpoint.
ScenarioConfig shrink_monotonicity(const ScenarioConfig& cfg);

}  // namespace overnet

#endif  // OVERNET_HARNESS_HPP_
