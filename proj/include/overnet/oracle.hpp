// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_ORACLE_HPP_
#define OVERNET_ORACLE_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "overnet/global_state.hpp"

namespace overnet {

// Global-state inspector. Everything here is read-only over a GlobalState
// snapshot and never visible to protocol code.

// Outcome of one oracle check. A false verdict always carries a witness.
struct Verdict {
  std::string id;  // "1".."6" | "connectivity" | "legitimacy" | "monotonic"
  bool holds = true;
  std::string witness;
};

// R(origin, dest_id): every node reachable from origin along explicit edges
// where each hop strictly decreases the distance to dest_id. Contains origin.
std::set<NodeId> reach(const GlobalState& s, NodeId origin, NodeId dest_id);

// R(Next, dest_id) for a set of starting points: the union of their R sets.
std::set<NodeId> reach_of_set(const GlobalState& s,
                              const std::vector<NodeId>& next, NodeId dest_id);

// E(u,v): directed reachability over explicit edges.
bool explicit_path_exists(const GlobalState& s, NodeId u, NodeId v);

// Delegation-message invariants: each delegate-req (1) / delegate-ack (2) in
// some channel is either stale (the requester's eseq already moved past it)
// or witnessed by a path avoiding the delegated edge whose every hop carries
// an eseq strictly above the requester's entry for the delegated reference.
Verdict check_invariant_1(const GlobalState& s);
Verdict check_invariant_2(const GlobalState& s);

// History cache behind the invariants that quantify over past states: for
// every (source, dest_id) it keeps the smallest source.seq[dest_id] observed
// in an admissible checked state in which the node with id dest_id was in
// R(source, dest_id). Updated only from states the oracle deemed admissible.
class SnapshotCache {
 public:
  void record_admissible(const GlobalState& s);
  std::optional<std::uint64_t> min_seq_when_reachable(NodeId source,
                                                      NodeId dest_id) const;

 private:
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> min_seq_;
};

// Search-message invariants 3 (probe/fastprobe), 4 (psuccess), 5 (pfail) and
// 6 (search), checked per pending message. Returns one verdict per invariant
// id ("3".."6"), each aggregating all messages of that kind.
std::vector<Verdict> check_invariants_3_to_6(const GlobalState& s,
                                             const SnapshotCache& cache);

// Conjunction of invariants 1-6; a state is admissible iff this holds.
Verdict admissible(const GlobalState& s, const SnapshotCache& cache);

// Legitimacy for the list topology: the stable edges form exactly the sorted
// doubly-linked list over all ids, no temporary edges exist, and no
// delegation handshake is in flight. This condition is closed under steps:
// remaining traffic (keep-alives, implicit references, search messages) can
// no longer change the explicit edge set.
Verdict legitimate_list(const GlobalState& s);

// Partition of the nodes into weakly connected components of NG, i.e. over
// explicit edges plus the references embedded in pending messages.
std::vector<std::vector<NodeId>> weakly_connected_components(
    const GlobalState& s);

// Psi(U, dest_id) = sum over u in U of n^dist(u, dest_id), exactly.
boost::multiprecision::cpp_int psi(const std::vector<NodeId>& members,
                                   NodeId dest_id, std::size_t n);

// Psi(a, dest_id) < Psi(b, dest_id) without materializing the powers:
// compares the distance multisets as sparse base-n numbers, so it stays
// cheap for sparse id spaces where distances are huge.
bool psi_less(const std::vector<NodeId>& a, const std::vector<NodeId>& b,
              NodeId dest_id, std::size_t n);

// Temporary-edge potential: sum over nodes w of the largest remaining
// delegation path length (rank distance in the sorted id order, minus one)
// among temporary edges pointing at w. Zero iff no temporaries remain.
std::uint64_t phi_temporary(const GlobalState& s);

}  // namespace overnet

#endif  // OVERNET_ORACLE_HPP_
