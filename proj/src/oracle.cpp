// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "overnet/oracle.hpp"

#include <algorithm>
#include <deque>

namespace overnet {

namespace {

using AdjacencyMap = std::map<NodeId, std::vector<NodeId>>;

AdjacencyMap explicit_adjacency(const GlobalState& s) {
  AdjacencyMap adj;
  for (const auto& [id, n] : s.nodes) adj[id] = n.explicit_neighbors();
  return adj;
}

std::string describe(const ChannelEntry& e, NodeId owner) {
  return "msg " + std::to_string(e.msg_id) + " (" +
         msg_kind_name(e.msg.kind) + ") in channel of " +
         std::to_string(owner);
}

// BFS from `origin` over explicit edges that strictly decrease the distance
// to dest_id with every hop.
std::set<NodeId> reach_impl(const AdjacencyMap& adj, NodeId origin,
                            NodeId dest_id) {
  std::set<NodeId> seen{origin};
  std::deque<NodeId> queue{origin};
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop_front();
    auto it = adj.find(x);
    if (it == adj.end()) continue;
    for (NodeId y : it->second)
      if (dist(y, dest_id) < dist(x, dest_id) && seen.insert(y).second)
        queue.push_back(y);
  }
  return seen;
}

// Path u -> goal over explicit edges (x,y) with x.eseq[y] > threshold,
// never using the excluded edge. Shared by invariants 1 and 2.
bool eseq_filtered_path(const GlobalState& s, NodeId from, NodeId goal,
                        std::uint64_t threshold, NodeId excluded_from,
                        NodeId excluded_to) {
  std::set<NodeId> seen{from};
  std::deque<NodeId> queue{from};
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop_front();
    if (x == goal) return true;
    auto it = s.nodes.find(x);
    if (it == s.nodes.end()) continue;
    for (NodeId y : it->second.explicit_neighbors()) {
      if (x == excluded_from && y == excluded_to) continue;
      if (it->second.eseq.get(y) <= threshold) continue;
      if (seen.insert(y).second) queue.push_back(y);
    }
  }
  return false;
}

struct DisjointSet {
  std::map<NodeId, NodeId> parent;
  NodeId find(NodeId x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    return it->second = find(it->second);
  }
  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

// Distance multiset of `members` to dest_id as a sparse base-n number:
// digit[d] = number of members at distance d, carries normalized upward.
std::map<std::uint64_t, std::uint64_t> psi_digits(
    const std::vector<NodeId>& members, NodeId dest_id, std::size_t n) {
  const std::uint64_t base = std::max<std::size_t>(n, 2);
  std::map<std::uint64_t, std::uint64_t> digits;
  for (NodeId u : members) digits[dist(u, dest_id)] += 1;
  for (auto it = digits.begin(); it != digits.end(); ++it)
    if (it->second >= base) {
      digits[it->first + 1] += it->second / base;
      it->second %= base;
    }
  std::erase_if(digits, [](const auto& kv) { return kv.second == 0; });
  return digits;
}

}  // namespace

std::set<NodeId> reach(const GlobalState& s, NodeId origin, NodeId dest_id) {
  return reach_impl(explicit_adjacency(s), origin, dest_id);
}

std::set<NodeId> reach_of_set(const GlobalState& s,
                              const std::vector<NodeId>& next,
                              NodeId dest_id) {
  const auto adj = explicit_adjacency(s);
  std::set<NodeId> out;
  for (NodeId u : next) {
    if (!s.nodes.contains(u)) continue;
    auto r = reach_impl(adj, u, dest_id);
    out.insert(r.begin(), r.end());
  }
  return out;
}

bool explicit_path_exists(const GlobalState& s, NodeId u, NodeId v) {
  std::set<NodeId> seen{u};
  std::deque<NodeId> queue{u};
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop_front();
    if (x == v) return true;
    auto it = s.nodes.find(x);
    if (it == s.nodes.end()) continue;
    for (NodeId y : it->second.explicit_neighbors())
      if (seen.insert(y).second) queue.push_back(y);
  }
  return false;
}

Verdict check_invariant_1(const GlobalState& s) {
  Verdict v{"1", true, ""};
  for (const auto& [owner, ch] : s.channels)
    for (const auto& e : ch) {
      if (e.msg.kind != MsgKind::kDelegateReq) continue;
      const NodeId u = e.msg.sender;
      const NodeId w = e.msg.subject;
      auto it = s.nodes.find(u);
      if (it == s.nodes.end()) {
        return {"1", false, describe(e, owner) + ": sender " +
                                std::to_string(u) + " does not exist"};
      }
      const std::uint64_t t = it->second.eseq.get(w);
      if (t > e.msg.eseq) continue;  // stale handshake, escape clause
      if (!eseq_filtered_path(s, u, owner, t, u, w))
        return {"1", false, describe(e, owner) +
                                ": no eseq-guarded path from " +
                                std::to_string(u) + " avoiding edge (" +
                                std::to_string(u) + "," + std::to_string(w) +
                                ")"};
    }
  return v;
}

Verdict check_invariant_2(const GlobalState& s) {
  Verdict v{"2", true, ""};
  for (const auto& [owner, ch] : s.channels)
    for (const auto& e : ch) {
      if (e.msg.kind != MsgKind::kDelegateAck) continue;
      const NodeId w = e.msg.subject;
      const auto& u = s.nodes.at(owner);
      const std::uint64_t t = u.eseq.get(w);
      if (t > e.msg.eseq) continue;  // stale handshake, escape clause
      if (!s.nodes.contains(w))
        return {"2", false, describe(e, owner) + ": subject " +
                                std::to_string(w) + " does not exist"};
      if (!eseq_filtered_path(s, owner, w, t, owner, w))
        return {"2", false, describe(e, owner) +
                                ": no eseq-guarded path from " +
                                std::to_string(owner) + " to " +
                                std::to_string(w) + " avoiding edge (" +
                                std::to_string(owner) + "," +
                                std::to_string(w) + ")"};
    }
  return v;
}

void SnapshotCache::record_admissible(const GlobalState& s) {
  const auto adj = explicit_adjacency(s);
  // For each possible target v, walk the distance-decreasing edges backwards
  // from v; every node that reaches v gets its current seq recorded.
  for (const auto& [d, target] : s.nodes) {
    std::map<NodeId, std::vector<NodeId>> rev;
    for (const auto& [x, ys] : adj)
      for (NodeId y : ys)
        if (dist(y, d) < dist(x, d)) rev[y].push_back(x);
    std::set<NodeId> seen{d};
    std::deque<NodeId> queue{d};
    while (!queue.empty()) {
      const NodeId y = queue.front();
      queue.pop_front();
      auto it = rev.find(y);
      if (it == rev.end()) continue;
      for (NodeId x : it->second)
        if (seen.insert(x).second) queue.push_back(x);
    }
    for (NodeId u : seen) {
      const std::uint64_t seq = s.nodes.at(u).search.seq(d);
      auto [it, inserted] = min_seq_.try_emplace({u, d}, seq);
      if (!inserted && seq < it->second) it->second = seq;
    }
  }
}

std::optional<std::uint64_t> SnapshotCache::min_seq_when_reachable(
    NodeId source, NodeId dest_id) const {
  auto it = min_seq_.find({source, dest_id});
  if (it == min_seq_.end()) return std::nullopt;
  return it->second;
}

std::vector<Verdict> check_invariants_3_to_6(const GlobalState& s,
                                             const SnapshotCache& cache) {
  std::vector<Verdict> out{{"3", true, ""}, {"4", true, ""},
                           {"5", true, ""}, {"6", true, ""}};
  auto fail = [&](int idx, const std::string& witness) {
    if (out[idx].holds) {
      out[idx].holds = false;
      out[idx].witness = witness;
    }
  };

  for (const auto& [owner, ch] : s.channels)
    for (const auto& e : ch) {
      const Message& m = e.msg;
      switch (m.kind) {
        case MsgKind::kProbe: {
          // 3a: the holder is in Next and is the farthest member.
          const bool in_next =
              std::find(m.next.begin(), m.next.end(), owner) != m.next.end();
          if (!in_next) {
            fail(0, describe(e, owner) + ": holder not in Next");
            break;
          }
          for (NodeId w : m.next)
            if (dist(w, m.dest_id) > dist(owner, m.dest_id)) {
              fail(0, describe(e, owner) + ": Next member " +
                          std::to_string(w) + " farther than holder");
            }
          // 3b: R(Next) within R(source).
          if (!s.nodes.contains(m.source)) {
            fail(0, describe(e, owner) + ": source does not exist");
            break;
          }
          const auto r_next = reach_of_set(s, m.next, m.dest_id);
          const auto r_source = reach(s, m.source, m.dest_id);
          if (!std::includes(r_source.begin(), r_source.end(), r_next.begin(),
                             r_next.end()))
            fail(0, describe(e, owner) + ": R(Next) not within R(source)");
          // 3c: a reachable target was never probe-reachable under an older
          // seq (checked against the admissible-state history cache).
          if (s.nodes.contains(m.dest_id) && !r_next.contains(m.dest_id)) {
            auto min_seq = cache.min_seq_when_reachable(m.source, m.dest_id);
            if (min_seq && *min_seq < m.seq)
              fail(0, describe(e, owner) +
                          ": target was reachable from source at seq " +
                          std::to_string(*min_seq) + " < " +
                          std::to_string(m.seq));
          }
          break;
        }
        case MsgKind::kFastProbe: {
          if (!s.nodes.contains(m.source) ||
              !reach(s, m.source, m.dest_id).contains(owner))
            fail(0, describe(e, owner) + ": holder not in R(source, destID)");
          break;
        }
        case MsgKind::kPSuccess: {
          if (m.dest != m.dest_id || !s.nodes.contains(m.dest))
            fail(1, describe(e, owner) + ": dest " + std::to_string(m.dest) +
                        " is not the node with id " +
                        std::to_string(m.dest_id));
          else if (!reach(s, owner, m.dest_id).contains(m.dest))
            fail(1, describe(e, owner) + ": dest not in R(holder, destID)");
          break;
        }
        case MsgKind::kPFail: {
          if (!s.nodes.contains(m.dest_id)) break;
          auto min_seq = cache.min_seq_when_reachable(owner, m.dest_id);
          if (min_seq && *min_seq < m.seq)
            fail(2, describe(e, owner) +
                        ": target was reachable from holder at seq " +
                        std::to_string(*min_seq) + " < " +
                        std::to_string(m.seq));
          break;
        }
        case MsgKind::kSearch: {
          if (owner != m.dest_id)
            fail(3, describe(e, owner) + ": holder id differs from destID " +
                        std::to_string(m.dest_id));
          else if (!s.nodes.contains(m.origin_node) ||
                   !reach(s, m.origin_node, m.dest_id).contains(owner))
            fail(3, describe(e, owner) + ": holder not in R(origin, destID)");
          break;
        }
        default:
          break;
      }
    }
  return out;
}

Verdict admissible(const GlobalState& s, const SnapshotCache& cache) {
  for (const Verdict& v :
       {check_invariant_1(s), check_invariant_2(s)})
    if (!v.holds) return {"admissible", false, "invariant " + v.id + ": " + v.witness};
  for (const Verdict& v : check_invariants_3_to_6(s, cache))
    if (!v.holds) return {"admissible", false, "invariant " + v.id + ": " + v.witness};
  return {"admissible", true, ""};
}

Verdict legitimate_list(const GlobalState& s) {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : s.nodes) ids.push_back(id);  // sorted by map
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const NodeState& n = s.nodes.at(ids[i]);
    if (!n.temporaries.empty())
      return {"legitimacy", false,
              "node " + std::to_string(n.id) + " holds a temporary edge"};
    const std::optional<NodeId> want_left =
        i > 0 ? std::optional<NodeId>(ids[i - 1]) : std::nullopt;
    const std::optional<NodeId> want_right =
        i + 1 < ids.size() ? std::optional<NodeId>(ids[i + 1]) : std::nullopt;
    const std::optional<NodeId> got_left =
        n.left ? std::optional<NodeId>(n.left->target) : std::nullopt;
    const std::optional<NodeId> got_right =
        n.right ? std::optional<NodeId>(n.right->target) : std::nullopt;
    if (got_left != want_left || got_right != want_right)
      return {"legitimacy", false,
              "node " + std::to_string(n.id) +
                  " does not point at its list neighbors"};
  }
  for (const auto& [owner, ch] : s.channels)
    for (const auto& e : ch)
      if (e.msg.kind == MsgKind::kDelegateReq ||
          e.msg.kind == MsgKind::kDelegateAck)
        return {"legitimacy", false,
                describe(e, owner) + ": delegation handshake in flight"};
  return {"legitimacy", true, ""};
}

std::vector<std::vector<NodeId>> weakly_connected_components(
    const GlobalState& s) {
  DisjointSet ds;
  for (const auto& [id, n] : s.nodes) {
    for (NodeId w : n.explicit_neighbors())
      if (s.nodes.contains(w)) ds.unite(id, w);
  }
  for (const auto& [owner, ch] : s.channels)
    for (const auto& e : ch)
      for (NodeId w : embedded_references(e.msg))
        if (s.nodes.contains(w)) ds.unite(owner, w);
  std::map<NodeId, std::vector<NodeId>> groups;
  for (const auto& [id, n] : s.nodes) groups[ds.find(id)].push_back(id);
  std::vector<std::vector<NodeId>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

boost::multiprecision::cpp_int psi(const std::vector<NodeId>& members,
                                   NodeId dest_id, std::size_t n) {
  boost::multiprecision::cpp_int sum = 0;
  for (NodeId u : members)
    sum += boost::multiprecision::pow(
        boost::multiprecision::cpp_int(std::max<std::size_t>(n, 2)),
        static_cast<unsigned>(dist(u, dest_id)));
  return sum;
}

bool psi_less(const std::vector<NodeId>& a, const std::vector<NodeId>& b,
              NodeId dest_id, std::size_t n) {
  const auto da = psi_digits(a, dest_id, n);
  const auto db = psi_digits(b, dest_id, n);
  // Compare from the most significant digit down.
  auto ia = da.rbegin();
  auto ib = db.rbegin();
  while (ia != da.rend() && ib != db.rend()) {
    if (ia->first != ib->first) return ia->first < ib->first;
    if (ia->second != ib->second) return ia->second < ib->second;
    ++ia;
    ++ib;
  }
  return ia == da.rend() && ib != db.rend();
}

std::uint64_t phi_temporary(const GlobalState& s) {
  std::map<NodeId, std::uint64_t> rank;
  std::uint64_t r = 0;
  for (const auto& [id, n] : s.nodes) rank[id] = r++;
  std::map<NodeId, std::uint64_t> worst;  // target -> longest remaining path
  for (const auto& [id, n] : s.nodes)
    for (const auto& e : n.temporaries) {
      if (!rank.contains(e.target)) continue;
      const std::uint64_t span =
          rank[id] > rank[e.target] ? rank[id] - rank[e.target]
                                    : rank[e.target] - rank[id];
      const std::uint64_t len = span > 0 ? span - 1 : 0;
      auto [it, inserted] = worst.try_emplace(e.target, len);
      if (!inserted && len > it->second) it->second = len;
    }
  std::uint64_t phi = 0;
  for (const auto& [target, len] : worst) phi += len;
  return phi;
}

}  // namespace overnet
