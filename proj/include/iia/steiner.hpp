#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "iia/model.hpp"

namespace iia {

inline constexpr std::uint32_t kNoNode = 0xffffffffu;

/// Directed graph with unit arc weights over nodes 0..n-1, plus a
/// distinguished root. This is the local, remapped form of a reachable
/// subgraph that the tree construction works on.
struct UnitGraph {
  std::uint32_t root = 0;
  std::vector<std::vector<std::uint32_t>> out;  // sorted adjacency lists

  std::size_t node_count() const { return out.size(); }
};

struct BfsResult {
  std::vector<std::uint32_t> dist;  // kNoNode when unreached
  std::vector<std::uint32_t> pred;  // kNoNode for sources and unreached

  bool reached(std::uint32_t v) const { return dist[v] != kNoNode; }
};

/// Multi-source BFS. Frontiers are expanded in ascending node order, so a
/// node first reached at distance d gets the smallest eligible predecessor;
/// the whole result is a pure function of the graph and source set.
inline BfsResult bfs_dist(const UnitGraph& g,
                          std::span<const std::uint32_t> sources) {
  BfsResult r;
  r.dist.assign(g.node_count(), kNoNode);
  r.pred.assign(g.node_count(), kNoNode);
  std::vector<std::uint32_t> frontier(sources.begin(), sources.end());
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
  for (std::uint32_t s : frontier) r.dist[s] = 0;
  std::vector<std::uint32_t> next;
  while (!frontier.empty()) {
    next.clear();
    for (std::uint32_t x : frontier) {
      for (std::uint32_t y : g.out[x]) {
        if (r.dist[y] != kNoNode) continue;
        r.dist[y] = r.dist[x] + 1;
        r.pred[y] = x;
        next.push_back(y);
      }
    }
    std::sort(next.begin(), next.end());
    frontier = next;
  }
  return r;
}

/// A directed tree embedded in a UnitGraph: every node except the root has
/// a parent, and (parent[v], v) is an arc of the graph. Cost is the arc
/// count, i.e. nodes() - 1.
struct SteinerTree {
  std::uint32_t root = 0;
  std::vector<std::uint32_t> nodes;   // sorted
  std::vector<std::uint32_t> parent;  // indexed by graph node; kNoNode outside

  std::size_t cost() const { return nodes.empty() ? 0 : nodes.size() - 1; }

  bool contains(std::uint32_t v) const {
    return std::binary_search(nodes.begin(), nodes.end(), v);
  }
};

inline bool validate_tree(const UnitGraph& g, const SteinerTree& t,
                          std::span<const std::uint32_t> terminals) {
  if (!t.contains(t.root) || t.root != g.root) return false;
  if (t.parent.size() != g.node_count()) return false;
  for (std::uint32_t v : terminals)
    if (!t.contains(v)) return false;
  std::vector<char> in_tree(g.node_count(), 0);
  for (std::uint32_t v : t.nodes) in_tree[v] = 1;
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    if (!in_tree[v]) {
      if (t.parent[v] != kNoNode) return false;
      continue;
    }
    if (v == t.root) {
      if (t.parent[v] != kNoNode) return false;
      continue;
    }
    const std::uint32_t p = t.parent[v];
    if (p == kNoNode || !in_tree[p]) return false;
    if (!std::binary_search(g.out[p].begin(), g.out[p].end(), v)) return false;
    // walk to the root; a cycle would loop longer than the node count
    std::uint32_t u = v;
    std::size_t steps = 0;
    while (u != t.root) {
      u = t.parent[u];
      if (u == kNoNode || ++steps > g.node_count()) return false;
    }
  }
  return true;
}

/// Cheapest-insertion approximation of the directed Steiner tree: grow from
/// the root, repeatedly splicing in the shortest path to the closest
/// uncovered terminal. Ties go to the smallest terminal id, and path
/// predecessors are the BFS ones, so the result is deterministic.
/// Throws if some terminal is unreachable from the root.
inline SteinerTree steiner_approx(const UnitGraph& g,
                                  std::span<const std::uint32_t> terminals) {
  SteinerTree t;
  t.root = g.root;
  t.parent.assign(g.node_count(), kNoNode);
  t.nodes = {g.root};
  std::vector<char> in_tree(g.node_count(), 0);
  in_tree[g.root] = 1;

  std::vector<std::uint32_t> wanted(terminals.begin(), terminals.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  std::vector<char> covered(g.node_count(), 0);
  covered[g.root] = 1;
  std::size_t open = 0;
  for (std::uint32_t v : wanted)
    if (!covered[v]) ++open;

  while (open > 0) {
    const BfsResult bfs = bfs_dist(g, t.nodes);
    std::uint32_t best = kNoNode;
    for (std::uint32_t v : wanted) {
      if (covered[v] || !bfs.reached(v)) continue;
      if (best == kNoNode || bfs.dist[v] < bfs.dist[best]) best = v;
    }
    if (best == kNoNode) {
      std::uint32_t missing = kNoNode;
      for (std::uint32_t v : wanted)
        if (!covered[v]) missing = v;
      throw Error("terminal " + std::to_string(missing) +
                  " unreachable from the root");
    }
    // splice the shortest path tree-side out
    std::vector<std::uint32_t> path;
    std::uint32_t u = best;
    while (!in_tree[u]) {
      path.push_back(u);
      u = bfs.pred[u];
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
      const std::uint32_t v = path[i];
      t.parent[v] = i + 1 < path.size() ? path[i + 1] : u;
      in_tree[v] = 1;
      t.nodes.push_back(v);
      if (!covered[v]) {
        covered[v] = 1;
        if (std::binary_search(wanted.begin(), wanted.end(), v)) --open;
      }
    }
    std::sort(t.nodes.begin(), t.nodes.end());
  }
  return t;
}

namespace detail {

// BFS restricted to the node set in `mask`, used by the exact search.
inline bool span_mask(const UnitGraph& g, std::uint32_t mask,
                      std::uint32_t need, BfsResult* out) {
  out->dist.assign(g.node_count(), kNoNode);
  out->pred.assign(g.node_count(), kNoNode);
  std::vector<std::uint32_t> frontier{g.root};
  out->dist[g.root] = 0;
  std::vector<std::uint32_t> next;
  while (!frontier.empty()) {
    next.clear();
    for (std::uint32_t x : frontier) {
      for (std::uint32_t y : g.out[x]) {
        if (!(mask >> y & 1u) || out->dist[y] != kNoNode) continue;
        out->dist[y] = out->dist[x] + 1;
        out->pred[y] = x;
        next.push_back(y);
      }
    }
    std::sort(next.begin(), next.end());
    frontier = next;
  }
  for (std::uint32_t v = 0; v < g.node_count(); ++v)
    if ((need >> v & 1u) && out->dist[v] == kNoNode) return false;
  return true;
}

}  // namespace detail

/// Exact minimum directed Steiner tree by exhaustive search over the
/// non-terminal node subsets, smallest subsets first and in lexicographic
/// order within a size. Only sensible for tiny graphs; it is the test
/// oracle for steiner_approx. Throws above 14 nodes.
inline SteinerTree steiner_exact(const UnitGraph& g,
                                 std::span<const std::uint32_t> terminals) {
  if (g.node_count() > 14)
    throw Error("exact steiner search limited to 14 nodes, got " +
                std::to_string(g.node_count()));
  std::uint32_t need = 1u << g.root;
  for (std::uint32_t v : terminals) need |= 1u << v;
  std::vector<std::uint32_t> cand;
  for (std::uint32_t v = 0; v < g.node_count(); ++v)
    if (!(need >> v & 1u)) cand.push_back(v);

  BfsResult bfs;
  std::vector<std::uint32_t> pick;
  for (std::size_t extra = 0; extra <= cand.size(); ++extra) {
    // enumerate size-`extra` candidate subsets in lexicographic order
    pick.assign(extra, 0);
    for (std::size_t i = 0; i < extra; ++i) pick[i] = std::uint32_t(i);
    while (true) {
      std::uint32_t mask = need;
      for (std::uint32_t i : pick) mask |= 1u << cand[i];
      if (detail::span_mask(g, mask, need, &bfs)) {
        SteinerTree t;
        t.root = g.root;
        t.parent.assign(g.node_count(), kNoNode);
        for (std::uint32_t v = 0; v < g.node_count(); ++v)
          if (mask >> v & 1u) {
            t.nodes.push_back(v);
            if (v != g.root) t.parent[v] = bfs.pred[v];
          }
        return t;
      }
      if (extra == 0) break;
      // advance the combination
      std::size_t i = extra;
      while (i > 0) {
        --i;
        if (pick[i] + (extra - i) < cand.size()) {
          ++pick[i];
          for (std::size_t j = i + 1; j < extra; ++j) pick[j] = pick[j - 1] + 1;
          break;
        }
        if (i == 0) goto next_size;
      }
    }
  next_size:;
  }
  throw Error("terminals unreachable from the root");
}

}  // namespace iia
