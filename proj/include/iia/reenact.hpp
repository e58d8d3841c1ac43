#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "iia/heuristics.hpp"
#include "iia/model.hpp"
#include "iia/steiner.hpp"

namespace iia {

/// Neighborhood budget for a given percentage of the class count: at least
/// one neighbor, rounded up. The epsilon guards against products like
/// 600 * 0.005 landing a hair above their exact value.
inline std::uint32_t percent_to_n(std::size_t class_count, double percent) {
  if (percent <= 0.0) throw Error("percent must be positive");
  const double exact = double(class_count) * percent / 100.0;
  const double n = std::ceil(exact - 1e-9);
  return std::max<std::uint32_t>(1, std::uint32_t(n));
}

/// The neighbors of x an analyst would inspect under budget n: everyone
/// whose weight reaches the n'th largest weight, so ties at the cut are all
/// kept. Returns ids in ascending order.
inline std::vector<ClassId> top_n(const WeightProvider& wp, ClassId x,
                                  std::uint32_t n) {
  const auto nbrs = wp.graph().neighbors(x);
  if (n == 0) return {};
  if (nbrs.size() <= n) return {nbrs.begin(), nbrs.end()};
  const auto weights = wp.weights_of(x);
  std::vector<double> scratch(weights.begin(), weights.end());
  std::nth_element(scratch.begin(), scratch.begin() + (n - 1), scratch.end(),
                   std::greater<>());
  const double cut = scratch[n - 1];
  std::vector<ClassId> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < nbrs.size(); ++i)
    if (weights[i] >= cut) kept.push_back(nbrs[i]);
  return kept;
}

/// Subgraph reachable from the initially-impacted class when every hop is
/// limited to the top-n arcs. Nodes are sorted; arcs[i] lists the kept
/// out-neighbors of nodes[i], each of which is itself a node.
struct ReachableSubgraph {
  ClassId iic = kNoClass;
  std::uint32_t n = 0;
  std::vector<ClassId> nodes;
  std::vector<std::vector<ClassId>> arcs;
  std::vector<ClassId> reachable_ais;  // sorted; empty unless ais was given

  std::size_t index_of(ClassId c) const {
    return std::size_t(std::lower_bound(nodes.begin(), nodes.end(), c) -
                       nodes.begin());
  }
};

inline ReachableSubgraph build_subgraph(const WeightProvider& wp, ClassId iic,
                                        std::uint32_t n,
                                        std::span<const ClassId> ais = {}) {
  const SubjectSystem& sys = wp.graph().system();
  sys.check(iic);
  std::vector<char> seen(sys.class_count(), 0);
  std::vector<std::pair<ClassId, std::vector<ClassId>>> found;
  std::vector<ClassId> queue{iic};
  seen[iic] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const ClassId x = queue[head];
    std::vector<ClassId> kept = top_n(wp, x, n);
    for (ClassId y : kept)
      if (!seen[y]) {
        seen[y] = 1;
        queue.push_back(y);
      }
    found.emplace_back(x, std::move(kept));
  }
  std::sort(found.begin(), found.end());

  ReachableSubgraph sub;
  sub.iic = iic;
  sub.n = n;
  sub.nodes.reserve(found.size());
  sub.arcs.reserve(found.size());
  for (auto& [node, kept] : found) {
    sub.nodes.push_back(node);
    sub.arcs.push_back(std::move(kept));
  }
  for (ClassId a : ais) {
    sys.check(a);
    if (seen[a]) sub.reachable_ais.push_back(a);
  }
  std::sort(sub.reachable_ais.begin(), sub.reachable_ais.end());
  return sub;
}

/// One simulated analysis: a change request replayed from one of its
/// classes under one heuristic and budget. Marks cover the classes the
/// analyst saw; everyone else stayed blank.
struct CaseResult {
  std::string request_id;
  Heuristic heuristic = Heuristic::Rnd;
  double percent = 0.0;
  std::uint32_t n = 0;
  ClassId iic = kNoClass;
  std::vector<std::pair<ClassId, Mark>> marks;  // sorted by class
  std::vector<ClassId> visited;                 // sorted; marked classes
  std::vector<ClassId> reachable_ais;           // sorted
  double precision = 0.0;
  double recall = 0.0;
};

/// Replays one case: build the budgeted subgraph around the starting
/// class, connect the reachable actually-impacted classes with an
/// approximate Steiner tree (the walk the analyst would take), and mark
/// the tree plus its fringe as visited. Precision and recall exclude the
/// starting class from both sides of the ratio.
inline CaseResult simulate_case(const WeightProvider& wp,
                                const ChangeCase& request, ClassId iic,
                                double percent, std::uint32_t n) {
  const SubjectSystem& sys = wp.graph().system();
  if (request.ais.size() < 2)
    throw Error("request " + request.request_id +
                " needs at least two impacted classes");
  if (!std::binary_search(request.ais.begin(), request.ais.end(), iic))
    throw Error("class " + sys.class_name(iic) + " is not impacted by " +
                request.request_id);

  const ReachableSubgraph sub = build_subgraph(wp, iic, n, request.ais);

  // local remap for the tree search
  UnitGraph ug;
  ug.root = std::uint32_t(sub.index_of(iic));
  ug.out.resize(sub.nodes.size());
  for (std::size_t i = 0; i < sub.nodes.size(); ++i) {
    ug.out[i].reserve(sub.arcs[i].size());
    for (ClassId y : sub.arcs[i]) ug.out[i].push_back(std::uint32_t(sub.index_of(y)));
    std::sort(ug.out[i].begin(), ug.out[i].end());
  }
  std::vector<std::uint32_t> terminals;
  terminals.reserve(sub.reachable_ais.size());
  for (ClassId a : sub.reachable_ais)
    terminals.push_back(std::uint32_t(sub.index_of(a)));

  const SteinerTree tree = steiner_approx(ug, terminals);

  CaseResult res;
  res.request_id = request.request_id;
  res.heuristic = wp.id();
  res.percent = percent;
  res.n = n;
  res.iic = iic;
  res.reachable_ais = sub.reachable_ais;

  std::vector<char> in_tree(ug.node_count(), 0);
  for (std::uint32_t v : tree.nodes) in_tree[v] = 1;
  std::vector<char> fringe(ug.node_count(), 0);
  for (std::uint32_t v : tree.nodes)
    for (std::uint32_t y : ug.out[v])
      if (!in_tree[y]) fringe[y] = 1;

  for (std::size_t i = 0; i < sub.nodes.size(); ++i) {
    const ClassId c = sub.nodes[i];
    Mark m;
    if (in_tree[i]) {
      const bool hit = std::binary_search(request.ais.begin(),
                                          request.ais.end(), c);
      m = hit ? Mark::Impacted : Mark::Propagating;
    } else if (fringe[i]) {
      m = Mark::Unchanged;
    } else {
      continue;
    }
    res.marks.emplace_back(c, m);
    res.visited.push_back(c);
  }

  std::size_t hits = 0;  // visited and impacted, excluding the start
  for (ClassId c : res.visited)
    if (c != iic &&
        std::binary_search(request.ais.begin(), request.ais.end(), c))
      ++hits;
  const std::size_t vs = res.visited.size() - 1;   // start excluded
  const std::size_t ais = request.ais.size() - 1;  // start excluded
  res.precision = vs == 0 ? 0.0 : double(hits) / double(vs);
  res.recall = double(hits) / double(ais);
  return res;
}

/// Replays a request from every impacted class in turn.
inline std::vector<CaseResult> run_request(const WeightProvider& wp,
                                           const ChangeCase& request,
                                           double percent, std::uint32_t n) {
  std::vector<CaseResult> out;
  out.reserve(request.ais.size());
  for (ClassId iic : request.ais)
    out.push_back(simulate_case(wp, request, iic, percent, n));
  return out;
}

}  // namespace iia
