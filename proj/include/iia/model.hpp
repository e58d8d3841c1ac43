#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace iia {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense class index. Ids are assigned in lexicographic order of the
/// fully-qualified class names, so numeric order equals name order and all
/// "smallest id" tie-breaks are reproducible.
using ClassId = std::uint32_t;

inline constexpr ClassId kNoClass = 0xffffffffu;

/// The set of classes of one subject system. Immutable after construction.
class SubjectSystem {
 public:
  SubjectSystem(std::string name, std::vector<std::string> classes)
      : name_(std::move(name)) {
    if (name_.empty()) throw Error("subject system needs a name");
    if (classes.empty())
      throw Error("subject system '" + name_ + "' declares no classes");
    std::sort(classes.begin(), classes.end());
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i].empty())
        throw Error("subject system '" + name_ + "' contains an empty class name");
      if (i > 0 && classes[i] == classes[i - 1])
        throw Error("duplicate class '" + classes[i] + "' in system '" + name_ + "'");
    }
    names_ = std::move(classes);
    index_.reserve(names_.size());
    for (ClassId id = 0; id < names_.size(); ++id) index_.emplace(names_[id], id);
  }

  const std::string& name() const { return name_; }
  std::size_t class_count() const { return names_.size(); }
  std::span<const std::string> class_names() const { return names_; }

  const std::string& class_name(ClassId id) const {
    check(id);
    return names_[id];
  }

  std::optional<ClassId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  ClassId require(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw Error("unknown class '" + std::string(name) + "' in system '" + name_ + "'");
  }

  bool contains(ClassId id) const { return id < names_.size(); }

  void check(ClassId id) const {
    if (id >= names_.size())
      throw Error("class id " + std::to_string(id) + " out of range for system '" +
                  name_ + "'");
  }

 private:
  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassId> index_;
};

struct DependencyEdge {
  ClassId src = 0;
  ClassId dst = 0;
  std::uint32_t calls = 0;  // 0 for non-call dependencies (inheritance etc.)
};

/// Directed class dependency graph with per-edge call counts.
/// At most one edge per ordered pair, no self-loops.
class DependencyGraph {
 public:
  DependencyGraph(SubjectSystem system, std::vector<DependencyEdge> edges)
      : system_(std::move(system)), out_(system_.class_count()) {
    for (const DependencyEdge& e : edges) {
      system_.check(e.src);
      system_.check(e.dst);
      if (e.src == e.dst)
        throw Error("self-loop on class '" + system_.class_name(e.src) + "'");
      out_[e.src].emplace_back(e.dst, e.calls);
    }
    edge_count_ = 0;
    for (ClassId x = 0; x < out_.size(); ++x) {
      auto& adj = out_[x];
      std::sort(adj.begin(), adj.end());
      for (std::size_t i = 1; i < adj.size(); ++i)
        if (adj[i].first == adj[i - 1].first)
          throw Error("duplicate edge " + system_.class_name(x) + " -> " +
                      system_.class_name(adj[i].first));
      edge_count_ += adj.size();
    }
  }

  const SubjectSystem& system() const { return system_; }
  std::size_t edge_count() const { return edge_count_; }

  bool has_edge(ClassId x, ClassId y) const { return lookup(x, y) != nullptr; }

  /// call(x, y): number of calls from x into y; 0 when there is no edge.
  std::uint32_t call_count(ClassId x, ClassId y) const {
    const auto* e = lookup(x, y);
    return e ? e->second : 0u;
  }

  std::span<const std::pair<ClassId, std::uint32_t>> out_edges(ClassId x) const {
    system_.check(x);
    return out_[x];
  }

 private:
  const std::pair<ClassId, std::uint32_t>* lookup(ClassId x, ClassId y) const {
    system_.check(x);
    system_.check(y);
    const auto& adj = out_[x];
    auto it = std::lower_bound(adj.begin(), adj.end(), y,
                               [](const auto& e, ClassId v) { return e.first < v; });
    if (it == adj.end() || it->first != y) return nullptr;
    return &*it;
  }

  SubjectSystem system_;
  std::vector<std::vector<std::pair<ClassId, std::uint32_t>>> out_;
  std::size_t edge_count_ = 0;
};

/// E' = E with every edge mirrored. Returned sorted by (src, dst).
inline std::vector<std::pair<ClassId, ClassId>> symmetric_closure(
    const DependencyGraph& graph) {
  std::vector<std::pair<ClassId, ClassId>> arcs;
  arcs.reserve(2 * graph.edge_count());
  for (ClassId x = 0; x < graph.system().class_count(); ++x) {
    for (const auto& [y, calls] : graph.out_edges(x)) {
      arcs.emplace_back(x, y);
      arcs.emplace_back(y, x);
    }
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  return arcs;
}

/// Symmetric closure of a dependency graph, stored as a CSR adjacency with
/// neighbor lists sorted by id. Propagation weights are kept separately by
/// the heuristics; arc_index() gives a stable slot per directed arc.
class PropagationGraph {
 public:
  explicit PropagationGraph(const DependencyGraph& base) : base_(&base) {
    auto arcs = symmetric_closure(base);
    const std::size_t n = base.system().class_count();
    offsets_.assign(n + 1, 0);
    for (const auto& [x, y] : arcs) offsets_[x + 1]++;
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    nbrs_.resize(arcs.size());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [x, y] : arcs) nbrs_[cursor[x]++] = y;
  }

  const DependencyGraph& base() const { return *base_; }
  const SubjectSystem& system() const { return base_->system(); }
  std::size_t arc_count() const { return nbrs_.size(); }

  /// Out-neighbors of x in E', ascending by id.
  std::span<const ClassId> neighbors(ClassId x) const {
    system().check(x);
    return {nbrs_.data() + offsets_[x], nbrs_.data() + offsets_[x + 1]};
  }

  /// Position of arc (x, y) in the CSR arrays, if (x, y) is in E'.
  std::optional<std::size_t> arc_index(ClassId x, ClassId y) const {
    system().check(x);
    system().check(y);
    auto begin = nbrs_.begin() + offsets_[x];
    auto end = nbrs_.begin() + offsets_[x + 1];
    auto it = std::lower_bound(begin, end, y);
    if (it == end || *it != y) return std::nullopt;
    return static_cast<std::size_t>(it - nbrs_.begin());
  }

  std::size_t arc_begin(ClassId x) const { return offsets_[x]; }

 private:
  const DependencyGraph* base_;
  std::vector<std::uint32_t> offsets_;
  std::vector<ClassId> nbrs_;
};

/// Inspection marks assigned to classes during a simulated IIA run.
enum class Mark : std::uint8_t { Blank, Impacted, Unchanged, Next, Propagating };

inline const char* to_string(Mark m) {
  switch (m) {
    case Mark::Blank: return "blank";
    case Mark::Impacted: return "impacted";
    case Mark::Unchanged: return "unchanged";
    case Mark::Next: return "next";
    case Mark::Propagating: return "propagating";
  }
  return "?";
}

/// One historical change request with its actual impact set.
struct ChangeCase {
  std::string request_id;
  std::string text;      // free text; may be empty unless RCIR is used
  std::string revision;
  std::vector<ClassId> ais;  // sorted, |ais| >= 2
};

}  // namespace iia
