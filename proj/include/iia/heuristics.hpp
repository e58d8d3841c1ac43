#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iia/cochange.hpp"
#include "iia/hashing.hpp"
#include "iia/model.hpp"
#include "iia/textsim.hpp"

namespace iia {

/// The competing ways of weighting a propagation arc. Enumerator order is
/// the canonical reporting order and is meaningful to the tables.
enum class Heuristic : std::uint8_t { Rnd, Dbh, Hist1, Ccir, Hist2, Rcir };

inline constexpr std::array<Heuristic, 6> kAllHeuristics = {
    Heuristic::Rnd,  Heuristic::Dbh,   Heuristic::Hist1,
    Heuristic::Ccir, Heuristic::Hist2, Heuristic::Rcir,
};

inline constexpr std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::Rnd: return "rnd";
    case Heuristic::Dbh: return "dbh";
    case Heuristic::Hist1: return "hist1";
    case Heuristic::Ccir: return "ccir";
    case Heuristic::Hist2: return "hist2";
    case Heuristic::Rcir: return "rcir";
  }
  return "?";
}

inline std::optional<Heuristic> heuristic_from_string(std::string_view s) {
  for (Heuristic h : kAllHeuristics)
    if (to_string(h) == s) return h;
  return std::nullopt;
}

/// Arc weights for one heuristic over one propagation graph, precomputed
/// and stored in the graph's arc layout. Weights are directed: w(x, y) and
/// w(y, x) live in different slots and may differ. The provider keeps a
/// pointer to the graph, which must outlive it.
class WeightProvider {
 public:
  template <typename F>
  static WeightProvider from_function(Heuristic id, const PropagationGraph& pg,
                                      F&& weight_of, std::string provenance) {
    WeightProvider p;
    p.id_ = id;
    p.pg_ = &pg;
    p.provenance_ = std::move(provenance);
    p.weights_.resize(pg.arc_count());
    for (ClassId x = 0; x < pg.system().class_count(); ++x) {
      const std::size_t base = pg.arc_begin(x);
      const auto nbrs = pg.neighbors(x);
      for (std::size_t i = 0; i < nbrs.size(); ++i)
        p.weights_[base + i] = weight_of(x, nbrs[i]);
    }
    return p;
  }

  Heuristic id() const { return id_; }
  const PropagationGraph& graph() const { return *pg_; }
  const std::string& provenance() const { return provenance_; }

  /// Weights of all arcs leaving x, aligned with graph().neighbors(x).
  std::span<const double> weights_of(ClassId x) const {
    const std::size_t base = pg_->arc_begin(x);
    return {weights_.data() + base, pg_->neighbors(x).size()};
  }

  double weight(ClassId x, ClassId y) const {
    auto idx = pg_->arc_index(x, y);
    if (!idx)
      throw Error("no propagation arc " + pg_->system().class_name(x) +
                  " -> " + pg_->system().class_name(y));
    return weights_[*idx];
  }

 private:
  Heuristic id_ = Heuristic::Rnd;
  const PropagationGraph* pg_ = nullptr;
  std::vector<double> weights_;
  std::string provenance_;
};

/// DBH: total calls between the two classes, direction-blind.
inline WeightProvider make_dbh(const PropagationGraph& pg) {
  const DependencyGraph& g = pg.base();
  return WeightProvider::from_function(
      Heuristic::Dbh, pg,
      [&g](ClassId x, ClassId y) {
        return double(g.call_count(x, y)) + double(g.call_count(y, x));
      },
      "dbh(" + pg.system().name() + ")");
}

/// CCIR: textual similarity between the two classes' sources. Every class
/// must have a document in the semantic space.
inline WeightProvider make_ccir(const PropagationGraph& pg,
                                const LsiSpace& space) {
  const SubjectSystem& sys = pg.system();
  std::vector<std::size_t> doc_of(sys.class_count());
  for (ClassId c = 0; c < sys.class_count(); ++c)
    doc_of[c] = space.doc_index(sys.class_name(c));
  return WeightProvider::from_function(
      Heuristic::Ccir, pg,
      [&space, &doc_of](ClassId x, ClassId y) {
        return space.cosine(doc_of[x], doc_of[y]);
      },
      "ccir(" + sys.name() + ",k=" + std::to_string(space.rank()) + ")");
}

/// RCIR: textual similarity between the change request and the target
/// class. The source class is irrelevant, so weights depend on y only.
inline WeightProvider make_rcir(const PropagationGraph& pg,
                                const LsiSpace& space,
                                const ChangeCase& request) {
  const SubjectSystem& sys = pg.system();
  const std::vector<double> qv = space.fold_in(request.text);
  bool all_zero = true;
  for (double v : qv)
    if (v != 0.0) all_zero = false;
  if (all_zero)
    std::cerr << "warning: request " << request.request_id
              << " shares no vocabulary with the corpus; rcir weights are 0\n";
  std::vector<double> sim(sys.class_count());
  for (ClassId c = 0; c < sys.class_count(); ++c)
    sim[c] = space.query_cosine(qv, space.doc_index(sys.class_name(c)));
  return WeightProvider::from_function(
      Heuristic::Rcir, pg,
      [&sim](ClassId, ClassId y) { return sim[y]; },
      "rcir(" + sys.name() + "," + request.request_id + ")");
}

/// Hist1: confidence of the co-change rule x -> y.
inline WeightProvider make_hist1(const PropagationGraph& pg,
                                 const RuleTable& rules) {
  const SubjectSystem& sys = pg.system();
  return WeightProvider::from_function(
      Heuristic::Hist1, pg,
      [&rules, &sys](ClassId x, ClassId y) {
        return rules.confidence(sys.class_name(x), sys.class_name(y));
      },
      "hist1(" + sys.name() + "," + std::to_string(rules.total()) + " commits)");
}

/// Hist2: support of the co-change rule, i.e. raw commit counts.
inline WeightProvider make_hist2(const PropagationGraph& pg,
                                 const RuleTable& rules) {
  const SubjectSystem& sys = pg.system();
  return WeightProvider::from_function(
      Heuristic::Hist2, pg,
      [&rules, &sys](ClassId x, ClassId y) {
        return double(rules.support(sys.class_name(x), sys.class_name(y)));
      },
      "hist2(" + sys.name() + "," + std::to_string(rules.total()) + " commits)");
}

/// RND: one fixed random weight per arc, drawn once per (seed, system) and
/// reproduced on every run. Keyed by class names so the draw does not move
/// when ids shift.
inline WeightProvider make_rnd(const PropagationGraph& pg, std::uint64_t seed) {
  const SubjectSystem& sys = pg.system();
  return WeightProvider::from_function(
      Heuristic::Rnd, pg,
      [&sys, seed](ClassId x, ClassId y) {
        std::uint64_t h = fnv1a_u64(kFnvOffset, seed);
        h = fnv1a(h, sys.name());
        h = fnv1a(h, "\x1f");
        h = fnv1a(h, sys.class_name(x));
        h = fnv1a(h, "\x1f");
        h = fnv1a(h, sys.class_name(y));
        return unit_real(splitmix64(h));
      },
      "rnd(" + sys.name() + ",seed=" + std::to_string(seed) + ")");
}

}  // namespace iia
