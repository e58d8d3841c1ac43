#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iia/heuristics.hpp"
#include "iia/ingest.hpp"
#include "iia/model.hpp"

namespace iia {

/// Knobs for the synthetic benchmark. The defaults produce a system at the
/// scale of the mid-size subjects the framework is meant for: ~500 classes
/// in ~25 packages, a dense intra-package call structure, several thousand
/// commits, and requests whose impacted sets mostly sit close together.
struct SynthParams {
  std::uint64_t seed = 1;
  std::uint32_t classes = 500;
  std::uint32_t requests = 15;
  std::uint32_t commits = 0;      // 0 picks 12 per class
  double tight_fraction = 0.9;    // share of requests planted as cliques
};

struct SynthDataset {
  std::string system_name;
  DependencyGraph graph;
  std::vector<Transaction> commits;
  DateInterval interval;
  std::vector<std::pair<std::string, std::string>> docs;  // class -> source text
  std::vector<ChangeCase> cases;
  // co-change class pairs the history is guaranteed to contain
  std::vector<std::pair<std::string, std::string>> planted_pairs;
};

namespace detail {

// Thin deterministic wrapper: raw engine output only, so the stream never
// depends on standard-library distribution internals.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  std::uint32_t below(std::uint32_t n) { return std::uint32_t(next() % n); }
  double real() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

inline constexpr std::array<std::string_view, 96> kSynthWords = {
    "buffer",  "parser",   "token",    "icon",    "resource", "bundle",
    "panel",   "widget",   "view",     "model",   "event",    "handler",
    "cache",   "index",    "query",    "search",  "layout",   "render",
    "style",   "theme",    "file",     "stream",  "reader",   "writer",
    "socket",  "message",  "queue",    "task",    "worker",   "thread",
    "lock",    "pool",     "config",   "option",  "setting",  "plugin",
    "module",  "service",  "manager",  "factory", "builder",  "adapter",
    "proxy",   "filter",   "mapper",   "engine",  "session",  "request",
    "router",  "logger",   "monitor",  "metric",  "counter",  "timer",
    "clock",   "schedule", "backup",   "archive", "bucket",   "record",
    "entry",   "field",    "column",   "table",   "row",      "cursor",
    "batch",   "chunk",    "segment",  "page",    "frame",    "window",
    "dialog",  "menu",     "action",   "command", "macro",    "script",
    "shell",   "editor",   "document", "text",    "font",     "glyph",
    "color",   "palette",  "brush",    "canvas",  "shape",    "vector",
    "matrix",  "node",     "edge",     "path",    "route",    "tree",
};

inline std::string cap(std::string_view w) {
  std::string s(w);
  s[0] = char(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

inline std::string stem_of(const std::string& fqn) {
  return fqn.substr(fqn.rfind('.') + 1);
}

}  // namespace detail

/// Generates a complete synthetic experiment input: dependency graph,
/// commit history, token corpus, and change requests. Everything is a pure
/// function of the parameters. The history mixes three kinds of commits:
/// full co-commits of each tight request's impacted set, a few planted
/// package pairs, and random walks along the call structure so most arcs
/// carry a graded co-change signal.
inline SynthDataset synth_dataset(const SynthParams& params) {
  if (params.classes < 10) throw Error("synth needs at least 10 classes");
  if (params.requests < 1) throw Error("synth needs at least one request");
  detail::SynthRng rng(params.seed);
  const std::uint32_t C = params.classes;
  const std::uint32_t P = std::max(1u, C / 20);
  const std::uint32_t W = std::uint32_t(detail::kSynthWords.size());
  auto word = [&](std::uint32_t i) { return detail::kSynthWords[i % W]; };

  // package word pools give the corpus its locality
  std::vector<std::array<std::uint32_t, 6>> pool(P);
  for (auto& pw : pool)
    for (auto& w : pw) w = rng.below(W);

  // class names, unique within their package
  std::vector<std::uint32_t> pkg_size(P, C / P);
  for (std::uint32_t p = 0; p < C % P; ++p) pkg_size[p]++;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> pkg_names(P);
  names.reserve(C);
  for (std::uint32_t p = 0; p < P; ++p) {
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "synth.p%03u.", p);
    std::set<std::string> taken;
    for (std::uint32_t i = 0; i < pkg_size[p]; ++i) {
      std::string stem = detail::cap(word(pool[p][rng.below(6)])) +
                         detail::cap(word(rng.below(W)));
      while (taken.count(stem)) stem += detail::cap(word(rng.below(W)));
      taken.insert(stem);
      names.push_back(prefix + stem);
      pkg_names[p].push_back(names.back());
    }
  }

  const std::string system_name = "synth-" + std::to_string(C);
  SubjectSystem sys(system_name, names);
  std::vector<std::vector<ClassId>> pkg_ids(P);
  std::vector<std::uint32_t> pkg_of(C);
  for (std::uint32_t p = 0; p < P; ++p) {
    for (const auto& n : pkg_names[p]) {
      const ClassId id = sys.require(n);
      pkg_ids[p].push_back(id);
      pkg_of[id] = p;
    }
    std::sort(pkg_ids[p].begin(), pkg_ids[p].end());
  }

  // call edges: package chains and a bridge ring keep everything
  // connected; the random intra/inter arcs set the typical degree
  std::map<std::pair<ClassId, ClassId>, std::uint32_t> edges;
  auto add_edge = [&](ClassId a, ClassId b, std::uint32_t calls) {
    if (a != b) edges[{a, b}] += calls;
  };
  for (std::uint32_t p = 0; p < P; ++p)
    for (std::size_t i = 0; i + 1 < pkg_ids[p].size(); ++i)
      add_edge(pkg_ids[p][i], pkg_ids[p][i + 1], 3 + rng.below(10));
  for (std::uint32_t p = 0; p < P; ++p)
    add_edge(pkg_ids[p].front(), pkg_ids[(p + 1) % P].front(),
             1 + rng.below(6));
  for (ClassId x = 0; x < C; ++x) {
    const auto& local = pkg_ids[pkg_of[x]];
    for (int k = 0; k < 8; ++k)
      add_edge(x, local[rng.below(std::uint32_t(local.size()))],
               1 + rng.below(20));
    for (int k = 0; k < 6; ++k) add_edge(x, rng.below(C), 1 + rng.below(5));
  }

  // change requests with their impacted sets; tight ones get a call clique
  struct Request {
    std::vector<ClassId> members;
    std::array<std::uint32_t, 3> topic;
    bool tight = false;
  };
  std::vector<Request> reqs;
  std::vector<std::pair<std::string, std::string>> planted;
  for (std::uint32_t r = 0; r < params.requests; ++r) {
    Request rq;
    rq.tight = rng.real() < params.tight_fraction;
    const std::uint32_t p = rng.below(P);
    const auto& from = pkg_ids[p];
    const std::uint32_t want = std::min<std::uint32_t>(
        2 + rng.below(6), std::uint32_t(rq.tight ? from.size() : C));
    std::set<ClassId> chosen;
    while (chosen.size() < want)
      chosen.insert(rq.tight ? from[rng.below(std::uint32_t(from.size()))]
                             : ClassId(rng.below(C)));
    rq.members.assign(chosen.begin(), chosen.end());
    for (auto& t : rq.topic) t = rng.below(W);
    if (rq.tight) {
      for (ClassId a : rq.members)
        for (ClassId b : rq.members)
          if (a != b) add_edge(a, b, 25 + rng.below(16));
      for (std::size_t i = 0; i < rq.members.size(); ++i)
        for (std::size_t j = i + 1; j < rq.members.size(); ++j)
          planted.emplace_back(sys.class_name(rq.members[i]),
                               sys.class_name(rq.members[j]));
    }
    reqs.push_back(std::move(rq));
  }

  std::vector<DependencyEdge> edge_list;
  edge_list.reserve(edges.size());
  for (const auto& [key, calls] : edges)
    edge_list.push_back({key.first, key.second, calls});
  DependencyGraph graph(std::move(sys), std::move(edge_list));
  const SubjectSystem& system = graph.system();

  // symmetric adjacency for the commit random walks
  std::vector<std::vector<ClassId>> adj(C);
  for (const auto& [key, calls] : edges) {
    adj[key.first].push_back(key.second);
    adj[key.second].push_back(key.first);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  // commit plan: planted co-commits first, then graded walk commits
  std::vector<std::vector<ClassId>> plan;
  for (const Request& rq : reqs)
    if (rq.tight)
      for (int k = 0; k < 12; ++k) plan.push_back(rq.members);
  for (std::uint32_t p = 0; p < P; ++p) {
    const auto& local = pkg_ids[p];
    if (local.size() < 2) continue;
    for (int k = 0; k < 2; ++k) {
      const ClassId a = local[rng.below(std::uint32_t(local.size()))];
      ClassId b = a;
      while (b == a) b = local[rng.below(std::uint32_t(local.size()))];
      planted.emplace_back(system.class_name(std::min(a, b)),
                           system.class_name(std::max(a, b)));
      for (int c = 0; c < 5; ++c)
        plan.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  const std::size_t total =
      params.commits ? params.commits : std::size_t(12) * C;
  while (plan.size() < total) {
    ClassId at = rng.below(C);
    std::set<ClassId> walk{at};
    const std::uint32_t steps = 1 + rng.below(5);
    for (std::uint32_t s = 0; s < steps && !adj[at].empty(); ++s) {
      at = adj[at][rng.below(std::uint32_t(adj[at].size()))];
      walk.insert(at);
    }
    plan.emplace_back(walk.begin(), walk.end());
  }
  // shuffle so planted commits spread over the history
  for (std::size_t i = plan.size(); i > 1; --i)
    std::swap(plan[i - 1], plan[rng.below(std::uint32_t(i))]);

  const DateInterval interval{
      Date{std::chrono::year{2004}, std::chrono::month{1},
           std::chrono::day{1}},
      Date{std::chrono::year{2009}, std::chrono::month{12},
           std::chrono::day{31}}};
  const auto day0 = std::chrono::sys_days(interval.start);
  const auto span = (std::chrono::sys_days(interval.end) - day0).count();
  std::vector<Transaction> commits;
  commits.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    Transaction t;
    char id[24];
    std::snprintf(id, sizeof id, "c%05zu", i + 1);
    t.commit_id = id;
    const auto offset = plan.size() > 1 ? std::int64_t(i) * span /
                                              std::int64_t(plan.size() - 1)
                                        : std::int64_t(0);
    t.date = Date{day0 + std::chrono::days(offset)};
    for (ClassId c : plan[i]) t.classes.push_back(system.class_name(c));
    std::sort(t.classes.begin(), t.classes.end());
    commits.push_back(std::move(t));
  }

  // corpus: name words, package vocabulary, a couple of neighbors' words,
  // then the topic boosts that tie impacted sets to their request text
  std::vector<std::string> text(C);
  for (ClassId x = 0; x < C; ++x) {
    const std::uint32_t p = pkg_of[x];
    std::string t;
    for (int k = 0; k < 3; ++k) {
      t += detail::stem_of(system.class_name(x));
      t += ' ';
    }
    for (std::uint32_t w : pool[p]) {
      t += word(w);
      t += ' ';
    }
    for (int k = 0; k < 3; ++k) {
      t += word(rng.below(W));
      t += ' ';
    }
    const auto& local = pkg_ids[p];
    for (int k = 0; k < 2; ++k) {
      const ClassId nb = local[rng.below(std::uint32_t(local.size()))];
      t += detail::stem_of(system.class_name(nb));
      t += ' ';
    }
    text[x] = std::move(t);
  }
  for (const Request& rq : reqs)
    for (ClassId m : rq.members)
      for (int k = 0; k < (rq.tight ? 4 : 2); ++k)
        for (std::uint32_t w : rq.topic) {
          text[m] += word(w);
          text[m] += ' ';
        }
  std::vector<std::pair<std::string, std::string>> docs;
  docs.reserve(C);
  for (ClassId x = 0; x < C; ++x)
    docs.emplace_back(system.class_name(x), text[x]);

  std::vector<ChangeCase> cases;
  for (std::uint32_t r = 0; r < params.requests; ++r) {
    const Request& rq = reqs[r];
    ChangeCase cc;
    char id[16], rev[16];
    std::snprintf(id, sizeof id, "CR-%03u", r + 1);
    std::snprintf(rev, sizeof rev, "r%04u", 1000 + r);
    cc.request_id = id;
    cc.revision = rev;
    std::string t;
    for (int k = 0; k < 3; ++k)
      for (std::uint32_t w : rq.topic) {
        t += word(w);
        t += ' ';
      }
    for (ClassId m : rq.members) {
      t += detail::stem_of(system.class_name(m));
      t += ' ';
    }
    for (std::uint32_t w : pool[pkg_of[rq.members.front()]]) {
      t += word(w);
      t += ' ';
    }
    cc.text = std::move(t);
    cc.ais = rq.members;
    cases.push_back(std::move(cc));
  }

  return SynthDataset{system_name,      std::move(graph), std::move(commits),
                      interval,         std::move(docs),  std::move(cases),
                      std::move(planted)};
}

/// Writes a generated dataset plus a ready-to-run experiment config into a
/// directory: graph.json, commits.jsonl, corpus.json, requests.json,
/// config.json.
inline void write_synth_dataset(const SynthParams& params,
                                const std::filesystem::path& dir) {
  const SynthDataset ds = synth_dataset(params);
  std::filesystem::create_directories(dir);
  write_graph_file(ds.graph, dir / "graph.json");
  write_commit_log(ds.commits, dir / "commits.jsonl");
  write_corpus_manifest(ds.docs, dir / "corpus.json");
  write_change_requests(ds.cases, ds.graph.system(), dir / "requests.json");

  nlohmann::json cfg;
  cfg["graph"] = "graph.json";
  cfg["commits"] = "commits.jsonl";
  cfg["corpus"] = "corpus.json";
  cfg["requests"] = "requests.json";
  cfg["interval"] = {{"start", format_date(ds.interval.start)},
                     {"end", format_date(ds.interval.end)}};
  nlohmann::json hs = nlohmann::json::array();
  for (Heuristic h : kAllHeuristics) hs.push_back(std::string(to_string(h)));
  cfg["heuristics"] = hs;
  cfg["percents"] = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  cfg["lsi_rank"] = 0;
  cfg["seed"] = params.seed;
  cfg["output_dir"] = "out";
  cfg["parallelism"] = 0;
  std::ofstream out(dir / "config.json", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "config.json").string());
  out << cfg.dump(1) << "\n";
}

}  // namespace iia
