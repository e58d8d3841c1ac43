#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "iia/cochange.hpp"
#include "iia/hashing.hpp"
#include "iia/heuristics.hpp"
#include "iia/ingest.hpp"
#include "iia/model.hpp"
#include "iia/reenact.hpp"
#include "iia/report.hpp"
#include "iia/textsim.hpp"

namespace iia {

inline constexpr double kDefaultPercents[] = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0};

/// Everything one experiment needs, loadable from a single JSON file.
/// Relative paths in the file are resolved against its directory; flag
/// overrides applied later are taken as given.
struct ExperimentConfig {
  std::filesystem::path graph;
  std::filesystem::path commits;
  std::filesystem::path corpus;
  std::filesystem::path requests;
  DateInterval interval;  // defaults to all of history
  std::vector<Heuristic> heuristics{kAllHeuristics.begin(),
                                    kAllHeuristics.end()};
  std::vector<double> percents{std::begin(kDefaultPercents),
                               std::end(kDefaultPercents)};
  std::size_t lsi_rank = 0;  // 0 = automatic
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;
  unsigned parallelism = 0;  // 0 = hardware threads
  std::filesystem::path vectors_cache;  // optional
  std::filesystem::path class_map;      // optional

  void canonicalize() {
    std::sort(heuristics.begin(), heuristics.end());
    heuristics.erase(std::unique(heuristics.begin(), heuristics.end()),
                     heuristics.end());
    std::sort(percents.begin(), percents.end());
    percents.erase(std::unique(percents.begin(), percents.end()),
                   percents.end());
  }

  void validate() const {
    if (heuristics.empty()) throw Error("no heuristics configured");
    if (percents.empty()) throw Error("no percent values configured");
    for (double p : percents)
      if (p <= 0.0) throw Error("percent values must be positive");
    for (const auto* p : {&graph, &commits, &corpus, &requests})
      if (!std::filesystem::exists(*p))
        throw Error("input file missing: " + p->string());
  }
};

inline std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("IIA_OUTPUT_DIR")) return env;
  return "out";
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  ExperimentConfig c;
  const auto base = std::filesystem::absolute(path).parent_path();
  auto resolved = [&](const std::string& s) {
    std::filesystem::path p = s;
    return p.is_absolute() ? p : base / p;
  };
  try {
    c.graph = resolved(j.at("graph").get<std::string>());
    c.commits = resolved(j.at("commits").get<std::string>());
    c.corpus = resolved(j.at("corpus").get<std::string>());
    c.requests = resolved(j.at("requests").get<std::string>());
    if (j.contains("interval"))
      c.interval =
          DateInterval{parse_date(j["interval"].at("start").get<std::string>()),
                       parse_date(j["interval"].at("end").get<std::string>())};
    if (j.contains("heuristics")) {
      c.heuristics.clear();
      for (const auto& name : j["heuristics"]) {
        auto h = heuristic_from_string(name.get<std::string>());
        if (!h) throw Error("unknown heuristic " + name.get<std::string>());
        c.heuristics.push_back(*h);
      }
    }
    if (j.contains("percents")) {
      c.percents.clear();
      for (const auto& p : j["percents"]) c.percents.push_back(p.get<double>());
    }
    if (j.contains("lsi_rank")) c.lsi_rank = j["lsi_rank"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("parallelism"))
      c.parallelism = j["parallelism"].get<unsigned>();
    if (j.contains("output_dir"))
      c.output_dir = resolved(j["output_dir"].get<std::string>());
    else
      c.output_dir = default_output_dir();
    if (j.contains("vectors_cache"))
      c.vectors_cache = resolved(j["vectors_cache"].get<std::string>());
    if (j.contains("class_map"))
      c.class_map = resolved(j["class_map"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  c.canonicalize();
  return c;
}

inline bool wants_corpus(const ExperimentConfig& c) {
  for (Heuristic h : c.heuristics)
    if (h == Heuristic::Ccir || h == Heuristic::Rcir) return true;
  return false;
}

inline bool wants_history(const ExperimentConfig& c) {
  for (Heuristic h : c.heuristics)
    if (h == Heuristic::Hist1 || h == Heuristic::Hist2) return true;
  return false;
}

/// Parsed experiment inputs. The graph and its derived propagation graph
/// live behind stable pointers so the whole bundle can be moved around.
struct Dataset {
  std::unique_ptr<DependencyGraph> graph;
  std::unique_ptr<PropagationGraph> pg;
  TransactionSet transactions;
  std::vector<ChangeCase> cases;
  std::vector<std::string> doc_ids;    // class names in id order
  std::vector<std::string> documents;  // empty unless a text heuristic runs
};

inline Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset ds;
  ds.graph = std::make_unique<DependencyGraph>(parse_graph_file(cfg.graph));
  ds.pg = std::make_unique<PropagationGraph>(*ds.graph);
  ClassNameMap overrides;
  if (!cfg.class_map.empty()) overrides = parse_class_map(cfg.class_map);
  ds.transactions = parse_commit_log(cfg.commits, cfg.interval, overrides);
  flag_unknown_classes(ds.transactions, ds.graph->system());
  ds.cases = parse_change_requests(cfg.requests, ds.graph->system());
  if (wants_corpus(cfg)) {
    const CorpusManifest manifest = parse_corpus_manifest(cfg.corpus);
    ds.documents = load_documents(manifest, ds.graph->system());
    const auto names = ds.graph->system().class_names();
    ds.doc_ids.assign(names.begin(), names.end());
  }
  return ds;
}

/// Builds or restores the semantic space. The cache is keyed by corpus
/// digest and rank, so a stale file silently falls back to a fresh build.
inline LsiSpace acquire_space(const ExperimentConfig& cfg, const Dataset& ds) {
  const TermDocumentMatrix tdm = build_tdm(ds.doc_ids, ds.documents);
  const std::size_t k = cfg.lsi_rank ? cfg.lsi_rank : default_lsi_rank(tdm);
  const std::uint64_t digest = corpus_digest(ds.doc_ids, ds.documents);
  if (!cfg.vectors_cache.empty() &&
      std::filesystem::exists(cfg.vectors_cache)) {
    if (auto cached = load_lsi_cache(cfg.vectors_cache, digest, k, 0))
      return std::move(*cached);
  }
  LsiSpace space = lsi_project(tdm, k);
  if (!cfg.vectors_cache.empty()) write_lsi_cache(space, digest, 0, cfg.vectors_cache);
  return space;
}

/// Runs the full case grid. Cases fan out over worker threads but land in
/// a preallocated slot each, so the row order (request, iic, heuristic,
/// percent) and therefore every output byte is independent of scheduling.
inline std::vector<CaseRow> run_experiment(const Dataset& ds,
                                           const ExperimentConfig& cfg) {
  const PropagationGraph& pg = *ds.pg;
  std::optional<LsiSpace> space;
  if (wants_corpus(cfg)) space.emplace(acquire_space(cfg, ds));
  std::optional<RuleTable> rules;
  if (wants_history(cfg)) rules.emplace(build_rules(ds.transactions));

  std::map<Heuristic, WeightProvider> shared;
  bool want_rcir = false;
  for (Heuristic h : cfg.heuristics) {
    switch (h) {
      case Heuristic::Rnd: shared.emplace(h, make_rnd(pg, cfg.seed)); break;
      case Heuristic::Dbh: shared.emplace(h, make_dbh(pg)); break;
      case Heuristic::Hist1: shared.emplace(h, make_hist1(pg, *rules)); break;
      case Heuristic::Hist2: shared.emplace(h, make_hist2(pg, *rules)); break;
      case Heuristic::Ccir: shared.emplace(h, make_ccir(pg, *space)); break;
      case Heuristic::Rcir: want_rcir = true; break;
    }
  }
  std::vector<WeightProvider> rcir;
  if (want_rcir) {
    rcir.reserve(ds.cases.size());
    for (const ChangeCase& cc : ds.cases)
      rcir.push_back(make_rcir(pg, *space, cc));
  }

  struct Task {
    std::size_t req;
    ClassId iic;
    Heuristic h;
    double percent;
    std::uint32_t n;
  };
  std::vector<Task> tasks;
  const std::size_t classes = pg.system().class_count();
  for (std::size_t r = 0; r < ds.cases.size(); ++r)
    for (ClassId iic : ds.cases[r].ais)
      for (Heuristic h : cfg.heuristics)
        for (double p : cfg.percents)
          tasks.push_back({r, iic, h, p, percent_to_n(classes, p)});

  std::vector<CaseResult> results(tasks.size());
  std::atomic<std::size_t> cursor{0};
  std::mutex err_mu;
  std::string first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      try {
        const WeightProvider& wp =
            t.h == Heuristic::Rcir ? rcir[t.req] : shared.at(t.h);
        results[i] = simulate_case(wp, ds.cases[t.req], t.iic, t.percent, t.n);
      } catch (const std::exception& e) {
        char pct[32];
        std::snprintf(pct, sizeof pct, "%g", t.percent);
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error.empty())
          first_error = "case request=" + ds.cases[t.req].request_id +
                        " iic=" + pg.system().class_name(t.iic) +
                        " heuristic=" + std::string(to_string(t.h)) +
                        " percent=" + pct + ": " + e.what();
      }
    }
  };
  unsigned threads = cfg.parallelism ? cfg.parallelism
                                     : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(tasks.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw Error(first_error);

  std::vector<CaseRow> rows;
  rows.reserve(results.size());
  for (const CaseResult& r : results)
    rows.push_back(to_row(r, pg.system()));
  return rows;
}

inline void write_outputs(std::span<const CaseRow> rows,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_cases_csv(rows, dir / "cases.csv");
  const Aggregates agg = aggregate(rows);
  emit_tables(agg, dir);
  emit_plots(agg, dir);
}

inline int cmd_reenact(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Dataset ds = load_dataset(cfg);
  const std::vector<CaseRow> rows = run_experiment(ds, cfg);
  write_outputs(rows, cfg.output_dir);
  log << "system " << ds.graph->system().name() << ": " << ds.cases.size()
      << " requests, " << rows.size() << " cases, " << cfg.heuristics.size()
      << " heuristics, " << cfg.percents.size() << " percents -> "
      << cfg.output_dir.string() << "\n";
  return 0;
}

inline int cmd_report(const std::vector<std::filesystem::path>& inputs,
                      const std::filesystem::path& out_dir, std::ostream& log) {
  std::vector<CaseRow> rows;
  for (const auto& p : inputs) {
    std::vector<CaseRow> part = read_cases_csv(p);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (rows.empty()) throw Error("no case rows to report on");
  std::filesystem::create_directories(out_dir);
  const Aggregates agg = aggregate(rows);
  emit_tables(agg, out_dir);
  emit_plots(agg, out_dir);
  std::vector<std::string> names;
  for (const auto& m : agg.systems)
    if (m.system != "overall") names.push_back(m.system);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const std::size_t systems = names.size();
  log << "report: " << rows.size() << " cases, " << systems << " system"
      << (systems == 1 ? "" : "s") << " -> " << out_dir.string() << "\n";
  return 0;
}

inline int cmd_mine_rules(const std::filesystem::path& commits,
                          const DateInterval& interval,
                          const std::filesystem::path& class_map,
                          const std::filesystem::path& out_file,
                          std::ostream& log) {
  ClassNameMap overrides;
  if (!class_map.empty()) overrides = parse_class_map(class_map);
  const TransactionSet ts = parse_commit_log(commits, interval, overrides);
  const RuleTable rules = build_rules(ts);
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw Error("cannot write " + out_file.string());
  rules.dump_csv(out);
  log << "rules: " << rules.total() << " commits, " << rules.pair_count()
      << " co-change pairs -> " << out_file.string() << "\n";
  return 0;
}

inline int cmd_build_vectors(const ExperimentConfig& cfg, std::ostream& log) {
  if (!std::filesystem::exists(cfg.graph))
    throw Error("input file missing: " + cfg.graph.string());
  if (!std::filesystem::exists(cfg.corpus))
    throw Error("input file missing: " + cfg.corpus.string());
  const DependencyGraph graph = parse_graph_file(cfg.graph);
  const CorpusManifest manifest = parse_corpus_manifest(cfg.corpus);
  const std::vector<std::string> documents =
      load_documents(manifest, graph.system());
  const auto names = graph.system().class_names();
  const std::vector<std::string> doc_ids(names.begin(), names.end());
  const TermDocumentMatrix tdm = build_tdm(doc_ids, documents);
  const std::size_t k = cfg.lsi_rank ? cfg.lsi_rank : default_lsi_rank(tdm);
  const LsiSpace space = lsi_project(tdm, k);
  std::filesystem::path out_path = cfg.vectors_cache;
  if (out_path.empty()) out_path = cfg.output_dir / "vectors.json";
  if (out_path.has_parent_path())
    std::filesystem::create_directories(out_path.parent_path());
  write_lsi_cache(space, corpus_digest(doc_ids, documents), 0, out_path);
  log << "vectors: " << space.doc_count() << " documents, rank "
      << space.rank() << " -> " << out_path.string() << "\n";
  return 0;
}

inline int cmd_convert_log(const std::filesystem::path& in_path,
                           const std::filesystem::path& out_path,
                           const std::filesystem::path& class_map,
                           std::ostream& log) {
  ClassNameMap overrides;
  if (!class_map.empty()) overrides = parse_class_map(class_map);
  const TransactionSet ts = parse_commit_log(in_path, DateInterval{}, overrides);
  write_commit_log(ts.transactions, out_path);
  log << "converted " << ts.transactions.size() << " commits -> "
      << out_path.string() << "\n";
  return 0;
}

/// Order-independent content hash of a directory tree; used to assert that
/// reruns are byte-identical.
inline std::uint64_t hash_output_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      files.push_back(std::filesystem::relative(entry.path(), dir));
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) {
              return a.generic_string() < b.generic_string();
            });
  std::uint64_t h = kFnvOffset;
  for (const auto& rel : files) {
    h = fnv1a(h, rel.generic_string());
    h = fnv1a(h, "\x1f");
    std::ifstream in(dir / rel, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    h = fnv1a(h, bytes);
    h = fnv1a(h, "\x1e");
  }
  return h;
}

}  // namespace iia
