#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "iia/model.hpp"

namespace iia {

using Date = std::chrono::year_month_day;

inline Date parse_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (std::sscanf(std::string(s).c_str(), "%d-%d-%d", &y, &m, &d) != 3)
    throw Error("unparsable date '" + std::string(s) + "' (expected YYYY-MM-DD)");
  Date date{std::chrono::year{y}, std::chrono::month{unsigned(m)},
            std::chrono::day{unsigned(d)}};
  if (!date.ok())
    throw Error("invalid calendar date '" + std::string(s) + "'");
  return date;
}

inline std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(d.year()),
                unsigned(d.month()), unsigned(d.day()));
  return buf;
}

/// Closed calendar-date interval, day precision, inclusive on both ends.
/// Default-constructed it spans all representable dates.
struct DateInterval {
  Date start{std::chrono::year{1}, std::chrono::month{1}, std::chrono::day{1}};
  Date end{std::chrono::year{9999}, std::chrono::month{12},
           std::chrono::day{31}};

  DateInterval() = default;
  DateInterval(Date s, Date e) : start(s), end(e) {
    if (std::chrono::sys_days(start) > std::chrono::sys_days(end))
      throw Error("empty date interval: " + format_date(start) + " > " +
                  format_date(end));
  }

  bool contains(Date d) const {
    auto v = std::chrono::sys_days(d);
    return v >= std::chrono::sys_days(start) && v <= std::chrono::sys_days(end);
  }
};

/// One commit: the set of class names it touched. Names are kept verbatim,
/// including classes that no longer exist in the current class list.
struct Transaction {
  std::string commit_id;
  Date date;
  std::vector<std::string> classes;  // sorted, unique
};

struct TransactionSet {
  std::vector<Transaction> transactions;  // file order
  DateInterval interval;
};

// ---------------------------------------------------------------------------
// Graph file: {"system": str, "classes": [str],
//              "edges": [{"src": str, "dst": str, "calls": int}]}

inline DependencyGraph graph_from_json(const nlohmann::json& j,
                                       const std::string& context) {
  if (!j.is_object() || !j.contains("system") || !j.contains("classes") ||
      !j.contains("edges"))
    throw Error(context + ": graph file needs system, classes and edges fields");
  SubjectSystem system(j.at("system").get<std::string>(),
                       j.at("classes").get<std::vector<std::string>>());
  std::vector<DependencyEdge> edges;
  for (const auto& e : j.at("edges")) {
    const auto src = e.at("src").get<std::string>();
    const auto dst = e.at("dst").get<std::string>();
    const auto calls = e.at("calls").get<std::int64_t>();
    if (calls < 0)
      throw Error(context + ": negative call count on edge " + src + " -> " + dst);
    if (src == dst) {
      std::cerr << "warning: " << context << ": dropping self-loop on " << src
                << "\n";
      continue;
    }
    edges.push_back({system.require(src), system.require(dst),
                     static_cast<std::uint32_t>(calls)});
  }
  return DependencyGraph(std::move(system), std::move(edges));
}

inline DependencyGraph parse_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  try {
    return graph_from_json(j, path.filename().string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

inline nlohmann::json graph_to_json(const DependencyGraph& g) {
  nlohmann::json j;
  j["system"] = g.system().name();
  std::vector<std::string> classes(g.system().class_names().begin(),
                                   g.system().class_names().end());
  j["classes"] = classes;
  nlohmann::json edges = nlohmann::json::array();
  for (ClassId x = 0; x < g.system().class_count(); ++x)
    for (const auto& [y, calls] : g.out_edges(x))
      edges.push_back({{"src", g.system().class_name(x)},
                       {"dst", g.system().class_name(y)},
                       {"calls", calls}});
  j["edges"] = std::move(edges);
  return j;
}

inline void write_graph_file(const DependencyGraph& g,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write graph file: " + path.string());
  out << graph_to_json(g).dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// Commit logs. The native format is JSON Lines, one commit per line:
//   {"id": str, "date": "YYYY-MM-DD", "classes": [str]}
// A plain-text "name-only" VCS export is also accepted:
//   commit <id> <YYYY-MM-DD>
//   path/to/File.java            (one path per line, blank line between commits)
// File paths are mapped to class names by dropping the ".java" suffix,
// turning path separators into dots and stripping leading source-root
// segments (src, source, java, main, test, classes). The mapping can be
// overridden per path by an explicit JSON map file {"<path>": "<class>"}.

using ClassNameMap = std::unordered_map<std::string, std::string>;

inline std::optional<std::string> path_to_class(std::string_view path,
                                                const ClassNameMap& overrides = {}) {
  if (auto it = overrides.find(std::string(path)); it != overrides.end())
    return it->second;
  constexpr std::string_view suffix = ".java";
  if (path.size() <= suffix.size() ||
      path.substr(path.size() - suffix.size()) != suffix)
    return std::nullopt;
  path.remove_suffix(suffix.size());
  std::vector<std::string_view> segs;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= path.size(); ++i) {
    if (i == path.size() || path[i] == '/' || path[i] == '\\') {
      if (i > start) segs.push_back(path.substr(start, i - start));
      start = i + 1;
    }
  }
  auto is_root = [](std::string_view s) {
    return s == "src" || s == "source" || s == "java" || s == "main" ||
           s == "test" || s == "classes";
  };
  std::size_t first = 0;
  while (first + 1 < segs.size() && is_root(segs[first])) ++first;
  if (first >= segs.size()) return std::nullopt;
  std::string name;
  for (std::size_t i = first; i < segs.size(); ++i) {
    if (i > first) name += '.';
    name += segs[i];
  }
  return name;
}

inline ClassNameMap parse_class_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open class map file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  ClassNameMap map;
  for (const auto& [k, v] : j.items()) map[k] = v.get<std::string>();
  return map;
}

namespace detail {

inline void finish_transaction(Transaction& t, std::vector<Transaction>& out) {
  std::sort(t.classes.begin(), t.classes.end());
  t.classes.erase(std::unique(t.classes.begin(), t.classes.end()),
                  t.classes.end());
  out.push_back(std::move(t));
  t = Transaction{};
}

}  // namespace detail

/// Parses the plain-text name-only export. Commits with no mappable files
/// yield an empty class set but still count as commits.
inline std::vector<Transaction> parse_raw_commit_log(
    std::istream& in, const ClassNameMap& overrides = {}) {
  std::vector<Transaction> out;
  Transaction current;
  bool open = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (open) detail::finish_transaction(current, out);
      open = false;
      continue;
    }
    if (line.rfind("commit ", 0) == 0) {
      if (open) detail::finish_transaction(current, out);
      std::istringstream hdr(line.substr(7));
      std::string id, date;
      if (!(hdr >> id >> date))
        throw Error("line " + std::to_string(lineno) +
                    ": malformed commit header '" + line + "'");
      try {
        current.date = parse_date(date);
      } catch (const Error& e) {
        throw Error("line " + std::to_string(lineno) + ": " + e.what());
      }
      current.commit_id = id;
      open = true;
      continue;
    }
    if (!open)
      throw Error("line " + std::to_string(lineno) +
                  ": file path outside of a commit block");
    if (auto cls = path_to_class(line, overrides)) current.classes.push_back(*cls);
  }
  if (open) detail::finish_transaction(current, out);
  return out;
}

inline std::vector<Transaction> parse_jsonl_commit_log(std::istream& in) {
  std::vector<Transaction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Transaction t;
    try {
      auto j = nlohmann::json::parse(line);
      t.commit_id = j.at("id").get<std::string>();
      t.date = parse_date(j.at("date").get<std::string>());
      t.classes = j.at("classes").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("line " + std::to_string(lineno) + ": " + e.what());
    }
    std::sort(t.classes.begin(), t.classes.end());
    t.classes.erase(std::unique(t.classes.begin(), t.classes.end()),
                    t.classes.end());
    out.push_back(std::move(t));
  }
  return out;
}

/// Reads a commit log (either format, detected from the first line) and keeps
/// the commits whose date falls inside the interval, in file order.
inline TransactionSet parse_commit_log(const std::filesystem::path& path,
                                       const DateInterval& interval,
                                       const ClassNameMap& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open commit log: " + path.string());
  std::string first;
  while (std::getline(in, first) &&
         first.find_first_not_of(" \t\r") == std::string::npos) {
  }
  in.clear();
  in.seekg(0);
  std::vector<Transaction> all;
  try {
    if (first.rfind("commit ", 0) == 0)
      all = parse_raw_commit_log(in, overrides);
    else
      all = parse_jsonl_commit_log(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  TransactionSet ts{{}, interval};
  for (auto& t : all)
    if (interval.contains(t.date)) ts.transactions.push_back(std::move(t));
  return ts;
}

inline void write_commit_log(const std::vector<Transaction>& commits,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write commit log: " + path.string());
  for (const auto& t : commits) {
    nlohmann::json j{{"id", t.commit_id},
                     {"date", format_date(t.date)},
                     {"classes", t.classes}};
    out << j.dump() << "\n";
  }
}

/// Reports (on stderr) how many historical class names in the transactions
/// are absent from the current class list. They stay in the transactions:
/// they contribute to rule denominators but can never be ranked.
inline std::size_t flag_unknown_classes(const TransactionSet& ts,
                                        const SubjectSystem& system) {
  std::size_t unknown = 0;
  for (const auto& t : ts.transactions)
    for (const auto& c : t.classes)
      if (!system.find(c)) ++unknown;
  if (unknown > 0)
    std::cerr << "warning: " << unknown
              << " class mention(s) in the commit history are not in the "
              << "current class list of '" << system.name() << "'\n";
  return unknown;
}

// ---------------------------------------------------------------------------
// Corpus manifest: {"docs": {"<class>": {"path": str} | {"text": str}}}

struct CorpusManifest {
  struct Entry {
    std::string text;
    std::string path;  // relative paths resolve against base
    bool inline_text = true;
  };
  std::unordered_map<std::string, Entry> entries;
  std::filesystem::path base;
};

inline CorpusManifest parse_corpus_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus manifest: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  CorpusManifest m;
  m.base = path.parent_path();
  if (!j.is_object() || !j.contains("docs"))
    throw Error(path.string() + ": corpus manifest needs a docs object");
  for (const auto& [cls, spec] : j.at("docs").items()) {
    CorpusManifest::Entry e;
    if (spec.contains("text")) {
      e.text = spec.at("text").get<std::string>();
      e.inline_text = true;
    } else if (spec.contains("path")) {
      e.path = spec.at("path").get<std::string>();
      e.inline_text = false;
    } else {
      throw Error(path.string() + ": doc entry for '" + cls +
                  "' needs text or path");
    }
    m.entries.emplace(cls, std::move(e));
  }
  return m;
}

/// Resolves the manifest against a system: one document per class, indexed by
/// ClassId. Missing entries are an error; entries for unknown classes and
/// empty documents are flagged on stderr.
inline std::vector<std::string> load_documents(const CorpusManifest& manifest,
                                               const SubjectSystem& system) {
  for (const auto& [cls, e] : manifest.entries)
    if (!system.find(cls))
      std::cerr << "warning: corpus entry for '" << cls
                << "' does not match any class of '" << system.name() << "'\n";
  std::vector<std::string> docs(system.class_count());
  std::size_t empty = 0;
  for (ClassId id = 0; id < system.class_count(); ++id) {
    const auto& cls = system.class_name(id);
    auto it = manifest.entries.find(cls);
    if (it == manifest.entries.end())
      throw Error("corpus manifest has no document for class '" + cls + "'");
    if (it->second.inline_text) {
      docs[id] = it->second.text;
    } else {
      std::filesystem::path p = it->second.path;
      if (p.is_relative()) p = manifest.base / p;
      std::ifstream in(p);
      if (!in) throw Error("cannot open document for '" + cls + "': " + p.string());
      std::ostringstream buf;
      buf << in.rdbuf();
      docs[id] = buf.str();
    }
    if (docs[id].empty()) ++empty;
  }
  if (empty > 0)
    std::cerr << "warning: " << empty << " empty document(s) in the corpus of '"
              << system.name() << "'\n";
  return docs;
}

inline void write_corpus_manifest(
    const std::vector<std::pair<std::string, std::string>>& docs,
    const std::filesystem::path& path) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [cls, text] : docs) entries[cls] = {{"text", text}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus manifest: " + path.string());
  out << nlohmann::json{{"docs", entries}}.dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// Change requests: [{"id": str, "text": str, "revision": str, "ais": [str]}]

/// Parses change requests, validating the AIS against the class list.
/// Records with fewer than two AIS classes are rejected with a diagnostic;
/// an AIS class missing from the graph is a hard error.
inline std::vector<ChangeCase> parse_change_requests(
    const std::filesystem::path& path, const SubjectSystem& system) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open change requests: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  if (!j.is_array())
    throw Error(path.string() + ": change request file must be a JSON array");
  std::vector<ChangeCase> cases;
  for (const auto& rec : j) {
    ChangeCase c;
    try {
      c.request_id = rec.at("id").get<std::string>();
      c.text = rec.value("text", std::string{});
      c.revision = rec.value("revision", std::string{});
      for (const auto& cls : rec.at("ais")) {
        const auto name = cls.get<std::string>();
        if (auto id = system.find(name))
          c.ais.push_back(*id);
        else
          throw Error("change request '" + c.request_id + "' names unknown class '" +
                      name + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
    std::sort(c.ais.begin(), c.ais.end());
    c.ais.erase(std::unique(c.ais.begin(), c.ais.end()), c.ais.end());
    if (c.ais.size() < 2) {
      std::cerr << "warning: rejecting change request '" << c.request_id
                << "': AIS has " << c.ais.size() << " class(es), need at least 2\n";
      continue;
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

inline void write_change_requests(const std::vector<ChangeCase>& cases,
                                  const SubjectSystem& system,
                                  const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cases) {
    std::vector<std::string> ais;
    for (ClassId id : c.ais) ais.push_back(system.class_name(id));
    arr.push_back({{"id", c.request_id},
                   {"text", c.text},
                   {"revision", c.revision},
                   {"ais", ais}});
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write change requests: " + path.string());
  out << arr.dump(1) << "\n";
}

}  // namespace iia
