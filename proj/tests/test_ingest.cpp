#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "iia/ingest.hpp"
#include "util.hpp"

using namespace iia;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("dates parse, format and bound-check", "[ingest]") {
  const Date d = parse_date("2007-03-09");
  REQUIRE(format_date(d) == "2007-03-09");
  REQUIRE_THROWS_AS(parse_date("2007-3"), Error);
  REQUIRE_THROWS_AS(parse_date("2023-02-29"), Error);
  REQUIRE_THROWS_AS(parse_date("yesterday"), Error);

  const DateInterval iv(parse_date("2005-01-01"), parse_date("2005-12-31"));
  REQUIRE(iv.contains(parse_date("2005-01-01")));
  REQUIRE(iv.contains(parse_date("2005-12-31")));
  REQUIRE_FALSE(iv.contains(parse_date("2006-01-01")));
  REQUIRE_THROWS_AS(DateInterval(parse_date("2006-01-01"),
                                 parse_date("2005-01-01")),
                    Error);
}

TEST_CASE("graph files round-trip", "[ingest]") {
  TempDir tmp("graph");
  write_file(tmp.file("g.json"), R"({
    "system": "demo",
    "classes": ["app.B", "app.A", "app.C"],
    "edges": [
      {"src": "app.A", "dst": "app.B", "calls": 3},
      {"src": "app.C", "dst": "app.A", "calls": 1}
    ]
  })");
  const DependencyGraph g = parse_graph_file(tmp.file("g.json"));
  REQUIRE(g.system().name() == "demo");
  REQUIRE(g.system().class_count() == 3);
  REQUIRE(g.edge_count() == 2);
  REQUIRE(g.call_count(g.system().require("app.A"),
                       g.system().require("app.B")) == 3);

  write_graph_file(g, tmp.file("copy.json"));
  const DependencyGraph g2 = parse_graph_file(tmp.file("copy.json"));
  REQUIRE(g2.system().name() == g.system().name());
  REQUIRE(g2.edge_count() == g.edge_count());
  for (ClassId x = 0; x < g.system().class_count(); ++x)
    for (ClassId y = 0; y < g.system().class_count(); ++y)
      REQUIRE(g2.call_count(x, y) == g.call_count(x, y));
}

TEST_CASE("graph files reject unknown classes and negative calls",
          "[ingest]") {
  TempDir tmp("badgraph");
  write_file(tmp.file("unknown.json"),
             R"({"system":"x","classes":["a.A"],
                 "edges":[{"src":"a.A","dst":"a.B","calls":1}]})");
  REQUIRE_THROWS_AS(parse_graph_file(tmp.file("unknown.json")), Error);

  write_file(tmp.file("negative.json"),
             R"({"system":"x","classes":["a.A","a.B"],
                 "edges":[{"src":"a.A","dst":"a.B","calls":-2}]})");
  REQUIRE_THROWS_AS(parse_graph_file(tmp.file("negative.json")), Error);

  // self-loops are dropped, not fatal
  write_file(tmp.file("selfloop.json"),
             R"({"system":"x","classes":["a.A","a.B"],
                 "edges":[{"src":"a.A","dst":"a.A","calls":5},
                          {"src":"a.A","dst":"a.B","calls":1}]})");
  const DependencyGraph g = parse_graph_file(tmp.file("selfloop.json"));
  REQUIRE(g.edge_count() == 1);
}

TEST_CASE("file paths map to class names", "[ingest]") {
  REQUIRE(path_to_class("src/org/gjt/sp/jedit/View.java") ==
          "org.gjt.sp.jedit.View");
  REQUIRE(path_to_class("source/java/quickfix/Message.java") ==
          "quickfix.Message");
  REQUIRE(path_to_class("org/jhotdraw/draw/Figure.java") ==
          "org.jhotdraw.draw.Figure");
  REQUIRE(path_to_class("Standalone.java") == "Standalone");
  REQUIRE_FALSE(path_to_class("doc/readme.txt").has_value());
  REQUIRE_FALSE(path_to_class("build.xml").has_value());

  const ClassNameMap overrides{{"weird/location.java", "my.Class"}};
  REQUIRE(path_to_class("weird/location.java", overrides) == "my.Class");
  REQUIRE(path_to_class("src/a/B.java", overrides) == "a.B");
}

TEST_CASE("raw name-only logs parse into transactions", "[ingest]") {
  std::istringstream in(
      "commit 4711 2006-05-01\n"
      "src/app/Editor.java\n"
      "src/app/Buffer.java\n"
      "doc/notes.txt\n"
      "\n"
      "commit 4712 2006-05-03\n"
      "src/app/Buffer.java\n"
      "src/app/Buffer.java\n");
  const auto txns = parse_raw_commit_log(in);
  REQUIRE(txns.size() == 2);
  REQUIRE(txns[0].commit_id == "4711");
  REQUIRE(format_date(txns[0].date) == "2006-05-01");
  REQUIRE(txns[0].classes ==
          std::vector<std::string>{"app.Buffer", "app.Editor"});
  REQUIRE(txns[1].classes == std::vector<std::string>{"app.Buffer"});
}

TEST_CASE("raw log errors carry line numbers", "[ingest]") {
  std::istringstream bad_header("commit only-an-id\nsrc/A.java\n");
  REQUIRE_THROWS_WITH(parse_raw_commit_log(bad_header),
                      Catch::Matchers::ContainsSubstring("line 1"));
  std::istringstream stray("src/A.java\n");
  REQUIRE_THROWS_WITH(parse_raw_commit_log(stray),
                      Catch::Matchers::ContainsSubstring("line 1"));
  std::istringstream bad_date("commit 1 2006-13-01\nsrc/A.java\n");
  REQUIRE_THROWS_WITH(parse_raw_commit_log(bad_date),
                      Catch::Matchers::ContainsSubstring("line 1"));
  std::istringstream empty("");
  REQUIRE(parse_raw_commit_log(empty).empty());
}

TEST_CASE("commit log auto-detects format and filters by interval",
          "[ingest]") {
  TempDir tmp("log");
  write_file(tmp.file("log.jsonl"),
             R"({"id":"c1","date":"2004-06-01","classes":["a.A","a.B"]}
{"id":"c2","date":"2005-06-01","classes":["a.B"]}
{"id":"c3","date":"2006-06-01","classes":["a.C","a.A"]}
)");
  const DateInterval iv(parse_date("2004-01-01"), parse_date("2005-12-31"));
  const TransactionSet ts = parse_commit_log(tmp.file("log.jsonl"), iv);
  REQUIRE(ts.transactions.size() == 2);
  REQUIRE(ts.transactions[0].commit_id == "c1");
  REQUIRE(ts.transactions[1].commit_id == "c2");

  write_file(tmp.file("log.txt"),
             "commit r10 2004-02-01\nsrc/a/A.java\n\n"
             "commit r11 2007-02-01\nsrc/a/B.java\n");
  const TransactionSet raw = parse_commit_log(tmp.file("log.txt"), iv);
  REQUIRE(raw.transactions.size() == 1);
  REQUIRE(raw.transactions[0].classes == std::vector<std::string>{"a.A"});

  // converting to JSONL and re-reading keeps the surviving commits
  write_commit_log(ts.transactions, tmp.file("copy.jsonl"));
  const TransactionSet back = parse_commit_log(tmp.file("copy.jsonl"), iv);
  REQUIRE(back.transactions.size() == ts.transactions.size());
  for (std::size_t i = 0; i < back.transactions.size(); ++i) {
    REQUIRE(back.transactions[i].commit_id == ts.transactions[i].commit_id);
    REQUIRE(back.transactions[i].classes == ts.transactions[i].classes);
  }
}

TEST_CASE("historical class names survive but get flagged", "[ingest]") {
  TempDir tmp("hist");
  write_file(tmp.file("log.jsonl"),
             R"({"id":"c1","date":"2004-06-01","classes":["a.A","a.Gone"]}
)");
  const TransactionSet ts =
      parse_commit_log(tmp.file("log.jsonl"), DateInterval{});
  const SubjectSystem sys("demo", {"a.A", "a.B"});
  REQUIRE(flag_unknown_classes(ts, sys) == 1);
  REQUIRE(ts.transactions[0].classes ==
          std::vector<std::string>{"a.A", "a.Gone"});
}

TEST_CASE("corpus manifests resolve inline text and files", "[ingest]") {
  TempDir tmp("corpus");
  write_file(tmp.file("B.txt"), "tokens from a file");
  write_file(tmp.file("corpus.json"), R"({
    "docs": {
      "a.A": {"text": "inline tokens"},
      "a.B": {"path": "B.txt"}
    }
  })");
  const CorpusManifest m = parse_corpus_manifest(tmp.file("corpus.json"));
  const SubjectSystem sys("demo", {"a.A", "a.B"});
  const auto docs = load_documents(m, sys);
  REQUIRE(docs.size() == 2);
  REQUIRE(docs[sys.require("a.A")] == "inline tokens");
  REQUIRE(docs[sys.require("a.B")] == "tokens from a file");

  const SubjectSystem bigger("demo", {"a.A", "a.B", "a.C"});
  REQUIRE_THROWS_WITH(load_documents(m, bigger),
                      Catch::Matchers::ContainsSubstring("a.C"));
}

TEST_CASE("corpus manifest writer round-trips", "[ingest]") {
  TempDir tmp("corpusrt");
  write_corpus_manifest({{"a.A", "alpha text"}, {"a.B", "beta text"}},
                        tmp.file("c.json"));
  const CorpusManifest m = parse_corpus_manifest(tmp.file("c.json"));
  const SubjectSystem sys("demo", {"a.A", "a.B"});
  const auto docs = load_documents(m, sys);
  REQUIRE(docs[0] == "alpha text");
  REQUIRE(docs[1] == "beta text");
}

TEST_CASE("change requests validate their impacted sets", "[ingest]") {
  TempDir tmp("req");
  const SubjectSystem sys("demo", {"a.A", "a.B", "a.C"});
  write_file(tmp.file("req.json"), R"([
    {"id": "CR-1", "text": "fix the parser", "revision": "r100",
     "ais": ["a.B", "a.A", "a.B"]},
    {"id": "CR-2", "text": "too small", "revision": "r101", "ais": ["a.C"]}
  ])");
  const auto cases = parse_change_requests(tmp.file("req.json"), sys);
  REQUIRE(cases.size() == 1);  // CR-2 rejected: singleton AIS
  REQUIRE(cases[0].request_id == "CR-1");
  REQUIRE(cases[0].revision == "r100");
  REQUIRE(cases[0].ais == std::vector<ClassId>{sys.require("a.A"),
                                               sys.require("a.B")});

  write_file(tmp.file("bad.json"), R"([
    {"id": "CR-3", "text": "", "revision": "", "ais": ["a.A", "a.Missing"]}
  ])");
  REQUIRE_THROWS_WITH(parse_change_requests(tmp.file("bad.json"), sys),
                      Catch::Matchers::ContainsSubstring("a.Missing"));

  write_change_requests(cases, sys, tmp.file("copy.json"));
  const auto back = parse_change_requests(tmp.file("copy.json"), sys);
  REQUIRE(back.size() == 1);
  REQUIRE(back[0].ais == cases[0].ais);
  REQUIRE(back[0].text == cases[0].text);
}
