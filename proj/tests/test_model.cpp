#include <catch2/catch_amalgamated.hpp>

#include "iia/model.hpp"

using namespace iia;

namespace {

DependencyGraph tiny_graph() {
  SubjectSystem sys("demo", {"app.Editor", "app.Buffer", "app.View"});
  // ids after sorting: Buffer=0, Editor=1, View=2
  return DependencyGraph(std::move(sys),
                         {{1, 0, 2},    // Editor -> Buffer, 2 calls
                          {2, 0, 1},    // View -> Buffer
                          {1, 2, 4}});  // Editor -> View
}

}  // namespace

TEST_CASE("class ids follow sorted names", "[model]") {
  SubjectSystem sys("demo", {"b.Z", "a.A", "a.M"});
  REQUIRE(sys.class_count() == 3);
  REQUIRE(sys.class_name(0) == "a.A");
  REQUIRE(sys.class_name(1) == "a.M");
  REQUIRE(sys.class_name(2) == "b.Z");
  REQUIRE(sys.find("a.M") == ClassId{1});
  REQUIRE_FALSE(sys.find("a.Q").has_value());
  REQUIRE(sys.require("b.Z") == ClassId{2});
  REQUIRE_THROWS_AS(sys.require("missing.Class"), Error);
  REQUIRE_THROWS_AS(sys.check(3), Error);
}

TEST_CASE("system construction rejects bad input", "[model]") {
  REQUIRE_THROWS_AS(SubjectSystem("x", {}), Error);
  REQUIRE_THROWS_AS(SubjectSystem("", {"a.A"}), Error);
  REQUIRE_THROWS_AS(SubjectSystem("x", {"a.A", "a.A"}), Error);
  REQUIRE_THROWS_AS(SubjectSystem("x", {"a.A", ""}), Error);
}

TEST_CASE("dependency graph stores directed call counts", "[model]") {
  const DependencyGraph g = tiny_graph();
  REQUIRE(g.edge_count() == 3);
  REQUIRE(g.call_count(1, 0) == 2);
  REQUIRE(g.call_count(0, 1) == 0);  // never declared
  REQUIRE(g.call_count(1, 2) == 4);
  REQUIRE(g.has_edge(2, 0));
  REQUIRE_FALSE(g.has_edge(0, 2));

  const auto out = g.out_edges(1);
  REQUIRE(out.size() == 2);
  REQUIRE(out[0].first == 0);
  REQUIRE(out[1].first == 2);
}

TEST_CASE("graph construction rejects self loops and duplicates", "[model]") {
  SubjectSystem sys("demo", {"a.A", "a.B"});
  REQUIRE_THROWS_AS(DependencyGraph(sys, {{0, 0, 1}}), Error);
  REQUIRE_THROWS_AS(DependencyGraph(sys, {{0, 1, 1}, {0, 1, 2}}), Error);
  REQUIRE_THROWS_AS(DependencyGraph(sys, {{0, 5, 1}}), Error);
}

TEST_CASE("symmetric closure adds the reverse of every arc", "[model]") {
  const DependencyGraph g = tiny_graph();
  const auto arcs = symmetric_closure(g);
  // three undirected pairs, each present in both directions
  REQUIRE(arcs.size() == 6);
  const std::vector<std::pair<ClassId, ClassId>> expect = {
      {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  REQUIRE(std::equal(arcs.begin(), arcs.end(), expect.begin(), expect.end()));
}

TEST_CASE("one-way call still yields both propagation arcs", "[model]") {
  SubjectSystem sys("demo", {"a.X", "a.Y"});
  const DependencyGraph g(std::move(sys), {{0, 1, 2}});
  const PropagationGraph pg(g);
  REQUIRE(pg.arc_count() == 2);
  REQUIRE(pg.arc_index(0, 1).has_value());
  REQUIRE(pg.arc_index(1, 0).has_value());
}

TEST_CASE("propagation graph neighbors are sorted and complete", "[model]") {
  const DependencyGraph g = tiny_graph();
  const PropagationGraph pg(g);
  REQUIRE(&pg.base() == &g);
  REQUIRE(pg.arc_count() == 6);

  const auto n0 = pg.neighbors(0);
  REQUIRE(std::vector<ClassId>(n0.begin(), n0.end()) ==
          std::vector<ClassId>{1, 2});
  const auto n1 = pg.neighbors(1);
  REQUIRE(std::vector<ClassId>(n1.begin(), n1.end()) ==
          std::vector<ClassId>{0, 2});
  REQUIRE(pg.arc_index(0, 1).has_value());
  REQUIRE_FALSE(pg.arc_index(0, 0).has_value());
}

TEST_CASE("mark names match their reporting form", "[model]") {
  REQUIRE(to_string(Mark::Blank) == "blank");
  REQUIRE(to_string(Mark::Impacted) == "impacted");
  REQUIRE(to_string(Mark::Unchanged) == "unchanged");
  REQUIRE(to_string(Mark::Next) == "next");
  REQUIRE(to_string(Mark::Propagating) == "propagating");
}
