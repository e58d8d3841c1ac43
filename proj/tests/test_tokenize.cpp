#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "iia/tokenize.hpp"

using iia::tokenize;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace

TEST_CASE("identifiers split on camel case and separators", "[tokenize]") {
  REQUIRE(tokenize("getFooBar_baz") ==
          std::vector<std::string>{"get", "foo", "bar", "baz"});
  REQUIRE(tokenize("openFile") == std::vector<std::string>{"open", "file"});
  REQUIRE(tokenize("foo.bar(qux)") ==
          std::vector<std::string>{"foo", "bar", "qux"});
}

TEST_CASE("acronym runs keep their last capital with the next word",
          "[tokenize]") {
  REQUIRE(tokenize("XMLHttpRequest") ==
          std::vector<std::string>{"xml", "http", "request"});
  REQUIRE(tokenize("parseURL") == std::vector<std::string>{"parse", "url"});
}

TEST_CASE("digits and punctuation separate tokens", "[tokenize]") {
  REQUIRE(tokenize("sha256sum") == std::vector<std::string>{"sha", "sum"});
  REQUIRE(tokenize("v2Counter") == std::vector<std::string>{"counter"});
  REQUIRE(tokenize("$internal_name3") ==
          std::vector<std::string>{"internal", "name"});
}

TEST_CASE("language keywords and english fillers are dropped", "[tokenize]") {
  REQUIRE(tokenize("public final int rowCount") ==
          std::vector<std::string>{"row", "count"});
  REQUIRE(tokenize("the quick brown fox") ==
          std::vector<std::string>{"quick", "brown", "fox"});
  REQUIRE(tokenize("return new String()") ==
          std::vector<std::string>{"string"});
}

TEST_CASE("single letters vanish, empty input stays empty", "[tokenize]") {
  REQUIRE(tokenize("a b xy") == std::vector<std::string>{"xy"});
  REQUIRE(tokenize("").empty());
  REQUIRE(tokenize("  \t\n ").empty());
  REQUIRE(tokenize("if else while").empty());
}

TEST_CASE("tokenizing its own output is a fixed point", "[tokenize]") {
  const std::vector<std::string> inputs = {
      "class JEditTextArea extends JComponent implements TabExpander",
      "private static final Logger LOG = LoggerFactory.getLogger()",
      "repaintLineRange(int startLine, int endLine)",
      "XMLHttpRequest getFooBar_baz sha256sum",
  };
  for (const auto& in : inputs) {
    const auto once = tokenize(in);
    REQUIRE(tokenize(join(once)) == once);
  }
}
