#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "iia/textsim.hpp"
#include "util.hpp"

using namespace iia;
using testutil::TempDir;

namespace {

double cell(const TermDocumentMatrix& tdm, const std::string& term,
            std::size_t doc) {
  const auto it = std::lower_bound(tdm.terms.begin(), tdm.terms.end(), term);
  REQUIRE(it != tdm.terms.end());
  REQUIRE(*it == term);
  const auto t = std::uint32_t(it - tdm.terms.begin());
  for (const auto& [idx, w] : tdm.cols[doc])
    if (idx == t) return w;
  return 0.0;
}

std::vector<std::vector<double>> dense(const TermDocumentMatrix& tdm) {
  std::vector<std::vector<double>> a(tdm.term_count(),
                                     std::vector<double>(tdm.doc_count(), 0.0));
  for (std::size_t d = 0; d < tdm.doc_count(); ++d)
    for (const auto& [t, w] : tdm.cols[d]) a[t][d] = w;
  return a;
}

double brute_cosine(const std::vector<std::vector<double>>& a, std::size_t i,
                    std::size_t j) {
  double dot = 0, ni = 0, nj = 0;
  for (const auto& row : a) {
    dot += row[i] * row[j];
    ni += row[i] * row[i];
    nj += row[j] * row[j];
  }
  if (ni == 0 || nj == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(ni) * std::sqrt(nj)), 0.0, 1.0);
}

// Closed-form eigenvalues of a symmetric 3x3 matrix (trigonometric method),
// descending. Independent of any matrix library.
std::array<double, 3> sym3_eigs(const std::array<std::array<double, 3>, 3>& m) {
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  std::array<double, 3> eig;
  if (p1 < 1e-30) {
    eig = {m[0][0], m[1][1], m[2][2]};
  } else {
    const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    const double p2 = (m[0][0] - q) * (m[0][0] - q) +
                      (m[1][1] - q) * (m[1][1] - q) +
                      (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    std::array<std::array<double, 3>, 3> b{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
    const double detb =
        b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
        b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
        b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double two_pi_third = 2.0 * std::numbers::pi / 3.0;
    eig[0] = q + 2.0 * p * std::cos(phi);
    eig[2] = q + 2.0 * p * std::cos(phi + two_pi_third);
    eig[1] = 3.0 * q - eig[0] - eig[2];
  }
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

}  // namespace

TEST_CASE("tf-idf cells match a hand computation", "[textsim]") {
  const std::vector<std::string> ids = {"a.P", "a.Q", "a.R"};
  const std::vector<std::string> docs = {"parse parse buffer", "buffer view",
                                         "view view view"};
  const TermDocumentMatrix tdm = build_tdm(ids, docs);
  REQUIRE(tdm.terms == std::vector<std::string>{"buffer", "parse", "view"});

  const double idf_buffer = std::log(1.0 + 3.0 / 3.0);
  const double idf_parse = std::log(1.0 + 3.0 / 2.0);
  const double idf_view = std::log(1.0 + 3.0 / 3.0);
  const auto t = [&](const std::string& term) {
    return tdm.idf[std::size_t(std::lower_bound(tdm.terms.begin(),
                                                tdm.terms.end(), term) -
                               tdm.terms.begin())];
  };
  REQUIRE(t("buffer") == Catch::Approx(idf_buffer).epsilon(1e-12));
  REQUIRE(t("parse") == Catch::Approx(idf_parse).epsilon(1e-12));
  REQUIRE(t("view") == Catch::Approx(idf_view).epsilon(1e-12));

  REQUIRE(cell(tdm, "parse", 0) ==
          Catch::Approx((1.0 + std::log(2.0)) * idf_parse).epsilon(1e-12));
  REQUIRE(cell(tdm, "buffer", 0) == Catch::Approx(idf_buffer).epsilon(1e-12));
  REQUIRE(cell(tdm, "buffer", 1) == Catch::Approx(idf_buffer).epsilon(1e-12));
  REQUIRE(cell(tdm, "view", 1) == Catch::Approx(idf_view).epsilon(1e-12));
  REQUIRE(cell(tdm, "view", 2) ==
          Catch::Approx((1.0 + std::log(3.0)) * idf_view).epsilon(1e-12));
  REQUIRE(cell(tdm, "parse", 1) == 0.0);
  REQUIRE(cell(tdm, "buffer", 2) == 0.0);
}

TEST_CASE("identical one-term documents give equal cells", "[textsim]") {
  const TermDocumentMatrix tdm = build_tdm(
      std::vector<std::string>{"a.X", "a.Y"},
      std::vector<std::string>{"alpha", "alpha"});
  REQUIRE(tdm.term_count() == 1);
  REQUIRE(tdm.cols[0] == tdm.cols[1]);
}

TEST_CASE("rare terms outweigh common ones", "[textsim]") {
  const TermDocumentMatrix tdm = build_tdm(
      std::vector<std::string>{"a.X", "a.Y", "a.Z"},
      std::vector<std::string>{"common rare", "common", "common"});
  const auto common = std::size_t(
      std::lower_bound(tdm.terms.begin(), tdm.terms.end(), "common") -
      tdm.terms.begin());
  const auto rare = std::size_t(
      std::lower_bound(tdm.terms.begin(), tdm.terms.end(), "rare") -
      tdm.terms.begin());
  REQUIRE(tdm.idf[rare] > tdm.idf[common]);
}

TEST_CASE("a corpus without vocabulary is rejected", "[textsim]") {
  REQUIRE_THROWS_AS(build_tdm(std::vector<std::string>{"a.X", "a.Y"},
                              std::vector<std::string>{"", "if else while"}),
                    Error);
  // a single empty document among real ones is allowed: zero column
  const TermDocumentMatrix tdm = build_tdm(
      std::vector<std::string>{"a.X", "a.Y"},
      std::vector<std::string>{"alpha beta", ""});
  REQUIRE(tdm.cols[1].empty());
}

TEST_CASE("full-rank cosines equal brute-force term-space cosines",
          "[textsim]") {
  const std::vector<std::string> ids = {"a.A", "a.B", "a.C", "a.D", "a.E"};
  const std::vector<std::string> docs = {
      "parser token stream reader",
      "token stream buffer buffer",
      "widget panel layout view",
      "panel view render style layout",
      "parser buffer render",
  };
  const TermDocumentMatrix tdm = build_tdm(ids, docs);
  const std::size_t full = std::min(tdm.term_count(), tdm.doc_count());
  const LsiSpace space = lsi_project(tdm, full);
  const auto a = dense(tdm);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < ids.size(); ++j)
      REQUIRE(space.cosine(i, j) ==
              Catch::Approx(brute_cosine(a, i, j)).margin(1e-6));

  // folded-in query text behaves like one more document column
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto qv = space.fold_in(docs[d]);
    REQUIRE(space.query_cosine(qv, d) == Catch::Approx(1.0).margin(1e-6));
    for (std::size_t other = 0; other < docs.size(); ++other)
      REQUIRE(space.query_cosine(qv, other) ==
              Catch::Approx(brute_cosine(a, d, other)).margin(1e-6));
  }
}

TEST_CASE("duplicated documents are maximally similar", "[textsim]") {
  const TermDocumentMatrix tdm = build_tdm(
      std::vector<std::string>{"a.A", "a.B", "a.C"},
      std::vector<std::string>{"alpha beta gamma", "alpha beta gamma",
                               "delta delta"});
  const LsiSpace space = lsi_project(tdm, 3);
  REQUIRE(space.cosine(0, 1) >= 1.0 - 1e-9);
  REQUIRE(space.cosine(0, 1) <= 1.0);
}

TEST_CASE("singular values match the characteristic-polynomial oracle",
          "[textsim]") {
  const std::vector<std::string> ids = {"a.A", "a.B", "a.C"};
  const std::vector<std::string> docs = {"alpha beta", "beta gamma delta",
                                         "alpha delta delta"};
  const TermDocumentMatrix tdm = build_tdm(ids, docs);
  REQUIRE(tdm.term_count() == 4);
  const auto a = dense(tdm);

  std::array<std::array<double, 3>, 3> gram{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (const auto& row : a) gram[i][j] += row[i] * row[j];
  const auto eig = sym3_eigs(gram);

  const LsiSpace space = lsi_project(tdm, 3);
  REQUIRE(space.singular_values().size() == 3);
  for (int i = 0; i < 3; ++i)
    REQUIRE(space.singular_values()[i] ==
            Catch::Approx(std::sqrt(std::max(0.0, eig[i]))).margin(1e-8));

  // The squared Frobenius norm of the matrix is the eigenvalue sum, and the
  // rank-k reconstruction error is the square root of the eigenvalue tail.
  double frob2 = 0;
  for (const auto& row : a)
    for (double v : row) frob2 += v * v;
  REQUIRE(frob2 == Catch::Approx(eig[0] + eig[1] + eig[2]).epsilon(1e-9));

  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 3; ++k) {
    double tail_space = 0;
    for (std::size_t i = k; i < 3; ++i)
      tail_space += space.singular_values()[i] * space.singular_values()[i];
    double tail_oracle = 0;
    for (std::size_t i = k; i < 3; ++i) tail_oracle += std::max(0.0, eig[i]);
    const double err = std::sqrt(tail_space);
    REQUIRE(err == Catch::Approx(std::sqrt(tail_oracle)).margin(1e-8));
    REQUIRE(err <= prev + 1e-12);
    prev = err;
  }
  REQUIRE(prev == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("similarities are symmetric, bounded and zero-safe", "[textsim]") {
  const std::vector<std::string> ids = {"a.A", "a.B", "a.C", "a.D"};
  const std::vector<std::string> docs = {"alpha beta", "beta gamma",
                                         "gamma alpha delta", ""};
  const TermDocumentMatrix tdm = build_tdm(ids, docs);
  const LsiSpace space = lsi_project(tdm, 2);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const double s = space.cosine(i, j);
      REQUIRE(s == space.cosine(j, i));  // exact, not approximate
      REQUIRE(s >= 0.0);
      REQUIRE(s <= 1.0);
    }
  for (std::size_t j = 0; j < ids.size(); ++j)
    REQUIRE(space.cosine(3, j) == 0.0);  // empty document
  REQUIRE(cosine_sim(space, "a.A", "a.B") == space.cosine(0, 1));
  REQUIRE_THROWS_AS(cosine_sim(space, "a.A", "a.Nope"), Error);
}

TEST_CASE("query folding handles edge cases", "[textsim]") {
  const std::vector<std::string> ids = {"a.A", "a.B", "a.C"};
  const std::vector<std::string> docs = {"parser tokens buffer",
                                         "widget layout view",
                                         "render style theme"};
  const TermDocumentMatrix tdm = build_tdm(ids, docs);
  const LsiSpace space = lsi_project(tdm, 3);

  const auto stop = space.fold_in("the and of if while");
  for (std::size_t d = 0; d < docs.size(); ++d)
    REQUIRE(space.query_cosine(stop, d) == 0.0);

  const auto qv = fold_in_query(space, docs[1]);
  for (std::size_t d = 0; d < docs.size(); ++d)
    REQUIRE(space.query_cosine(qv, 1) >= space.query_cosine(qv, d));

  // cosine is scale-invariant at the vector level
  auto scaled = qv;
  for (double& v : scaled) v *= 3.5;
  for (std::size_t d = 0; d < docs.size(); ++d)
    REQUIRE(space.query_cosine(scaled, d) ==
            Catch::Approx(space.query_cosine(qv, d)).margin(1e-12));
  REQUIRE(query_sim(space, qv, "a.B") == space.query_cosine(qv, 1));
}

TEST_CASE("projection is bit-for-bit deterministic", "[textsim]") {
  const std::vector<std::string> ids = {"a.A", "a.B", "a.C", "a.D"};
  const std::vector<std::string> docs = {
      "parser tokens stream", "buffer stream reader", "widget layout",
      "render layout theme"};
  const TermDocumentMatrix tdm = build_tdm(ids, docs);
  const LsiSpace s1 = lsi_project(tdm, 3);
  const LsiSpace s2 = lsi_project(tdm, 3);
  for (std::size_t d = 0; d < ids.size(); ++d) {
    const auto a = s1.doc_vector(d);
    const auto b = s2.doc_vector(d);
    REQUIRE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  const auto sa = s1.singular_values();
  const auto sb = s2.singular_values();
  REQUIRE(std::equal(sa.begin(), sa.end(), sb.begin(), sb.end()));
}

TEST_CASE("rank bounds are enforced and defaulted", "[textsim]") {
  const TermDocumentMatrix tdm = build_tdm(
      std::vector<std::string>{"a.A", "a.B", "a.C"},
      std::vector<std::string>{"alpha beta", "beta gamma delta",
                               "alpha delta delta"});
  REQUIRE_THROWS_AS(lsi_project(tdm, 0), Error);
  REQUIRE_THROWS_AS(lsi_project(tdm, 4), Error);
  REQUIRE(default_lsi_rank(tdm) == 2);  // min(200, docs-1, terms-1)
  REQUIRE(lsi_project(tdm, default_lsi_rank(tdm)).rank() == 2);
}

TEST_CASE("vector cache round-trips and rejects stale keys", "[textsim]") {
  TempDir tmp("lsicache");
  const std::vector<std::string> ids = {"a.A", "a.B", "a.C"};
  const std::vector<std::string> docs = {"parser tokens", "buffer stream",
                                         "widget layout"};
  const TermDocumentMatrix tdm = build_tdm(ids, docs);
  const LsiSpace space = lsi_project(tdm, 2);
  const std::uint64_t digest = corpus_digest(ids, docs);

  const auto file = tmp.file("vectors.json");
  write_lsi_cache(space, digest, 7, file);
  const auto back = load_lsi_cache(file, digest, 2, 7);
  REQUIRE(back.has_value());
  REQUIRE(back->rank() == 2);
  for (std::size_t d = 0; d < ids.size(); ++d) {
    const auto a = space.doc_vector(d);
    const auto b = back->doc_vector(d);
    REQUIRE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  REQUIRE(back->cosine(0, 1) == space.cosine(0, 1));

  REQUIRE_FALSE(load_lsi_cache(file, digest + 1, 2, 7).has_value());
  REQUIRE_FALSE(load_lsi_cache(file, digest, 1, 7).has_value());
  REQUIRE_FALSE(load_lsi_cache(file, digest, 2, 8).has_value());
  testutil::write_file(file, "{ not json");
  REQUIRE_FALSE(load_lsi_cache(file, digest, 2, 7).has_value());
  REQUIRE_FALSE(
      load_lsi_cache(tmp.file("absent.json"), digest, 2, 7).has_value());

  // digest itself moves with the corpus
  auto docs2 = docs;
  docs2[0] += " extra";
  REQUIRE(corpus_digest(ids, docs2) != digest);
}
