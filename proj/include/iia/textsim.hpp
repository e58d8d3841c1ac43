#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "iia/hashing.hpp"
#include "iia/model.hpp"
#include "iia/tokenize.hpp"

namespace iia {

/// Sparse tf-idf matrix over the tokenized documents.
/// tf = 1 + log(count) for count > 0, idf = log(1 + D / (1 + df)).
struct TermDocumentMatrix {
  std::vector<std::string> terms;  // sorted vocabulary
  std::vector<double> idf;         // aligned with terms
  std::vector<std::string> doc_ids;
  // per-document tf-idf cells, sorted by term index
  std::vector<std::vector<std::pair<std::uint32_t, double>>> cols;

  std::size_t term_count() const { return terms.size(); }
  std::size_t doc_count() const { return doc_ids.size(); }
};

inline TermDocumentMatrix build_tdm(std::span<const std::string> doc_ids,
                                    std::span<const std::string> documents) {
  if (doc_ids.size() != documents.size())
    throw Error("build_tdm: id/document count mismatch");
  std::vector<std::vector<std::string>> tokens(documents.size());
  std::map<std::string, std::uint32_t> df;  // ordered: vocabulary comes out sorted
  for (std::size_t d = 0; d < documents.size(); ++d) {
    tokens[d] = tokenize(documents[d]);
    std::vector<std::string> uniq = tokens[d];
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto& t : uniq) df[t]++;
  }
  if (df.empty()) throw Error("build_tdm: corpus has no vocabulary");

  TermDocumentMatrix tdm;
  tdm.doc_ids.assign(doc_ids.begin(), doc_ids.end());
  tdm.terms.reserve(df.size());
  tdm.idf.reserve(df.size());
  std::unordered_map<std::string_view, std::uint32_t> index;
  const double d_total = static_cast<double>(documents.size());
  for (const auto& [term, count] : df) {
    index.emplace(term, static_cast<std::uint32_t>(tdm.terms.size()));
    tdm.terms.push_back(term);
    tdm.idf.push_back(std::log(1.0 + d_total / (1.0 + count)));
  }
  // index holds views into tdm.terms; no reallocation happens past this point.
  index.clear();
  for (std::uint32_t i = 0; i < tdm.terms.size(); ++i) index.emplace(tdm.terms[i], i);

  tdm.cols.resize(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& t : tokens[d]) counts[index.at(t)]++;
    auto& col = tdm.cols[d];
    col.reserve(counts.size());
    for (const auto& [t, c] : counts)
      col.emplace_back(t, (1.0 + std::log(double(c))) * tdm.idf[t]);
  }
  return tdm;
}

/// Reduced-rank vector space over the corpus documents. Document vectors are
/// the right-singular directions scaled by the singular values; the retained
/// projection folds query text from term space into concept space. Built by
/// an eigendecomposition of the document Gram matrix, which is deterministic,
/// so equal inputs give bit-identical vectors.
class LsiSpace {
 public:
  std::size_t rank() const { return rank_; }
  std::size_t doc_count() const { return doc_ids_.size(); }
  std::size_t term_count() const { return terms_.size(); }

  std::span<const double> doc_vector(std::size_t doc) const {
    return {doc_vectors_.data() + doc * rank_, rank_};
  }
  std::span<const double> singular_values() const { return sigma_; }
  std::span<const std::string> doc_ids() const { return doc_ids_; }

  std::size_t doc_index(std::string_view id) const {
    auto it = doc_index_.find(std::string(id));
    if (it == doc_index_.end())
      throw Error("unknown document id '" + std::string(id) + "'");
    return it->second;
  }

  double cosine(std::size_t a, std::size_t b) const {
    return clamped_cosine(doc_vector(a), norms_[a], doc_vector(b), norms_[b]);
  }

  /// Weights the query tokens with the corpus idf and projects them into
  /// concept space. Unknown terms are ignored; a query with no known terms
  /// yields the zero vector.
  std::vector<double> fold_in(std::string_view text) const {
    std::unordered_map<std::uint32_t, std::uint32_t> counts;
    for (const auto& tok : tokenize(text)) {
      auto it = term_index_.find(tok);
      if (it != term_index_.end()) counts[it->second]++;
    }
    std::vector<double> qv(rank_, 0.0);
    for (const auto& [t, c] : counts) {
      const double w = (1.0 + std::log(double(c))) * idf_[t];
      const double* proj = projection_.data() + std::size_t(t) * rank_;
      for (std::size_t i = 0; i < rank_; ++i) qv[i] += w * proj[i];
    }
    return qv;
  }

  double query_cosine(std::span<const double> qv, std::size_t doc) const {
    double qn = 0;
    for (double v : qv) qn += v * v;
    return clamped_cosine(qv, std::sqrt(qn), doc_vector(doc), norms_[doc]);
  }

  static LsiSpace project(const TermDocumentMatrix& tdm, std::size_t k);

  // Serialized representation (vector cache); see write_cache/load_cache.
  friend void write_lsi_cache(const LsiSpace&, std::uint64_t digest,
                              std::uint64_t seed, const std::filesystem::path&);
  friend std::optional<LsiSpace> load_lsi_cache(const std::filesystem::path&,
                                                std::uint64_t digest,
                                                std::size_t k, std::uint64_t seed);

 private:
  static double clamped_cosine(std::span<const double> a, double na,
                               std::span<const double> b, double nb) {
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    double dot = 0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return std::clamp(dot / (na * nb), 0.0, 1.0);
  }

  void finish() {
    doc_index_.clear();
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) doc_index_[doc_ids_[i]] = i;
    term_index_.clear();
    for (std::uint32_t i = 0; i < terms_.size(); ++i) term_index_[terms_[i]] = i;
    norms_.resize(doc_count());
    for (std::size_t i = 0; i < doc_count(); ++i) {
      double n = 0;
      for (double v : doc_vector(i)) n += v * v;
      norms_[i] = std::sqrt(n);
    }
  }

  std::size_t rank_ = 0;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::vector<std::string> doc_ids_;
  std::vector<double> doc_vectors_;  // doc_count x rank, row-major
  std::vector<double> sigma_;        // descending
  std::vector<double> projection_;   // term_count x rank, row-major
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> doc_index_;
  std::unordered_map<std::string, std::uint32_t> term_index_;
};

inline LsiSpace LsiSpace::project(const TermDocumentMatrix& tdm, std::size_t k) {
  const std::size_t docs = tdm.doc_count();
  const std::size_t terms = tdm.term_count();
  if (k < 1 || k > std::min(docs, terms))
    throw Error("lsi rank " + std::to_string(k) + " out of range [1, " +
                std::to_string(std::min(docs, terms)) + "]");

  // Gram matrix of the document columns; its eigenvectors are the right
  // singular vectors of the tf-idf matrix.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(docs, docs);
  for (std::size_t i = 0; i < docs; ++i) {
    for (std::size_t j = i; j < docs; ++j) {
      const auto& a = tdm.cols[i];
      const auto& b = tdm.cols[j];
      double dot = 0;
      std::size_t p = 0, q = 0;
      while (p < a.size() && q < b.size()) {
        if (a[p].first < b[q].first)
          ++p;
        else if (a[p].first > b[q].first)
          ++q;
        else
          dot += a[p++].second * b[q++].second;
      }
      gram(i, j) = dot;
      gram(j, i) = dot;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw Error("lsi projection: eigendecomposition failed");

  LsiSpace space;
  space.rank_ = k;
  space.terms_ = tdm.terms;
  space.idf_ = tdm.idf;
  space.doc_ids_ = tdm.doc_ids;
  space.sigma_.resize(k);
  space.doc_vectors_.assign(docs * k, 0.0);
  space.projection_.assign(terms * k, 0.0);

  // Eigenvalues come out ascending; column k-1-i of the eigenvector matrix is
  // the i-th strongest direction.
  const auto& vals = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();
  for (std::size_t i = 0; i < k; ++i)
    space.sigma_[i] = std::sqrt(std::max(0.0, vals(docs - 1 - i)));

  const double sigma_floor = space.sigma_.empty() ? 0.0 : space.sigma_[0] * 1e-12;
  for (std::size_t j = 0; j < docs; ++j)
    for (std::size_t i = 0; i < k; ++i)
      space.doc_vectors_[j * k + i] = space.sigma_[i] * vecs(j, docs - 1 - i);

  // projection = X * V_k * Sigma_k^+, accumulated over the sparse columns.
  for (std::size_t j = 0; j < docs; ++j) {
    for (const auto& [t, w] : tdm.cols[j]) {
      double* row = space.projection_.data() + std::size_t(t) * k;
      for (std::size_t i = 0; i < k; ++i) {
        if (space.sigma_[i] <= sigma_floor) continue;
        row[i] += w * vecs(j, docs - 1 - i) / space.sigma_[i];
      }
    }
  }
  space.finish();
  return space;
}

/// Default reduced rank: min(200, docs - 1, terms - 1), at least 1.
inline std::size_t default_lsi_rank(const TermDocumentMatrix& tdm) {
  const std::size_t cap =
      std::min({std::size_t{200}, tdm.doc_count() - 1, tdm.term_count() - 1});
  return std::max<std::size_t>(1, cap);
}

inline LsiSpace lsi_project(const TermDocumentMatrix& tdm, std::size_t k) {
  return LsiSpace::project(tdm, k);
}

inline double cosine_sim(const LsiSpace& space, std::string_view a,
                         std::string_view b) {
  return space.cosine(space.doc_index(a), space.doc_index(b));
}

inline std::vector<double> fold_in_query(const LsiSpace& space,
                                         std::string_view text) {
  return space.fold_in(text);
}

inline double query_sim(const LsiSpace& space, std::span<const double> qv,
                        std::string_view doc) {
  return space.query_cosine(qv, space.doc_index(doc));
}

// ---------------------------------------------------------------------------
// Vector cache. Keyed by corpus digest, rank and seed; a mismatch on load
// returns nullopt so the caller rebuilds.

inline std::uint64_t corpus_digest(std::span<const std::string> doc_ids,
                                   std::span<const std::string> documents) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a_u64(h, doc_ids.size());
  h = fnv1a_u64(h, kStopListVersion);
  for (std::size_t i = 0; i < doc_ids.size(); ++i) {
    h = fnv1a(h, doc_ids[i]);
    h = fnv1a(h, "\x1f");
    h = fnv1a(h, documents[i]);
    h = fnv1a(h, "\x1e");
  }
  return h;
}

inline constexpr int kLsiCacheVersion = 1;

inline void write_lsi_cache(const LsiSpace& space, std::uint64_t digest,
                            std::uint64_t seed,
                            const std::filesystem::path& path) {
  nlohmann::json j;
  j["version"] = kLsiCacheVersion;
  j["digest"] = digest;
  j["seed"] = seed;
  j["k"] = space.rank_;
  j["terms"] = space.terms_;
  j["idf"] = space.idf_;
  j["doc_ids"] = space.doc_ids_;
  j["sigma"] = space.sigma_;
  j["doc_vectors"] = space.doc_vectors_;
  j["projection"] = space.projection_;
  std::ofstream out(path);
  if (!out) throw Error("cannot write vector cache: " + path.string());
  out << j.dump() << "\n";
}

inline std::optional<LsiSpace> load_lsi_cache(const std::filesystem::path& path,
                                              std::uint64_t digest,
                                              std::size_t k,
                                              std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.value("version", -1) != kLsiCacheVersion) return std::nullopt;
    if (j.value("digest", std::uint64_t{0}) != digest) return std::nullopt;
    if (j.value("k", std::size_t{0}) != k) return std::nullopt;
    if (j.value("seed", std::uint64_t{0}) != seed) return std::nullopt;
    LsiSpace space;
    space.rank_ = k;
    space.terms_ = j.at("terms").get<std::vector<std::string>>();
    space.idf_ = j.at("idf").get<std::vector<double>>();
    space.doc_ids_ = j.at("doc_ids").get<std::vector<std::string>>();
    space.sigma_ = j.at("sigma").get<std::vector<double>>();
    space.doc_vectors_ = j.at("doc_vectors").get<std::vector<double>>();
    space.projection_ = j.at("projection").get<std::vector<double>>();
    if (space.doc_vectors_.size() != space.doc_ids_.size() * k) return std::nullopt;
    if (space.projection_.size() != space.terms_.size() * k) return std::nullopt;
    space.finish();
    return space;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace iia
