#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iia/ingest.hpp"
#include "iia/model.hpp"

namespace iia {

/// Co-change counts mined from the commit transactions. Keys are class
/// names, not ids: history may mention classes that no longer exist, and
/// their commits still count toward the denominators.
/// support {m,n} = commits containing both; it is symmetric by definition.
/// confidence (m -> n) = support / commits containing m; 0 for unseen m.
class RuleTable {
 public:
  static RuleTable build(const TransactionSet& ts) {
    RuleTable t;
    t.total_ = ts.transactions.size();
    for (const auto& txn : ts.transactions) {
      std::vector<std::uint32_t> ids;
      ids.reserve(txn.classes.size());
      for (const auto& name : txn.classes) ids.push_back(t.intern(name));
      for (std::uint32_t id : ids) t.class_counts_[id]++;
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
          t.pair_counts_[pair_key(ids[i], ids[j])]++;
    }
    return t;
  }

  std::size_t total() const { return total_; }
  std::size_t pair_count() const { return pair_counts_.size(); }

  std::uint32_t class_count(std::string_view name) const {
    auto id = find(name);
    return id ? class_counts_[*id] : 0u;
  }

  /// Assos(m, n): number of commits containing both classes.
  std::uint32_t support(std::string_view m, std::string_view n) const {
    auto a = find(m);
    auto b = find(n);
    if (!a || !b || *a == *b) return 0;
    auto it = pair_counts_.find(pair_key(*a, *b));
    return it == pair_counts_.end() ? 0u : it->second;
  }

  /// Assoc(m, n): fraction of the commits containing m that also contain n.
  double confidence(std::string_view m, std::string_view n) const {
    const std::uint32_t denom = class_count(m);
    if (denom == 0) return 0.0;
    return double(support(m, n)) / double(denom);
  }

  /// CSV dump of every co-occurring pair, sorted by name, one row per
  /// unordered pair: m,n,support,confidence_mn,confidence_nm.
  void dump_csv(std::ostream& out) const {
    out << "m,n,support,confidence_mn,confidence_nm\n";
    std::vector<std::pair<std::string_view, std::string_view>> pairs;
    pairs.reserve(pair_counts_.size());
    for (const auto& [key, count] : pair_counts_) {
      std::string_view a = names_[key >> 32];
      std::string_view b = names_[key & 0xffffffffu];
      if (b < a) std::swap(a, b);
      pairs.emplace_back(a, b);
    }
    std::sort(pairs.begin(), pairs.end());
    char buf[64];
    for (const auto& [m, n] : pairs) {
      out << m << ',' << n << ',' << support(m, n) << ',';
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", confidence(m, n),
                    confidence(n, m));
      out << buf << "\n";
    }
  }

 private:
  static std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(a) << 32) | b;
  }

  std::uint32_t intern(const std::string& name) {
    auto [it, inserted] = index_.emplace(name, std::uint32_t(names_.size()));
    if (inserted) {
      names_.push_back(name);
      class_counts_.push_back(0);
    }
    return it->second;
  }

  std::optional<std::uint32_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::uint32_t> class_counts_;
  std::unordered_map<std::uint64_t, std::uint32_t> pair_counts_;
  std::size_t total_ = 0;
};

inline RuleTable build_rules(const TransactionSet& ts) { return RuleTable::build(ts); }

inline std::uint32_t support(const RuleTable& t, std::string_view m,
                             std::string_view n) {
  return t.support(m, n);
}

inline double confidence(const RuleTable& t, std::string_view m,
                         std::string_view n) {
  return t.confidence(m, n);
}

}  // namespace iia
