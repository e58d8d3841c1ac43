#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "iia/heuristics.hpp"
#include "iia/model.hpp"
#include "iia/reenact.hpp"

namespace iia {

/// One simulated case flattened for CSV exchange. vs_size counts every
/// marked class including the starting one; m_size is the number of
/// actually-impacted classes reachable in the budgeted subgraph.
struct CaseRow {
  std::string system;
  std::string request_id;
  Heuristic heuristic = Heuristic::Rnd;
  double percent = 0.0;
  std::uint32_t n = 0;
  std::string iic;
  std::uint64_t vs_size = 0;
  std::uint64_t m_size = 0;
  double precision = 0.0;
  double recall = 0.0;
};

inline CaseRow to_row(const CaseResult& r, const SubjectSystem& sys) {
  CaseRow row;
  row.system = sys.name();
  row.request_id = r.request_id;
  row.heuristic = r.heuristic;
  row.percent = r.percent;
  row.n = r.n;
  row.iic = sys.class_name(r.iic);
  row.vs_size = r.visited.size();
  row.m_size = r.reachable_ais.size();
  row.precision = r.precision;
  row.recall = r.recall;
  return row;
}

/// Per-request averages over its initial impacted classes.
struct RequestMetrics {
  std::string system;
  std::string request_id;
  Heuristic heuristic = Heuristic::Rnd;
  double percent = 0.0;
  double p_cr = 0.0;
  double r_cr = 0.0;
};

/// Per-system (or pooled "overall") statistics over the request averages.
struct SystemMetrics {
  std::string system;
  Heuristic heuristic = Heuristic::Rnd;
  double percent = 0.0;
  std::optional<std::uint32_t> n_actual;  // unset when systems disagree
  std::size_t request_count = 0;
  double p_avg = 0.0, p_sd = 0.0, p_med = 0.0;
  double r_avg = 0.0, r_sd = 0.0, r_med = 0.0;
};

namespace detail {

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// population standard deviation (divide by the count)
inline double pop_sd(std::span<const double> v, double mu) {
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / double(v.size()));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// table cells: value on the 0-100 scale with one decimal
inline std::string fmt_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

}  // namespace detail

inline RequestMetrics request_metrics(std::span<const CaseRow> rows) {
  if (rows.empty()) throw Error("request_metrics: no cases");
  RequestMetrics m;
  m.system = rows.front().system;
  m.request_id = rows.front().request_id;
  m.heuristic = rows.front().heuristic;
  m.percent = rows.front().percent;
  double p = 0.0, r = 0.0;
  for (const auto& row : rows) {
    p += row.precision;
    r += row.recall;
  }
  m.p_cr = p / double(rows.size());
  m.r_cr = r / double(rows.size());
  return m;
}

inline SystemMetrics system_metrics(std::span<const RequestMetrics> reqs,
                                    const std::string& system,
                                    std::optional<std::uint32_t> n_actual) {
  if (reqs.empty()) throw Error("system_metrics: no requests");
  SystemMetrics s;
  s.system = system;
  s.heuristic = reqs.front().heuristic;
  s.percent = reqs.front().percent;
  s.n_actual = n_actual;
  s.request_count = reqs.size();
  std::vector<double> ps, rs;
  ps.reserve(reqs.size());
  rs.reserve(reqs.size());
  for (const auto& r : reqs) {
    ps.push_back(r.p_cr);
    rs.push_back(r.r_cr);
  }
  s.p_avg = detail::mean(ps);
  s.p_sd = detail::pop_sd(ps, s.p_avg);
  s.p_med = detail::median(ps);
  s.r_avg = detail::mean(rs);
  s.r_sd = detail::pop_sd(rs, s.r_avg);
  s.r_med = detail::median(rs);
  return s;
}

struct Aggregates {
  std::vector<RequestMetrics> requests;
  std::vector<SystemMetrics> systems;  // real systems first, then "overall"
};

/// Rolls case rows up to request and system statistics. Grouping is by
/// sorted keys, so input order never shows in the output. The "overall"
/// pseudo-system pools every request across systems at equal weight.
inline Aggregates aggregate(std::span<const CaseRow> rows) {
  using ReqKey = std::tuple<std::string, std::string, int, double>;
  std::map<ReqKey, std::vector<CaseRow>> by_request;
  std::map<std::pair<std::string, double>, std::uint32_t> n_of;
  for (const auto& r : rows) {
    by_request[{r.system, r.request_id, int(r.heuristic), r.percent}]
        .push_back(r);
    n_of.emplace(std::make_pair(r.system, r.percent), r.n);
  }

  Aggregates agg;
  using SysKey = std::tuple<std::string, int, double>;
  std::map<SysKey, std::vector<RequestMetrics>> by_system;
  for (auto& [key, group] : by_request) {
    // fix the summation order so shuffled input cannot shift a single ulp
    std::sort(group.begin(), group.end(),
              [](const CaseRow& a, const CaseRow& b) { return a.iic < b.iic; });
    RequestMetrics m = request_metrics(group);
    by_system[{m.system, int(m.heuristic), m.percent}].push_back(m);
    by_system[{std::string(), int(m.heuristic), m.percent}].push_back(m);
    agg.requests.push_back(std::move(m));
  }

  std::vector<SystemMetrics> overall;
  for (const auto& [key, group] : by_system) {
    const auto& [system, h, percent] = key;
    if (system.empty()) {
      // pooled row: n_actual only if every contributing system agrees
      std::optional<std::uint32_t> n;
      bool same = true;
      for (const auto& [np, nv] : n_of)
        if (np.second == percent) {
          if (n && *n != nv) same = false;
          n = nv;
        }
      overall.push_back(system_metrics(group, "overall",
                                       same ? n : std::nullopt));
    } else {
      agg.systems.push_back(system_metrics(group, system, n_of[{system, percent}]));
    }
  }
  agg.systems.insert(agg.systems.end(), overall.begin(), overall.end());
  return agg;
}

inline void write_cases_csv(std::span<const CaseRow> rows,
                            const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "system,request_id,heuristic,percent,n,iic,vs_size,m_size,"
         "precision,recall\n";
  for (const auto& r : rows) {
    out << r.system << ',' << r.request_id << ',' << to_string(r.heuristic)
        << ',' << detail::fmt_full(r.percent) << ',' << r.n << ',' << r.iic
        << ',' << r.vs_size << ',' << r.m_size << ','
        << detail::fmt_full(r.precision) << ',' << detail::fmt_full(r.recall)
        << "\n";
  }
}

inline std::vector<CaseRow> read_cases_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<CaseRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;  // header
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 10)
      throw Error(path.string() + ":" + std::to_string(lineno) +
                  ": expected 10 fields, got " + std::to_string(f.size()));
    CaseRow r;
    r.system = f[0];
    r.request_id = f[1];
    auto h = heuristic_from_string(f[2]);
    if (!h)
      throw Error(path.string() + ":" + std::to_string(lineno) +
                  ": unknown heuristic " + f[2]);
    r.heuristic = *h;
    r.percent = std::strtod(f[3].c_str(), nullptr);
    r.n = std::uint32_t(std::strtoul(f[4].c_str(), nullptr, 10));
    r.iic = f[5];
    r.vs_size = std::strtoull(f[6].c_str(), nullptr, 10);
    r.m_size = std::strtoull(f[7].c_str(), nullptr, 10);
    r.precision = std::strtod(f[8].c_str(), nullptr);
    r.recall = std::strtod(f[9].c_str(), nullptr);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

inline std::vector<Heuristic> heuristics_in(const std::vector<SystemMetrics>& ms) {
  std::vector<Heuristic> out;
  for (Heuristic h : kAllHeuristics)
    for (const auto& m : ms)
      if (m.heuristic == h) {
        out.push_back(h);
        break;
      }
  return out;
}

inline std::vector<double> percents_in(const std::vector<SystemMetrics>& ms) {
  std::vector<double> out;
  for (const auto& m : ms) out.push_back(m.percent);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::string> systems_in(const std::vector<SystemMetrics>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms)
    if (m.system != "overall") out.push_back(m.system);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (const auto& m : ms)
    if (m.system == "overall") {
      out.push_back("overall");
      break;
    }
  return out;
}

inline const SystemMetrics* find_metrics(const std::vector<SystemMetrics>& ms,
                                         const std::string& system, Heuristic h,
                                         double percent) {
  for (const auto& m : ms)
    if (m.system == system && m.heuristic == h && m.percent == percent)
      return &m;
  return nullptr;
}

}  // namespace detail

/// One precision and one recall table per system (plus overall), shaped
/// like the published tables: a row per TopN percentage with the actual N,
/// then avg/sd per heuristic on the 0-100 scale. Full-precision numbers go
/// to metrics.csv and requests.csv alongside.
inline void emit_tables(const Aggregates& agg,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto heuristics = detail::heuristics_in(agg.systems);
  const auto percents = detail::percents_in(agg.systems);

  for (const std::string& system : detail::systems_in(agg.systems)) {
    for (const bool recall : {false, true}) {
      auto out = detail::open_out(
          dir / (system + (recall ? "_recall.csv" : "_precision.csv")));
      out << "percent,n_actual";
      for (Heuristic h : heuristics)
        out << ',' << to_string(h) << "_avg," << to_string(h) << "_sd";
      out << "\n";
      for (double p : percents) {
        char pb[32];
        std::snprintf(pb, sizeof pb, "%.1f", p);
        out << pb;
        const SystemMetrics* any =
            detail::find_metrics(agg.systems, system, heuristics.front(), p);
        if (any && any->n_actual)
          out << ',' << *any->n_actual;
        else
          out << ",-";
        for (Heuristic h : heuristics) {
          const SystemMetrics* m = detail::find_metrics(agg.systems, system, h, p);
          if (!m) {
            out << ",-,-";
            continue;
          }
          out << ',' << detail::fmt_pct(recall ? m->r_avg : m->p_avg) << ','
              << detail::fmt_pct(recall ? m->r_sd : m->p_sd);
        }
        out << "\n";
      }
    }
  }

  {
    auto out = detail::open_out(dir / "metrics.csv");
    out << "system,heuristic,percent,n_actual,request_count,"
           "p_avg,p_sd,p_med,r_avg,r_sd,r_med\n";
    for (const auto& m : agg.systems) {
      out << m.system << ',' << to_string(m.heuristic) << ','
          << detail::fmt_full(m.percent) << ',';
      if (m.n_actual)
        out << *m.n_actual;
      else
        out << '-';
      out << ',' << m.request_count << ',' << detail::fmt_full(m.p_avg) << ','
          << detail::fmt_full(m.p_sd) << ',' << detail::fmt_full(m.p_med)
          << ',' << detail::fmt_full(m.r_avg) << ',' << detail::fmt_full(m.r_sd)
          << ',' << detail::fmt_full(m.r_med) << "\n";
    }
  }
  {
    auto out = detail::open_out(dir / "requests.csv");
    out << "system,request_id,heuristic,percent,p_cr,r_cr\n";
    for (const auto& r : agg.requests)
      out << r.system << ',' << r.request_id << ',' << to_string(r.heuristic)
          << ',' << detail::fmt_full(r.percent) << ','
          << detail::fmt_full(r.p_cr) << ',' << detail::fmt_full(r.r_cr)
          << "\n";
  }
}

namespace detail {

inline constexpr std::string_view svg_color(Heuristic h) {
  switch (h) {
    case Heuristic::Rnd: return "#7f7f7f";
    case Heuristic::Dbh: return "#d62728";
    case Heuristic::Hist1: return "#2ca02c";
    case Heuristic::Ccir: return "#1f77b4";
    case Heuristic::Hist2: return "#9467bd";
    case Heuristic::Rcir: return "#ff7f0e";
  }
  return "#000000";
}

inline void write_chart(const std::filesystem::path& path,
                        const std::string& title,
                        const std::vector<double>& percents,
                        const std::vector<std::pair<Heuristic, std::vector<double>>>& series) {
  const double w = 640, h = 420;
  const double l = 60, r = 150, t = 40, b = 50;  // margins
  const double x0 = percents.front(), x1 = percents.back();
  auto sx = [&](double p) {
    return x1 == x0 ? l : l + (p - x0) / (x1 - x0) * (w - l - r);
  };
  auto sy = [&](double v) { return h - b - v / 100.0 * (h - t - b); };
  char buf[256];
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"420\" font-family=\"sans-serif\" font-size=\"12\">\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"24\" font-size=\"15\">%s</text>\n", l,
                title.c_str());
  out << buf;
  // axes and horizontal grid every 20 points
  for (int v = 0; v <= 100; v += 20) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                  "stroke=\"#dddddd\"/>\n",
                  l, sy(v), w - r, sy(v));
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">%d</text>\n",
                  l - 6, sy(v) + 4, v);
    out << buf;
  }
  for (double p : percents) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">"
                  "%.1f</text>\n",
                  sx(p), h - b + 18, p);
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"#333333\"/>\n",
                l, sy(0), w - r, sy(0));
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"#333333\"/>\n",
                l, sy(0), l, sy(100));
  out << buf;

  double ly = t + 10;
  for (const auto& [h_id, values] : series) {
    std::string pts;
    for (std::size_t i = 0; i < percents.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(percents[i]),
                    sy(values[i] * 100.0));
      pts += buf;
    }
    out << "<polyline fill=\"none\" stroke=\"" << svg_color(h_id)
        << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                  "stroke=\"%s\" stroke-width=\"2\"/>\n",
                  w - r + 10, ly, w - r + 34, ly,
                  std::string(svg_color(h_id)).c_str());
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\">%s</text>\n",
                  w - r + 40, ly + 4, std::string(to_string(h_id)).c_str());
    out << buf;
    ly += 18;
  }
  out << "</svg>\n";
}

}  // namespace detail

/// Four line charts per system: mean and median of precision and recall
/// against the TopN percentage, one colored series per heuristic.
inline void emit_plots(const Aggregates& agg,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto heuristics = detail::heuristics_in(agg.systems);
  const auto percents = detail::percents_in(agg.systems);
  if (percents.empty()) return;

  struct Kind {
    const char* suffix;
    const char* label;
    double SystemMetrics::*field;
  };
  const Kind kinds[] = {
      {"precision_avg", "mean precision (%)", &SystemMetrics::p_avg},
      {"precision_median", "median precision (%)", &SystemMetrics::p_med},
      {"recall_avg", "mean recall (%)", &SystemMetrics::r_avg},
      {"recall_median", "median recall (%)", &SystemMetrics::r_med},
  };
  for (const std::string& system : detail::systems_in(agg.systems)) {
    for (const Kind& kind : kinds) {
      std::vector<std::pair<Heuristic, std::vector<double>>> series;
      for (Heuristic h : heuristics) {
        std::vector<double> vals;
        for (double p : percents) {
          const SystemMetrics* m = detail::find_metrics(agg.systems, system, h, p);
          vals.push_back(m ? m->*kind.field : 0.0);
        }
        series.emplace_back(h, std::move(vals));
      }
      detail::write_chart(dir / (system + "_" + kind.suffix + ".svg"),
                          system + ": " + kind.label, percents, series);
    }
  }
}

}  // namespace iia
