// Command-line front end: ingestion helpers, weight precomputation, the
// reenactment itself, report regeneration, and the synthetic benchmark.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iia/engine.hpp"
#include "iia/synth.hpp"

namespace {

struct Overrides {
  std::string output_dir;
  std::string vectors_cache;
  std::vector<std::string> heuristics;
  std::vector<double> percents;
  std::size_t lsi_rank = 0;
  std::uint64_t seed = 0;
  unsigned parallelism = 0;
};

void add_override_flags(CLI::App* cmd, Overrides* ov) {
  cmd->add_option("--output-dir", ov->output_dir,
                  "where result files go (default from config, then "
                  "$IIA_OUTPUT_DIR, then ./out)");
  cmd->add_option("--vectors-cache", ov->vectors_cache,
                  "semantic vector cache file");
  cmd->add_option("--heuristics", ov->heuristics,
                  "subset of rnd,dbh,hist1,ccir,hist2,rcir")
      ->delimiter(',');
  cmd->add_option("--percents", ov->percents, "TopN percentages")
      ->delimiter(',');
  cmd->add_option("--lsi-rank", ov->lsi_rank, "semantic space rank (0 = auto)");
  cmd->add_option("--seed", ov->seed, "seed for the random heuristic");
  cmd->add_option("--parallelism", ov->parallelism,
                  "worker threads (0 = hardware)");
}

void apply(const CLI::App* cmd, const Overrides& ov,
           iia::ExperimentConfig* cfg) {
  if (cmd->count("--output-dir")) cfg->output_dir = ov.output_dir;
  if (cmd->count("--vectors-cache")) cfg->vectors_cache = ov.vectors_cache;
  if (cmd->count("--lsi-rank")) cfg->lsi_rank = ov.lsi_rank;
  if (cmd->count("--seed")) cfg->seed = ov.seed;
  if (cmd->count("--parallelism")) cfg->parallelism = ov.parallelism;
  if (cmd->count("--heuristics")) {
    cfg->heuristics.clear();
    for (const auto& name : ov.heuristics) {
      auto h = iia::heuristic_from_string(name);
      if (!h) throw iia::Error("unknown heuristic " + name);
      cfg->heuristics.push_back(*h);
    }
  }
  if (cmd->count("--percents")) cfg->percents = ov.percents;
  cfg->canonicalize();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reenacts iterative impact analysis over historical changes"};
  app.require_subcommand(1);

  auto* conv = app.add_subcommand(
      "convert-log", "convert a plain-text name-only commit log to JSONL");
  std::string conv_in, conv_out, conv_map;
  conv->add_option("input", conv_in, "raw 'commit <id> <date>' log")
      ->required();
  conv->add_option("output", conv_out, "JSONL file to write")->required();
  conv->add_option("--class-map", conv_map,
                   "JSON object mapping file paths to class names");

  auto* mine = app.add_subcommand("mine-rules",
                                  "dump the co-change rule table as CSV");
  std::string mine_commits, mine_out, mine_map, mine_start, mine_end;
  mine->add_option("commits", mine_commits, "commit log (JSONL or raw)")
      ->required();
  mine->add_option("output", mine_out, "CSV file to write")->required();
  mine->add_option("--start", mine_start, "keep commits from this date on");
  mine->add_option("--end", mine_end, "keep commits up to this date");
  mine->add_option("--class-map", mine_map,
                   "JSON object mapping file paths to class names");

  auto* vec = app.add_subcommand("build-vectors",
                                 "precompute the semantic vector cache");
  std::string vec_cfg;
  Overrides vec_ov;
  vec->add_option("config", vec_cfg, "experiment config JSON")->required();
  add_override_flags(vec, &vec_ov);

  auto* run = app.add_subcommand("reenact", "run the full experiment grid");
  std::string run_cfg;
  Overrides run_ov;
  run->add_option("config", run_cfg, "experiment config JSON")->required();
  add_override_flags(run, &run_ov);

  auto* rep = app.add_subcommand(
      "report", "rebuild tables and plots from per-case CSV files");
  std::vector<std::string> rep_inputs;
  std::string rep_out;
  rep->add_option("cases", rep_inputs, "one or more cases.csv files")
      ->required();
  rep->add_option("--output-dir", rep_out, "where tables and plots go");

  auto* syn = app.add_subcommand("synth", "generate a synthetic benchmark");
  std::string syn_dir;
  iia::SynthParams params;
  syn->add_option("dir", syn_dir, "directory for the generated dataset")
      ->required();
  syn->add_option("--seed", params.seed, "generator seed");
  syn->add_option("--classes", params.classes, "number of classes (>= 10)");
  syn->add_option("--requests", params.requests, "number of change requests");
  syn->add_option("--commits", params.commits,
                  "number of commits (0 = 12 per class)");
  syn->add_option("--tight-fraction", params.tight_fraction,
                  "share of requests planted as call cliques");

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed())
      return iia::cmd_convert_log(conv_in, conv_out, conv_map, std::cout);
    if (mine->parsed()) {
      const iia::DateInterval defaults;
      const iia::DateInterval interval(
          mine_start.empty() ? defaults.start : iia::parse_date(mine_start),
          mine_end.empty() ? defaults.end : iia::parse_date(mine_end));
      return iia::cmd_mine_rules(mine_commits, interval, mine_map, mine_out,
                                 std::cout);
    }
    if (vec->parsed()) {
      iia::ExperimentConfig cfg = iia::load_config(vec_cfg);
      apply(vec, vec_ov, &cfg);
      return iia::cmd_build_vectors(cfg, std::cout);
    }
    if (run->parsed()) {
      iia::ExperimentConfig cfg = iia::load_config(run_cfg);
      apply(run, run_ov, &cfg);
      return iia::cmd_reenact(cfg, std::cout);
    }
    if (rep->parsed()) {
      std::vector<std::filesystem::path> inputs(rep_inputs.begin(),
                                                rep_inputs.end());
      const std::filesystem::path out = rep->count("--output-dir")
                                            ? std::filesystem::path(rep_out)
                                            : iia::default_output_dir();
      return iia::cmd_report(inputs, out, std::cout);
    }
    if (syn->parsed()) {
      iia::write_synth_dataset(params, syn_dir);
      std::cout << "synthetic dataset: " << params.classes << " classes, "
                << params.requests << " requests, seed " << params.seed
                << " -> " << syn_dir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
