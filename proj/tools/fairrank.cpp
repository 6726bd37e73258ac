// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fairrank: evaluate, generate query sequences, rerank, validate and plot
// fairness/utility tradeoffs.
//
// Exit codes: 0 ok, 1 usage, 2 data format, 3 validation, 4 degenerate metric.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrank/fairrank.hpp"

namespace {

using namespace fairrank;

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kDataFormat = 2,
  kValidation = 3,
  kDegenerate = 4,
};

struct ParamFlags {
  double gamma = EvalParams::kDefaultGamma;
  double stop_coef = EvalParams::kDefaultStopCoefficient;
  std::string amortization = "micro";
  bool unknown_as_group = false;

  void add_to(CLI::App* cmd, bool with_amortization = true) {
    cmd->add_option("--gamma", gamma,
                    "Continuation probability of the browsing model, in [0,1).")
        ->capture_default_str();
    cmd->add_option("--stop-coef", stop_coef,
                    "c in p(stop|d) = c * relevance(d), in [0,1].")
        ->capture_default_str();
    if (with_amortization) {
      cmd->add_option("--amortization", amortization,
                      "micro: amortize over the whole sequence; macro: per "
                      "distinct query, then the unweighted mean.")
          ->check(CLI::IsMember({"micro", "macro"}))
          ->capture_default_str();
    }
    cmd->add_flag("--unknown-as-group", unknown_as_group,
                  "Count authors missing from the groups file as one extra "
                  "group instead of dropping them.");
  }

  EvalParams params() const {
    EvalParams p(gamma, stop_coef, parse_amortization(amortization));
    p.unknown_as_group = unknown_as_group;
    return p;
  }
};

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

void print_warnings(const Warnings& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

struct GroupDef {
  std::string label;
  GroupAssignment groups;
};

std::vector<GroupDef> load_group_defs(const std::vector<std::string>& paths,
                                      const std::vector<std::string>& labels) {
  if (!labels.empty() && labels.size() != paths.size()) {
    throw ContractError("--group-label must be given once per --groups file");
  }
  std::vector<GroupDef> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    out.push_back({labels.empty() ? stem_of(paths[i]) : labels[i],
                   load_groups(paths[i])});
  }
  return out;
}

bool report_violations(const std::string& label,
                       const std::vector<Violation>& violations,
                       std::ostream& os = std::cerr) {
  for (const auto& v : violations) {
    os << label << ": " << v.where << ": " << v.message << "\n";
  }
  return violations.empty();
}

std::string format_opt(const std::optional<double>& v) {
  return v ? format_metric(*v) : std::string("undefined");
}

// ---------------------------------------------------------------------------
// Shared by evaluate and tradeoff
// ---------------------------------------------------------------------------

struct EvalInputs {
  std::string queries;
  std::string corpus;
  std::vector<std::string> groups;
  std::vector<std::string> group_labels;
  std::string sequence;
  bool allow_partial = false;
  std::string out;
  ParamFlags params;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--queries", queries, "Query file (JSON-lines) with relevance.")
        ->required();
    cmd->add_option("--corpus", corpus, "Corpus file (JSON-lines, optionally gzip).")
        ->required();
    cmd->add_option("--groups", groups,
                    "Group definition file (CSV author_id,group_id or JSON-lines). "
                    "Repeat for several definitions.")
        ->required();
    cmd->add_option("--group-label", group_labels,
                    "Label per --groups file. Default: the file's stem.");
    cmd->add_option("--sequence", sequence,
                    "Query sequence file (CSV q_num,qid) the run must answer.");
    cmd->add_flag("--allow-partial", allow_partial,
                  "Do not flag sequence positions the run omits.");
    cmd->add_option("--out", out,
                    "Output prefix; writes <prefix>.csv and <prefix>.json.")
        ->required();
    params.add_to(cmd);
  }
};

int evaluate_runs(const std::vector<std::pair<std::string, std::string>>& runs,
                  const EvalInputs& in) {
  const EvalParams params = in.params.params();
  Warnings warnings;
  auto queries = index_queries(load_queries(in.queries));
  auto corpus = load_corpus(in.corpus, &warnings);
  auto defs = load_group_defs(in.groups, in.group_labels);
  std::optional<SequenceSet> expected;
  if (!in.sequence.empty()) expected = load_sequences(in.sequence);

  std::vector<std::pair<std::string, RunSequences>> loaded;
  bool valid = true;
  std::optional<std::set<QueryId>> universe;
  for (const auto& [label, path] : runs) {
    auto records = load_run_records(path, &warnings);
    ValidationOptions opts{expected ? &*expected : nullptr, in.allow_partial};
    valid &= report_violations(label, validate_run(records, queries, opts));
    auto seqs = to_sequences(records);
    auto qids = query_universe(seqs);
    if (!universe) {
      universe = std::move(qids);
    } else if (*universe != qids) {
      std::cerr << label << ": covers a different query set than the other runs\n";
      valid = false;
    }
    loaded.emplace_back(label, std::move(seqs));
  }
  print_warnings(warnings);
  if (!valid) return kValidation;

  std::stable_sort(loaded.begin(), loaded.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<ReportRow> rows;
  bool degenerate = false;
  for (const auto& def : defs) {
    for (const auto& [label, seqs] : loaded) {
      auto ev = evaluate_run(seqs, queries, corpus.documents, def.groups, params);
      degenerate |= !ev.unfairness.has_value();
      std::cout << label << "\t" << def.label << "\tutility=" << format_metric(ev.mean_utility)
                << "\tunfairness=" << format_opt(ev.unfairness) << "\n";
      if (!ev.unfairness) {
        std::cerr << label << " [" << def.label << "]: unfairness undefined: "
                  << ev.undefined_reason << "\n";
      }
      rows.push_back({label, def.label, std::move(ev)});
    }
  }
  write_reports(in.out + ".csv", in.out + ".json", rows, params);
  return degenerate ? kDegenerate : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exposure-based fair ranking evaluation toolkit"};
  app.require_subcommand(1);

  // evaluate ---------------------------------------------------------------
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score one run: expected utility and group unfairness.");
  std::string eval_run;
  std::string eval_label;
  EvalInputs eval_in;
  evaluate->add_option("--run", eval_run, "Run file (JSON-lines q_num,qid,ranking).")
      ->required();
  evaluate->add_option("--label", eval_label, "Run label. Default: the file's stem.");
  eval_in.add_to(evaluate);

  // tradeoff ---------------------------------------------------------------
  auto* tradeoff = app.add_subcommand(
      "tradeoff", "Utility/unfairness points for several runs (CSV for plotting).");
  std::vector<std::string> trade_runs;
  EvalInputs trade_in;
  tradeoff->add_option("runs", trade_runs, "Run files; labels are the file stems.")
      ->required();
  trade_in.add_to(tradeoff);

  // seqgen -----------------------------------------------------------------
  auto* seqgen = app.add_subcommand(
      "seqgen", "Sample query sequences proportionally to query frequency.");
  std::string sg_queries, sg_out;
  std::uint64_t sg_seed = 0;
  std::size_t sg_count = kDefaultSequenceCount;
  std::size_t sg_length = kDefaultSequenceLength;
  seqgen->add_option("--queries", sg_queries, "Query file (JSON-lines).")->required();
  seqgen->add_option("--seed", sg_seed, "RNG seed.")->capture_default_str();
  seqgen->add_option("--sequences", sg_count,
                     "Number of sequences.")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  seqgen->add_option("--length", sg_length,
                     "Queries per sequence.")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  seqgen->add_option("--out", sg_out,
                     "Sequence CSV (q_num,qid); metadata goes to <out>.meta.json.")
      ->required();

  // rerank -----------------------------------------------------------------
  auto* rerank = app.add_subcommand(
      "rerank", "Run a baseline reranker over query sequences; writes a run file.");
  std::string rr_strategy = "maxutil";
  std::string rr_queries, rr_corpus, rr_groups, rr_sequence, rr_out;
  double rr_lambda = 0.0;
  std::uint64_t rr_seed = 0;
  ParamFlags rr_params;
  rerank->add_option("--strategy", rr_strategy,
                     "random: uniform shuffle; maxutil: sort by predicted "
                     "relevance; controller: greedy fairness/utility tradeoff.")
      ->check(CLI::IsMember({"random", "maxutil", "controller"}))
      ->capture_default_str();
  rerank->add_option("--queries", rr_queries, "Query file (JSON-lines).")->required();
  rerank->add_option("--corpus", rr_corpus, "Corpus file.")->required();
  rerank->add_option("--sequence", rr_sequence, "Query sequence CSV.")->required();
  rerank->add_option("--groups", rr_groups,
                     "Group file the controller balances (required for controller).");
  rerank->add_option("--lambda", rr_lambda,
                     "Controller weight on fairness, in [0,1]; 0 equals maxutil.")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  rerank->add_option("--seed", rr_seed, "RNG seed (random strategy).")
      ->capture_default_str();
  rerank->add_option("--out", rr_out, "Run file to write.")->required();
  rr_params.add_to(rerank, false);

  // validate ---------------------------------------------------------------
  auto* validate = app.add_subcommand(
      "validate", "Check that every ranking is a permutation of its query's pool.");
  std::string va_run, va_queries, va_sequence;
  bool va_partial = false;
  validate->add_option("--run", va_run, "Run file.")->required();
  validate->add_option("--queries", va_queries, "Query file.")->required();
  validate->add_option("--sequence", va_sequence,
                       "Query sequence CSV; enables omission and qid checks.");
  validate->add_flag("--allow-partial", va_partial,
                     "Do not flag sequence positions the run omits.");

  // groups -----------------------------------------------------------------
  auto* groups = app.add_subcommand(
      "groups", "Build a group file by bucketing a per-author statistic.");
  std::string gr_stats, gr_out, gr_stat_name = "v";
  std::vector<std::int64_t> gr_thresholds;
  bool gr_hindex = false;
  groups->add_option("--stats", gr_stats, "CSV author_id,<stat> of non-negative integers.")
      ->required();
  auto* hflag = groups->add_flag(
      "--hindex", gr_hindex, "h-index buckets: h<5, 5<=h<15, 15<=h<30, h>=30.");
  auto* tflag = groups->add_option(
      "--thresholds", gr_thresholds,
      "Strictly increasing cut points, e.g. for the 7-group i10 definition.")
      ->delimiter(',');
  hflag->excludes(tflag);
  groups->add_option("--stat", gr_stat_name, "Statistic name used in bucket labels.")
      ->capture_default_str();
  groups->add_option("--out", gr_out, "Group CSV to write.")->required();

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "Write a synthetic two-group corpus, query file and group file.");
  SyntheticConfig sy_cfg;
  std::string sy_out;
  synth->add_option("--out", sy_out, "Output directory.")->required();
  synth->add_option("--queries", sy_cfg.queries, "Number of queries.")
      ->capture_default_str();
  synth->add_option("--pool-size", sy_cfg.pool_size, "Documents per query.")
      ->capture_default_str();
  synth->add_option("--seed", sy_cfg.seed, "RNG seed.")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*evaluate) {
      return evaluate_runs(
          {{eval_label.empty() ? stem_of(eval_run) : eval_label, eval_run}},
          eval_in);
    }
    if (*tradeoff) {
      std::vector<std::pair<std::string, std::string>> runs;
      for (const auto& p : trade_runs) runs.emplace_back(stem_of(p), p);
      return evaluate_runs(runs, trade_in);
    }
    if (*seqgen) {
      auto queries = load_queries(sg_queries);
      auto seqs = generate_sequences(queries, sg_count, sg_length, sg_seed);
      SequenceSet set;
      for (std::size_t i = 0; i < seqs.size(); ++i) set.emplace(i, std::move(seqs[i]));
      write_sequences(sg_out, set);
      nlohmann::ordered_json meta;
      meta["rng"] = std::string(kRngName);
      meta["seed"] = sg_seed;
      meta["sequences"] = sg_count;
      meta["length"] = sg_length;
      meta["sampling"] = "i.i.d. with replacement, proportional to frequency";
      atomic_write(sg_out + ".meta.json", meta.dump(2) + "\n");
      return kOk;
    }
    if (*rerank) {
      RerankConfig cfg{parse_strategy(rr_strategy), rr_lambda, rr_seed};
      if (cfg.strategy == Strategy::Controller && rr_groups.empty()) {
        std::cerr << "rerank: --groups is required for the controller strategy\n";
        return kUsage;
      }
      EvalParams params = rr_params.params();
      Warnings warnings;
      auto queries = index_queries(load_queries(rr_queries));
      auto corpus = load_corpus(rr_corpus, &warnings);
      print_warnings(warnings);
      GroupAssignment group_map;
      if (!rr_groups.empty()) group_map = load_groups(rr_groups);
      auto seqs = load_sequences(rr_sequence);
      auto run = rerank_run(cfg, seqs, queries, corpus.documents, group_map, params);
      write_run(rr_out, run);
      return kOk;
    }
    if (*validate) {
      Warnings warnings;
      auto queries = index_queries(load_queries(va_queries));
      auto records = load_run_records(va_run, &warnings);
      print_warnings(warnings);
      std::optional<SequenceSet> expected;
      if (!va_sequence.empty()) expected = load_sequences(va_sequence);
      auto violations = validate_run(
          records, queries, {expected ? &*expected : nullptr, va_partial});
      if (!report_violations(stem_of(va_run), violations, std::cout)) {
        std::cerr << violations.size() << " violation(s)\n";
        return kValidation;
      }
      std::cout << "ok: " << records.size() << " rankings\n";
      return kOk;
    }
    if (*groups) {
      if (!gr_hindex && gr_thresholds.empty()) {
        std::cerr << "groups: pass --hindex or --thresholds\n";
        return kUsage;
      }
      auto stats = load_author_stats(gr_stats);
      auto assignment = gr_hindex
                            ? group_from_hindex(stats)
                            : group_from_thresholds(
                                  stats, ThresholdBuckets(gr_stat_name, gr_thresholds));
      write_groups(gr_out, assignment);
      return kOk;
    }
    if (*synth) {
      write_synthetic(sy_out, make_synthetic(sy_cfg));
      return kOk;
    }
  } catch (const DataFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataFormat;
  } catch (const ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DegenerateTotalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const ContractError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataFormat;
  }
  return kUsage;
}
