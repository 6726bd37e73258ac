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

// File formats.
//
//   corpus   JSON-lines, plain or gzip. One paper per line:
//            {"id", "title", "paperAbstract" | "abstract",
//             "authors": [{"name", "ids": [...]}], ...}
//   queries  JSON-lines: {"qid", "query", "frequency",
//                         "documents": [{"doc_id", "relevance"?}]}
//   groups   CSV with header "author_id,group_id", or JSON-lines with the
//            same two keys.
//   runs     JSON-lines, keys exactly q_num, qid, ranking, in that order.
//            q_num is "<sequence id>.<query number>".
//   sequence CSV "q_num,qid".

#pragma once

#include <zlib.h>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <unistd.h>

#include "fairrank/core.hpp"
#include "fairrank/metrics.hpp"
#include "json.hpp"

namespace fairrank {

using Warnings = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Low-level helpers
// ---------------------------------------------------------------------------

/// Line reader over plain or gzip-compressed files (zlib reads both).
class LineReader {
 public:
  explicit LineReader(const std::string& path)
      : path_(path), file_(gzopen(path.c_str(), "rb")) {
    if (!file_) throw DataFormatError(path + ": cannot open file");
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;
  ~LineReader() {
    if (file_) gzclose(file_);
  }

  /// Next line without its terminator; false at end of file.
  bool next(std::string& line) {
    line.clear();
    char buf[1 << 16];
    bool any = false;
    while (gzgets(file_, buf, sizeof buf) != nullptr) {
      any = true;
      line += buf;
      if (!line.empty() && line.back() == '\n') break;
    }
    int err = 0;
    const char* msg = gzerror(file_, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw DataFormatError(path_ + ":" + std::to_string(line_no_ + 1) +
                            ": read error: " + msg);
    }
    if (!any) return false;
    ++line_no_;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
      line.pop_back();
    }
    return true;
  }

  std::size_t line_number() const noexcept { return line_no_; }
  const std::string& path() const noexcept { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataFormatError(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string path_;
  gzFile file_;
  std::size_t line_no_ = 0;
};

inline bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

inline std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Writes to a temporary sibling and renames it into place.
inline void atomic_write(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataFormatError(path + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataFormatError(path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataFormatError(path + ": rename failed: " + ec.message());
  }
}

namespace detail {

using nlohmann::json;

inline json parse_json_line(const LineReader& in, const std::string& line) {
  try {
    auto j = json::parse(line);
    if (!j.is_object()) in.fail("expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    in.fail(std::string("malformed JSON: ") + e.what());
  }
}

/// Ids may be JSON strings or integers.
inline std::string id_field(const LineReader& in, const json& v,
                            std::string_view what) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.empty()) in.fail(std::string(what) + " is empty");
    return s;
  }
  if (v.is_number_integer()) return v.dump();
  in.fail(std::string(what) + " must be a string or integer");
}

inline const json& required(const LineReader& in, const json& obj,
                            const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    in.fail(std::string("missing field \"") + key + "\"");
  }
  return *it;
}

inline std::optional<std::string> optional_text(const json& obj,
                                                const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct Corpus {
  std::vector<DocumentId> order;  // file order
  DocumentMap documents;
};

/// Loads a corpus. Each author entry contributes its first listed id;
/// entries with several ids or none produce a warning.
inline Corpus load_corpus(const std::string& path, Warnings* warnings = nullptr) {
  LineReader in(path);
  Corpus corpus;
  std::unordered_map<DocumentId, std::size_t, IdHash> first_line;
  std::string line;
  while (in.next(line)) {
    if (is_blank(line)) continue;
    auto j = detail::parse_json_line(in, line);
    DocumentId id(detail::id_field(in, detail::required(in, j, "id"), "id"));
    if (auto it = first_line.find(id); it != first_line.end()) {
      in.fail("duplicate document id " + id.str() + " (first seen on line " +
              std::to_string(it->second) + ")");
    }
    std::vector<AuthorId> authors;
    if (auto a = j.find("authors"); a != j.end() && !a->is_null()) {
      if (!a->is_array()) in.fail("\"authors\" must be an array");
      for (const auto& entry : *a) {
        auto ids = entry.find("ids");
        if (ids == entry.end() || !ids->is_array() || ids->empty()) {
          if (warnings) {
            warnings->push_back(in.path() + ":" +
                                std::to_string(in.line_number()) +
                                ": author without id ignored in " + id.str());
          }
          continue;
        }
        if (ids->size() > 1 && warnings) {
          warnings->push_back(in.path() + ":" +
                              std::to_string(in.line_number()) +
                              ": author with several ids collapsed to the first in " +
                              id.str());
        }
        authors.emplace_back(detail::id_field(in, ids->front(), "author id"));
      }
    }
    auto abstract = detail::optional_text(j, "paperAbstract");
    if (!abstract) abstract = detail::optional_text(j, "abstract");
    try {
      Document doc(id, std::move(authors), detail::optional_text(j, "title"),
                   std::move(abstract));
      first_line.emplace(id, in.line_number());
      corpus.order.push_back(id);
      corpus.documents.emplace(id, std::move(doc));
    } catch (const DataFormatError& e) {
      in.fail(e.what());
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

inline std::vector<QueryRequest> load_queries(const std::string& path) {
  LineReader in(path);
  std::vector<QueryRequest> out;
  std::string line;
  while (in.next(line)) {
    if (is_blank(line)) continue;
    auto j = detail::parse_json_line(in, line);
    QueryId qid(detail::id_field(in, detail::required(in, j, "qid"), "qid"));
    std::string text;
    if (auto q = j.find("query"); q != j.end() && q->is_string()) {
      text = q->get<std::string>();
    }
    const auto& freq = detail::required(in, j, "frequency");
    if (!freq.is_number()) in.fail("\"frequency\" must be a number");
    double frequency = freq.get<double>();
    if (!(frequency >= 0.0)) in.fail("\"frequency\" must be non-negative");

    const auto& docs = detail::required(in, j, "documents");
    if (!docs.is_array()) in.fail("\"documents\" must be an array");
    if (docs.empty()) in.fail("query " + qid.str() + " has an empty pool");
    std::vector<DocumentId> pool;
    RelevanceMap relevance;
    for (const auto& d : docs) {
      if (!d.is_object()) in.fail("pool entries must be objects");
      DocumentId doc(
          detail::id_field(in, detail::required(in, d, "doc_id"), "doc_id"));
      if (auto r = d.find("relevance"); r != d.end() && !r->is_null()) {
        double v = r->is_number() ? r->get<double>() : -1.0;
        if (v != 0.0 && v != 1.0) {
          in.fail("relevance of " + doc.str() + " must be 0 or 1");
        }
        relevance.insert_or_assign(doc, static_cast<Relevance>(v));
      }
      pool.push_back(std::move(doc));
    }
    try {
      out.emplace_back(std::move(qid), std::move(text), frequency,
                       std::move(pool),
                       relevance.empty() ? std::nullopt
                                         : std::optional(std::move(relevance)));
    } catch (const DataFormatError& e) {
      in.fail(e.what());
    }
  }
  return out;
}

inline QueryMap index_queries(std::vector<QueryRequest> queries) {
  QueryMap map;
  for (auto& q : queries) {
    auto qid = q.qid();
    if (!map.emplace(qid, std::move(q)).second) {
      throw DataFormatError("duplicate query id " + qid.str());
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    out.emplace_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline void add_group_row(const LineReader& in, GroupAssignment& groups,
                          std::string author, std::string group) {
  if (author.empty()) in.fail("empty author id");
  if (group.empty()) in.fail("empty group id");
  AuthorId a(std::move(author));
  GroupId g(std::move(group));
  if (const GroupId* existing = groups.group_of(a)) {
    if (*existing == g) return;  // repeated row
    in.fail("author " + a.str() + " assigned to both " + existing->str() +
            " and " + g.str());
  }
  groups.assign(std::move(a), std::move(g));
}

}  // namespace detail

/// Loads an author -> group file. Repeated identical rows are merged;
/// conflicting rows are an error.
inline GroupAssignment load_groups(const std::string& path) {
  LineReader in(path);
  GroupAssignment groups;
  std::string line;
  bool header_seen = false;
  bool json_lines = false;
  while (in.next(line)) {
    if (is_blank(line)) continue;
    auto t = trim(line);
    if (!header_seen) {
      header_seen = true;
      if (t.front() == '{') {
        json_lines = true;
      } else {
        auto cols = detail::split_csv(t);
        if (cols.size() != 2 || cols[0] != "author_id" ||
            cols[1] != "group_id") {
          in.fail("expected header \"author_id,group_id\"");
        }
        continue;
      }
    }
    if (json_lines) {
      auto j = detail::parse_json_line(in, line);
      detail::add_group_row(
          in, groups,
          detail::id_field(in, detail::required(in, j, "author_id"), "author_id"),
          detail::id_field(in, detail::required(in, j, "group_id"), "group_id"));
    } else {
      auto cols = detail::split_csv(t);
      if (cols.size() != 2) in.fail("expected two columns");
      detail::add_group_row(in, groups, std::move(cols[0]), std::move(cols[1]));
    }
  }
  return groups;
}

inline std::string format_groups_csv(const GroupAssignment& groups) {
  std::map<std::string, std::string> sorted;
  for (const auto& [a, g] : groups.mapping()) sorted.emplace(a.str(), g.str());
  std::string out = "author_id,group_id\n";
  for (const auto& [a, g] : sorted) out += a + "," + g + "\n";
  return out;
}

inline void write_groups(const std::string& path, const GroupAssignment& groups) {
  atomic_write(path, format_groups_csv(groups));
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct QueryNumber {
  std::uint64_t sequence = 0;
  std::uint64_t number = 0;

  std::string str() const {
    return std::to_string(sequence) + "." + std::to_string(number);
  }
  friend auto operator<=>(const QueryNumber&, const QueryNumber&) = default;
};

inline std::optional<QueryNumber> parse_q_num(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  QueryNumber q;
  if (!detail::parse_u64(s.substr(0, dot), q.sequence) ||
      !detail::parse_u64(s.substr(dot + 1), q.number)) {
    return std::nullopt;
  }
  return q;
}

struct RunRecord {
  QueryNumber q_num;
  QueryId qid;
  std::vector<DocumentId> ranking;
};

/// Canonical serialization of one record, without the newline.
inline std::string format_run_record(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["q_num"] = r.q_num.str();
  j["qid"] = r.qid.str();
  auto& arr = j["ranking"] = nlohmann::ordered_json::array();
  for (const auto& d : r.ranking) arr.push_back(d.str());
  return j.dump();
}

/// Parses run records. Duplicate or decreasing query numbers within a
/// sequence are errors; gaps only warn.
inline std::vector<RunRecord> load_run_records(const std::string& path,
                                               Warnings* warnings = nullptr) {
  LineReader in(path);
  std::vector<RunRecord> out;
  std::map<std::uint64_t, std::pair<std::uint64_t, std::size_t>> last;
  std::string line;
  while (in.next(line)) {
    if (is_blank(line)) continue;
    auto j = detail::parse_json_line(in, line);
    const auto& qn = detail::required(in, j, "q_num");
    if (!qn.is_string()) in.fail("\"q_num\" must be a string");
    auto q_num = parse_q_num(qn.get<std::string>());
    if (!q_num) {
      in.fail("cannot parse q_num \"" + qn.get<std::string>() +
              "\"; expected <sequence>.<number>");
    }
    QueryId qid(detail::id_field(in, detail::required(in, j, "qid"), "qid"));
    const auto& rk = detail::required(in, j, "ranking");
    if (!rk.is_array()) in.fail("\"ranking\" must be an array");
    std::vector<DocumentId> ranking;
    for (const auto& d : rk) {
      ranking.emplace_back(detail::id_field(in, d, "document id"));
    }

    auto [it, fresh] = last.try_emplace(q_num->sequence, q_num->number,
                                        in.line_number());
    if (!fresh) {
      auto [prev, prev_line] = it->second;
      if (q_num->number == prev) {
        in.fail("duplicate q_num " + q_num->str() + " (first on line " +
                std::to_string(prev_line) + ")");
      }
      if (q_num->number < prev) {
        in.fail("q_num " + q_num->str() + " is not increasing within sequence " +
                std::to_string(q_num->sequence));
      }
      if (q_num->number != prev + 1 && warnings) {
        warnings->push_back(in.path() + ":" + std::to_string(in.line_number()) +
                            ": gap in sequence " +
                            std::to_string(q_num->sequence) + " before " +
                            q_num->str());
      }
      it->second = {q_num->number, in.line_number()};
    }
    out.push_back({*q_num, std::move(qid), std::move(ranking)});
  }
  return out;
}

/// Groups records into one RankingSequence per sequence id, in query-number
/// order.
inline RunSequences to_sequences(const std::vector<RunRecord>& records) {
  std::map<std::uint64_t, std::vector<const RunRecord*>> by_seq;
  for (const auto& r : records) by_seq[r.q_num.sequence].push_back(&r);
  RunSequences out;
  for (auto& [id, recs] : by_seq) {
    std::stable_sort(recs.begin(), recs.end(), [](auto* a, auto* b) {
      return a->q_num.number < b->q_num.number;
    });
    RankingSequence seq(std::to_string(id));
    for (const auto* r : recs) seq.push_back(Ranking{r->qid, r->ranking});
    out.emplace(id, std::move(seq));
  }
  return out;
}

inline RunSequences load_run(const std::string& path,
                             Warnings* warnings = nullptr) {
  return to_sequences(load_run_records(path, warnings));
}

/// Records for a set of sequences; query numbers are the 1-based positions.
inline std::vector<RunRecord> to_records(const RunSequences& run) {
  std::vector<RunRecord> out;
  for (const auto& [id, seq] : run) {
    for (const auto& e : seq.entries()) {
      out.push_back({{id, e.position}, e.ranking.qid, e.ranking.order});
    }
  }
  return out;
}

inline std::string format_run(const std::vector<RunRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += format_run_record(r);
    out += '\n';
  }
  return out;
}

inline void write_run(const std::string& path,
                      const std::vector<RunRecord>& records) {
  atomic_write(path, format_run(records));
}

inline void write_run(const std::string& path, const RunSequences& run) {
  write_run(path, to_records(run));
}

// ---------------------------------------------------------------------------
// Query sequence files
// ---------------------------------------------------------------------------

using SequenceSet = std::map<std::uint64_t, std::vector<QueryId>>;

inline std::string format_sequences(const SequenceSet& seqs) {
  std::string out = "q_num,qid\n";
  for (const auto& [id, qids] : seqs) {
    for (std::size_t i = 0; i < qids.size(); ++i) {
      out += QueryNumber{id, i + 1}.str();
      out += ',';
      out += qids[i].str();
      out += '\n';
    }
  }
  return out;
}

inline void write_sequences(const std::string& path, const SequenceSet& seqs) {
  atomic_write(path, format_sequences(seqs));
}

/// Loads a sequence file. Query numbers must run 1..N in order within each
/// sequence.
inline SequenceSet load_sequences(const std::string& path) {
  LineReader in(path);
  SequenceSet out;
  std::string line;
  bool header = false;
  while (in.next(line)) {
    if (is_blank(line)) continue;
    auto cols = detail::split_csv(line);
    if (!header) {
      header = true;
      if (cols.size() != 2 || cols[0] != "q_num" || cols[1] != "qid") {
        in.fail("expected header \"q_num,qid\"");
      }
      continue;
    }
    if (cols.size() != 2) in.fail("expected two columns");
    auto q = parse_q_num(cols[0]);
    if (!q) in.fail("cannot parse q_num \"" + cols[0] + "\"");
    if (cols[1].empty()) in.fail("empty qid");
    auto& seq = out[q->sequence];
    if (q->number != seq.size() + 1) {
      in.fail("q_num " + q->str() + " out of order; expected " +
              QueryNumber{q->sequence, seq.size() + 1}.str());
    }
    seq.emplace_back(std::move(cols[1]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string where;  // q_num or "sequence S"
  std::string message;
};

struct ValidationOptions {
  const SequenceSet* expected = nullptr;  // query sequences the run answers
  bool allow_partial = false;             // omitted q_nums are not violations
};

/// Lists everything that makes a run inadmissible. Empty means valid.
inline std::vector<Violation> validate_run(const std::vector<RunRecord>& records,
                                           const QueryMap& queries,
                                           const ValidationOptions& opts = {}) {
  std::vector<Violation> out;
  std::set<QueryNumber> present;
  for (const auto& r : records) {
    const std::string where = r.q_num.str();
    present.insert(r.q_num);
    auto it = queries.find(r.qid);
    if (it == queries.end()) {
      out.push_back({where, "unknown qid " + r.qid.str()});
    } else {
      for (auto& m : permutation_violations(Ranking{r.qid, r.ranking},
                                            it->second)) {
        out.push_back({where, std::move(m)});
      }
    }
    if (opts.expected) {
      auto seq = opts.expected->find(r.q_num.sequence);
      if (seq == opts.expected->end()) {
        out.push_back({where, "sequence " + std::to_string(r.q_num.sequence) +
                                  " is not in the query sequence file"});
      } else if (r.q_num.number == 0 || r.q_num.number > seq->second.size()) {
        out.push_back({where, "query number beyond the end of the sequence"});
      } else if (seq->second[r.q_num.number - 1] != r.qid) {
        out.push_back({where, "expected qid " +
                                  seq->second[r.q_num.number - 1].str() +
                                  ", got " + r.qid.str()});
      }
    }
  }
  if (opts.expected && !opts.allow_partial) {
    for (const auto& [id, qids] : *opts.expected) {
      for (std::size_t i = 0; i < qids.size(); ++i) {
        QueryNumber q{id, i + 1};
        if (!present.contains(q)) {
          out.push_back({q.str(), "missing ranking for qid " + qids[i].str()});
        }
      }
    }
  }
  return out;
}

inline std::vector<Violation> validate_run(const RunSequences& run,
                                           const QueryMap& queries,
                                           const ValidationOptions& opts = {}) {
  return validate_run(to_records(run), queries, opts);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct ReportRow {
  std::string run;
  std::string group_def;
  RunEvaluation evaluation;
};

inline std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

/// CSV with columns run,utility,unfairness,mode,group_def. Undefined
/// unfairness is written as "undefined".
inline std::string format_report_csv(const std::vector<ReportRow>& rows,
                                     const EvalParams& params) {
  std::string out = "run,utility,unfairness,mode,group_def\n";
  for (const auto& r : rows) {
    out += r.run + "," + format_metric(r.evaluation.mean_utility) + ",";
    out += r.evaluation.unfairness ? format_metric(*r.evaluation.unfairness)
                                   : std::string("undefined");
    out += ",";
    out += to_string(params.amortization());
    out += "," + r.group_def + "\n";
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json group_values_json(const GroupValues& v) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [g, x] : v) j[g.str()] = x;
  return j;
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json report_json(const std::vector<ReportRow>& rows,
                                          const EvalParams& params) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["params"] = {
      {"gamma", params.gamma()},
      {"stop_coefficient", params.stop_coefficient()},
      {"amortization", std::string(to_string(params.amortization()))},
      {"macro_aggregation", "unweighted mean over distinct queries"},
      {"sequence_aggregation", "unweighted mean over sequences"},
      {"ungrouped_authors", params.unknown_as_group ? "own group" : "excluded"},
  };
  ojson results = ojson::array();
  for (const auto& r : rows) {
    ojson row;
    row["run"] = r.run;
    row["group_def"] = r.group_def;
    row["utility"] = r.evaluation.mean_utility;
    row["unfairness"] = detail::optional_json(r.evaluation.unfairness);
    row["rankings_evaluated"] = r.evaluation.rankings_evaluated;
    if (!r.evaluation.unfairness) {
      row["undefined_reason"] = r.evaluation.undefined_reason;
    }
    ojson seqs = ojson::array();
    for (const auto& [id, ev] : r.evaluation.sequences) {
      ojson s;
      s["sequence"] = id;
      s["utility"] = ev.mean_utility;
      s["unfairness"] = detail::optional_json(ev.unfairness);
      s["rankings_evaluated"] = ev.rankings_evaluated;
      s["exposure_share"] = detail::group_values_json(ev.exposure_share);
      s["relevance_share"] = detail::group_values_json(ev.relevance_share);
      s["deviation"] = detail::group_values_json(ev.deviation);
      if (!ev.unfairness) s["undefined_reason"] = ev.undefined_reason;
      if (ev.mode == Amortization::Macro) {
        ojson pq = ojson::array();
        for (const auto& q : ev.per_query) {
          pq.push_back({{"qid", q.qid.str()},
                        {"unfairness", detail::optional_json(q.unfairness)}});
        }
        s["per_query"] = std::move(pq);
      }
      seqs.push_back(std::move(s));
    }
    row["sequences"] = std::move(seqs);
    results.push_back(std::move(row));
  }
  j["results"] = std::move(results);
  return j;
}

inline void write_reports(const std::string& csv_path,
                          const std::string& json_path,
                          const std::vector<ReportRow>& rows,
                          const EvalParams& params) {
  atomic_write(csv_path, format_report_csv(rows, params));
  atomic_write(json_path, report_json(rows, params).dump(2) + "\n");
}

}  // namespace fairrank
