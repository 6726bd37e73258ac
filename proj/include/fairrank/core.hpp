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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace fairrank {

// ---------------------------------------------------------------------------
// Errors. Each class maps onto one CLI exit code (see tools/fairrank.cpp).
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file, bad field, duplicate key.
struct DataFormatError : Error {
  using Error::Error;
};

/// Well-formed data that violates the evaluation protocol: unknown qid,
/// non-permutation ranking, qid mismatch, missing relevance.
struct ProtocolError : Error {
  using Error::Error;
};

/// Zero total exposure or zero total relevance; fairness shares undefined.
struct DegenerateTotalError : Error {
  using Error::Error;
};

/// Caller broke a precondition that the types could not express.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// Opaque, non-empty string identifier. The tag makes document, author,
/// query and group ids distinct types; contents are never parsed.
template <typename Tag>
class Id {
 public:
  Id() = delete;
  explicit Id(std::string value) : value_(std::move(value)) {
    if (value_.empty()) {
      throw ContractError(std::string(Tag::kName) + " must be non-empty");
    }
  }

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Id&, const Id&) = default;
  friend auto operator<=>(const Id&, const Id&) = default;

 private:
  std::string value_;
};

struct DocumentTag {
  static constexpr const char* kName = "document id";
};
struct AuthorTag {
  static constexpr const char* kName = "author id";
};
struct QueryTag {
  static constexpr const char* kName = "query id";
};
struct GroupTag {
  static constexpr const char* kName = "group id";
};

using DocumentId = Id<DocumentTag>;
using AuthorId = Id<AuthorTag>;
using QueryId = Id<QueryTag>;
using GroupId = Id<GroupTag>;

struct IdHash {
  template <typename Tag>
  std::size_t operator()(const Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

/// Binary relevance label. Stored as an integer so the stop-probability
/// transform can later take graded labels.
using Relevance = int;

// ---------------------------------------------------------------------------
// Documents and queries
// ---------------------------------------------------------------------------

class Document {
 public:
  explicit Document(DocumentId id, std::vector<AuthorId> authors = {},
                    std::optional<std::string> title = std::nullopt,
                    std::optional<std::string> abstract_text = std::nullopt)
      : id_(std::move(id)),
        authors_(std::move(authors)),
        title_(std::move(title)),
        abstract_(std::move(abstract_text)) {
    std::unordered_set<AuthorId, IdHash> seen;
    for (const auto& a : authors_) {
      if (!seen.insert(a).second) {
        throw DataFormatError("document " + id_.str() +
                              " lists author " + a.str() + " twice");
      }
    }
  }

  const DocumentId& id() const noexcept { return id_; }
  const std::vector<AuthorId>& authors() const noexcept { return authors_; }
  const std::optional<std::string>& title() const noexcept { return title_; }
  const std::optional<std::string>& abstract_text() const noexcept {
    return abstract_;
  }

 private:
  DocumentId id_;
  std::vector<AuthorId> authors_;
  std::optional<std::string> title_;
  std::optional<std::string> abstract_;
};

using DocumentMap = std::unordered_map<DocumentId, Document, IdHash>;
using RelevanceMap = std::unordered_map<DocumentId, Relevance, IdHash>;

/// A query together with the pool of documents a system must permute.
/// The pool keeps file order so that seeded rerankers are reproducible.
class QueryRequest {
 public:
  QueryRequest(QueryId qid, std::string text, double frequency,
               std::vector<DocumentId> pool,
               std::optional<RelevanceMap> relevance = std::nullopt)
      : qid_(std::move(qid)),
        text_(std::move(text)),
        frequency_(frequency),
        pool_(std::move(pool)),
        relevance_(std::move(relevance)) {
    if (pool_.empty()) {
      throw DataFormatError("query " + qid_.str() + " has an empty pool");
    }
    if (!(frequency_ >= 0.0)) {
      throw DataFormatError("query " + qid_.str() +
                            " has a negative frequency");
    }
    for (const auto& d : pool_) {
      if (!pool_set_.insert(d).second) {
        throw DataFormatError("query " + qid_.str() + " lists document " +
                              d.str() + " twice in its pool");
      }
    }
    if (relevance_) {
      for (const auto& [doc, rel] : *relevance_) {
        if (!pool_set_.contains(doc)) {
          throw DataFormatError("query " + qid_.str() +
                                " has relevance for document " + doc.str() +
                                " outside its pool");
        }
        if (rel != 0 && rel != 1) {
          throw DataFormatError("query " + qid_.str() + " document " +
                                doc.str() + ": relevance must be 0 or 1");
        }
      }
    }
  }

  const QueryId& qid() const noexcept { return qid_; }
  const std::string& text() const noexcept { return text_; }
  double frequency() const noexcept { return frequency_; }
  const std::vector<DocumentId>& pool() const noexcept { return pool_; }
  bool in_pool(const DocumentId& d) const { return pool_set_.contains(d); }
  const std::optional<RelevanceMap>& relevance() const noexcept {
    return relevance_;
  }

  /// Label of `d`; throws ProtocolError when the query carries no label for it.
  Relevance relevance_of(const DocumentId& d) const {
    if (!relevance_) {
      throw ProtocolError("query " + qid_.str() + " has no relevance labels");
    }
    auto it = relevance_->find(d);
    if (it == relevance_->end()) {
      throw ProtocolError("query " + qid_.str() + " has no relevance for " +
                          d.str());
    }
    return it->second;
  }

 private:
  QueryId qid_;
  std::string text_;
  double frequency_;
  std::vector<DocumentId> pool_;
  std::unordered_set<DocumentId, IdHash> pool_set_;
  std::optional<RelevanceMap> relevance_;
};

using QueryMap = std::unordered_map<QueryId, QueryRequest, IdHash>;

// ---------------------------------------------------------------------------
// Rankings
// ---------------------------------------------------------------------------

struct Ranking {
  QueryId qid;
  std::vector<DocumentId> order;
};

/// Human-readable reasons why `ranking` is not an exact permutation of the
/// request's pool. Empty means admissible.
inline std::vector<std::string> permutation_violations(
    const Ranking& ranking, const QueryRequest& request) {
  std::vector<std::string> out;
  if (ranking.qid != request.qid()) {
    out.push_back("ranking qid " + ranking.qid.str() +
                  " does not match request " + request.qid().str());
  }
  if (ranking.order.empty()) {
    out.push_back("empty ranking");
    return out;
  }
  std::unordered_set<DocumentId, IdHash> seen;
  for (const auto& d : ranking.order) {
    if (!request.in_pool(d)) {
      out.push_back("document " + d.str() + " is not in the pool");
    } else if (!seen.insert(d).second) {
      out.push_back("document " + d.str() + " appears more than once");
    }
  }
  for (const auto& d : request.pool()) {
    if (!seen.contains(d)) {
      out.push_back("pool document " + d.str() + " is missing");
    }
  }
  return out;
}

inline void check_permutation(const Ranking& ranking,
                              const QueryRequest& request) {
  auto v = permutation_violations(ranking, request);
  if (!v.empty()) {
    throw ProtocolError("invalid ranking for query " + request.qid().str() +
                        ": " + v.front());
  }
}

struct SequenceEntry {
  std::size_t position;  // 1-based
  Ranking ranking;
};

/// The rankings a system produced for one query sequence, in order.
class RankingSequence {
 public:
  RankingSequence() = default;
  explicit RankingSequence(std::string sequence_id)
      : sequence_id_(std::move(sequence_id)) {}

  void push_back(Ranking r) {
    entries_.push_back({entries_.size() + 1, std::move(r)});
  }

  const std::string& sequence_id() const noexcept { return sequence_id_; }
  const std::vector<SequenceEntry>& entries() const noexcept {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::string sequence_id_;
  std::vector<SequenceEntry> entries_;
};

/// A run file's sequences, keyed by numeric sequence id.
using RunSequences = std::map<std::uint64_t, RankingSequence>;

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

/// Total map from author to exactly one group.
class GroupAssignment {
 public:
  GroupAssignment() = default;

  /// Declares a group with no members yet.
  void add_group(GroupId g) { universe_.insert(std::move(g)); }

  /// Throws DataFormatError if `a` is already assigned (even to `g`).
  void assign(AuthorId a, GroupId g) {
    if (auto it = groups_.find(a); it != groups_.end()) {
      throw DataFormatError("author " + a.str() +
                            " already assigned to group " + it->second.str());
    }
    universe_.insert(g);
    groups_.emplace(std::move(a), std::move(g));
  }

  const GroupId* group_of(const AuthorId& a) const {
    auto it = groups_.find(a);
    return it == groups_.end() ? nullptr : &it->second;
  }

  /// Sorted group universe.
  const std::set<GroupId>& universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return groups_.size(); }
  const std::unordered_map<AuthorId, GroupId, IdHash>& mapping() const {
    return groups_;
  }

 private:
  std::unordered_map<AuthorId, GroupId, IdHash> groups_;
  std::set<GroupId> universe_;
};

// ---------------------------------------------------------------------------
// Parameters and results
// ---------------------------------------------------------------------------

enum class Amortization { Micro, Macro };

inline std::string_view to_string(Amortization a) {
  return a == Amortization::Micro ? "micro" : "macro";
}

inline Amortization parse_amortization(std::string_view s) {
  if (s == "micro") return Amortization::Micro;
  if (s == "macro") return Amortization::Macro;
  throw ContractError("amortization must be micro or macro");
}

class EvalParams {
 public:
  static constexpr double kDefaultGamma = 0.5;
  static constexpr double kDefaultStopCoefficient = 0.7;

  EvalParams() = default;
  EvalParams(double gamma, double stop_coefficient,
             Amortization amortization = Amortization::Micro)
      : gamma_(gamma),
        stop_coefficient_(stop_coefficient),
        amortization_(amortization) {
    if (!(gamma_ >= 0.0 && gamma_ < 1.0)) {
      throw ContractError("gamma must lie in [0, 1)");
    }
    if (!(stop_coefficient_ >= 0.0 && stop_coefficient_ <= 1.0)) {
      throw ContractError("stop coefficient must lie in [0, 1]");
    }
  }

  double gamma() const noexcept { return gamma_; }
  double stop_coefficient() const noexcept { return stop_coefficient_; }
  Amortization amortization() const noexcept { return amortization_; }

  /// Unknown (ungrouped) authors collected into a synthetic group instead
  /// of being dropped from the totals.
  bool unknown_as_group = false;

 private:
  double gamma_ = kDefaultGamma;
  double stop_coefficient_ = kDefaultStopCoefficient;
  Amortization amortization_ = Amortization::Micro;
};

using GroupValues = std::map<GroupId, double>;

struct QueryUnfairness {
  QueryId qid;
  std::optional<double> unfairness;  // nullopt: degenerate totals
};

struct EvalResult {
  GroupValues exposure_share;   // delta_g
  GroupValues relevance_share;  // Gamma_g
  GroupValues deviation;        // delta_g - Gamma_g
  /// nullopt when totals are degenerate; never NaN.
  std::optional<double> unfairness;
  double mean_utility = 0.0;
  std::size_t rankings_evaluated = 0;
  Amortization mode = Amortization::Micro;
  /// Macro mode only: one entry per distinct query, in first-seen order.
  std::vector<QueryUnfairness> per_query;
  std::string undefined_reason;
};

}  // namespace fairrank
