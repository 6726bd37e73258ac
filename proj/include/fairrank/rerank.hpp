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

// Sequence-aware baseline rerankers. Each one plays the system role in the
// evaluation loop: it sees a query and its pool, returns a permutation, and
// may carry state from one query of a sequence to the next.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairrank/core.hpp"
#include "fairrank/io.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/parallel.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

struct ScoredDocument {
  DocumentId id;
  double score = 0.0;
  double predicted = 0.0;  // predicted relevance in [0, 1]
};

struct ScoredPool {
  QueryId qid;
  std::vector<ScoredDocument> documents;  // pool order
};

/// Lower-cased alphanumeric tokens.
inline std::set<std::string> tokenize(std::string_view text) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.insert(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(std::move(cur));
  return out;
}

/// Lexical-overlap scorer: score is the number of distinct query tokens
/// found in the title or abstract; predicted relevance is that count over
/// the number of distinct query tokens.
inline ScoredPool score_pool(const QueryRequest& request,
                             const DocumentMap& docs) {
  const auto query_tokens = tokenize(request.text());
  ScoredPool out{request.qid(), {}};
  out.documents.reserve(request.pool().size());
  for (const auto& id : request.pool()) {
    const Document& doc = lookup_document(docs, id);
    auto doc_tokens = tokenize(doc.title().value_or(""));
    doc_tokens.merge(tokenize(doc.abstract_text().value_or("")));
    double hits = 0.0;
    for (const auto& t : query_tokens) {
      if (doc_tokens.contains(t)) hits += 1.0;
    }
    double predicted =
        query_tokens.empty() ? 0.0 : hits / static_cast<double>(query_tokens.size());
    out.documents.push_back({id, hits, predicted});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stateless rerankers
// ---------------------------------------------------------------------------

/// Uniformly random permutation of the pool.
inline Ranking rerank_random(const QueryRequest& request, Rng& rng) {
  Ranking r{request.qid(), request.pool()};
  rng.shuffle(r.order);
  return r;
}

namespace detail {

/// Higher predicted relevance first, then ascending id.
inline bool utility_order(const ScoredDocument& a, const ScoredDocument& b) {
  if (a.predicted != b.predicted) return a.predicted > b.predicted;
  return a.id < b.id;
}

}  // namespace detail

/// Descending predicted relevance. Sorting by stop probability maximizes
/// expected utility, so this is the utility-optimal ranking under the
/// predictions.
inline Ranking rerank_max_utility(const ScoredPool& scored) {
  auto docs = scored.documents;
  std::sort(docs.begin(), docs.end(), detail::utility_order);
  Ranking r{scored.qid, {}};
  r.order.reserve(docs.size());
  for (auto& d : docs) r.order.push_back(std::move(d.id));
  return r;
}

// ---------------------------------------------------------------------------
// Fairness controller
// ---------------------------------------------------------------------------

/// Memory a reranker carries across one query sequence.
struct RerankerState {
  explicit RerankerState(double lambda = 0.0, std::uint64_t seed = 0)
      : lambda(lambda), rng(seed) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw ContractError("lambda must lie in [0, 1]");
    }
  }

  std::map<GroupId, double> exposure;   // running group exposure
  std::map<GroupId, double> relevance;  // running group relevance
  double lambda;
  Rng rng;
};

namespace detail {

/// Per-group author counts of one document.
inline std::map<GroupId, double> group_counts(const Document& doc,
                                              const GroupAssignment& groups,
                                              bool unknown_as_group) {
  std::map<GroupId, double> out;
  for (const auto& a : doc.authors()) {
    if (const GroupId* g = groups.group_of(a)) {
      out[*g] += 1.0;
    } else if (unknown_as_group) {
      out[unknown_group()] += 1.0;
    }
  }
  return out;
}

/// Unfairness of raw group totals; zero when either total vanishes.
inline double projected_unfairness(const std::map<GroupId, double>& exposure,
                                   const std::map<GroupId, double>& relevance) {
  double te = 0.0, tr = 0.0;
  for (const auto& [g, v] : exposure) te += v;
  for (const auto& [g, v] : relevance) tr += v;
  if (!(te > 0.0) || !(tr > 0.0)) return 0.0;
  double sq = 0.0;
  auto add = [&](double e, double r) {
    double d = e / te - r / tr;
    sq += d * d;
  };
  // Merge over the union of keys.
  auto ei = exposure.begin();
  auto ri = relevance.begin();
  while (ei != exposure.end() || ri != relevance.end()) {
    if (ri == relevance.end() || (ei != exposure.end() && ei->first < ri->first)) {
      add(ei->second, 0.0);
      ++ei;
    } else if (ei == exposure.end() || ri->first < ei->first) {
      add(0.0, ri->second);
      ++ri;
    } else {
      add(ei->second, ri->second);
      ++ei;
      ++ri;
    }
  }
  return std::sqrt(sq);
}

}  // namespace detail

/// Greedy position-by-position construction. At each rank, picks the
/// unplaced document minimizing
///
///   lambda * U(projected shares) - (1 - lambda) * w * p(s|d)
///
/// where U is the unfairness of the running group totals with this query's
/// partial ranking (plus d) folded in, and w * p(s|d) is d's expected
/// utility at this rank. Stop probabilities come from predicted relevance.
/// Ties go to higher predicted relevance, then ascending id, so lambda = 0
/// reproduces rerank_max_utility exactly. The state absorbs the emitted
/// ranking's exposure and the pool's relevance afterwards.
inline Ranking rerank_fairness_controller(const ScoredPool& scored,
                                          RerankerState& state,
                                          const GroupAssignment& groups,
                                          const DocumentMap& docs,
                                          const EvalParams& params) {
  const double lambda = state.lambda;
  const double c = params.stop_coefficient();
  const std::size_t n = scored.documents.size();

  std::vector<std::map<GroupId, double>> counts;
  counts.reserve(n);
  auto relevance = state.relevance;
  std::map<GroupId, double> query_relevance;
  for (const auto& d : scored.documents) {
    counts.push_back(detail::group_counts(lookup_document(docs, d.id), groups,
                                          params.unknown_as_group));
    for (const auto& [g, k] : counts.back()) {
      query_relevance[g] += k * c * d.predicted;
    }
  }
  for (const auto& [g, v] : query_relevance) relevance[g] += v;

  auto exposure = state.exposure;
  std::map<GroupId, double> query_exposure;
  std::vector<bool> placed(n, false);
  Ranking out{scored.qid, {}};
  out.order.reserve(n);
  double w = 1.0;

  for (std::size_t rank = 0; rank < n; ++rank) {
    std::size_t best = n;
    double best_obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const auto& cand = scored.documents[i];
      double fairness_term = 0.0;
      if (lambda > 0.0) {
        auto projected = exposure;
        for (const auto& [g, k] : counts[i]) projected[g] += w * k;
        fairness_term = detail::projected_unfairness(projected, relevance);
      }
      double obj =
          lambda * fairness_term - (1.0 - lambda) * w * c * cand.predicted;
      if (best == n || obj < best_obj ||
          (obj == best_obj &&
           detail::utility_order(cand, scored.documents[best]))) {
        best = i;
        best_obj = obj;
      }
    }
    placed[best] = true;
    const auto& chosen = scored.documents[best];
    for (const auto& [g, k] : counts[best]) {
      exposure[g] += w * k;
      query_exposure[g] += w * k;
    }
    out.order.push_back(chosen.id);
    w *= params.gamma() * (1.0 - c * chosen.predicted);
  }

  for (const auto& [g, v] : query_exposure) state.exposure[g] += v;
  for (const auto& [g, v] : query_relevance) state.relevance[g] += v;
  return out;
}

// ---------------------------------------------------------------------------
// Sequence drivers
// ---------------------------------------------------------------------------

enum class Strategy { Random, MaxUtility, Controller };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Random: return "random";
    case Strategy::MaxUtility: return "maxutil";
    case Strategy::Controller: return "controller";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "random") return Strategy::Random;
  if (s == "maxutil") return Strategy::MaxUtility;
  if (s == "controller") return Strategy::Controller;
  throw ContractError("unknown strategy " + std::string(s));
}

struct RerankConfig {
  Strategy strategy = Strategy::MaxUtility;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

/// Reranks one query sequence in order with a fresh state. Sequence
/// `sequence_id` draws from RNG stream derive_seed(seed, sequence_id).
inline RankingSequence rerank_sequence(const RerankConfig& config,
                                       std::uint64_t sequence_id,
                                       const std::vector<QueryId>& sequence,
                                       const QueryMap& queries,
                                       const DocumentMap& docs,
                                       const GroupAssignment& groups,
                                       const EvalParams& params) {
  RerankerState state(config.lambda, derive_seed(config.seed, sequence_id));
  std::unordered_map<QueryId, ScoredPool, IdHash> scored_cache;
  RankingSequence out(std::to_string(sequence_id));
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    auto it = queries.find(sequence[i]);
    if (it == queries.end()) {
      throw ProtocolError("sequence " + std::to_string(sequence_id) +
                          " position " + std::to_string(i + 1) +
                          ": unknown qid " + sequence[i].str());
    }
    const QueryRequest& request = it->second;
    if (config.strategy == Strategy::Random) {
      out.push_back(rerank_random(request, state.rng));
      continue;
    }
    auto sc = scored_cache.find(request.qid());
    if (sc == scored_cache.end()) {
      sc = scored_cache.emplace(request.qid(), score_pool(request, docs)).first;
    }
    if (config.strategy == Strategy::MaxUtility) {
      out.push_back(rerank_max_utility(sc->second));
    } else {
      out.push_back(
          rerank_fairness_controller(sc->second, state, groups, docs, params));
    }
  }
  return out;
}

/// Reranks every sequence; sequences run in parallel.
inline RunSequences rerank_run(const RerankConfig& config,
                               const SequenceSet& sequences,
                               const QueryMap& queries, const DocumentMap& docs,
                               const GroupAssignment& groups,
                               const EvalParams& params) {
  std::vector<std::pair<std::uint64_t, const std::vector<QueryId>*>> work;
  for (const auto& [id, seq] : sequences) work.emplace_back(id, &seq);
  std::vector<std::optional<RankingSequence>> results(work.size());
  parallel_for(work.size(), [&](std::size_t i) {
    results[i] = rerank_sequence(config, work[i].first, *work[i].second,
                                 queries, docs, groups, params);
  });
  RunSequences out;
  for (std::size_t i = 0; i < work.size(); ++i) {
    out.emplace(work[i].first, std::move(*results[i]));
  }
  return out;
}

}  // namespace fairrank
