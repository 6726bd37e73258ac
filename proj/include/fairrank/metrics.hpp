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

// Exposure and utility under a cascade browsing model, amortized over a
// sequence of rankings, and the group-fairness measures built on them.
//
// Browsing model: the user examines rank 1. After examining document d they
// stop (satisfied) with probability p(s|d) = c * r_d; otherwise they move on
// to the next rank with probability gamma. The examination weight of rank i
// is therefore
//
//   w_i = gamma^(i-1) * prod_{j<i} (1 - p(s|pi_j)),
//
// an author's exposure in one ranking is the sum of w_i over ranks holding
// one of their documents, and ranking utility is sum_i w_i * p(s|pi_i).
// There is no rank after the last one, but the last rank keeps its weight.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairrank/core.hpp"
#include "fairrank/parallel.hpp"

namespace fairrank {

/// Neumaier-compensated running sum. Keeps amortized totals over long
/// sequences independent of magnitude drift.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

using AuthorValues = std::map<AuthorId, double>;

inline const Document& lookup_document(const DocumentMap& docs,
                                       const DocumentId& id) {
  auto it = docs.find(id);
  if (it == docs.end()) {
    throw DataFormatError("missing document metadata for " + id.str());
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Browsing model
// ---------------------------------------------------------------------------

inline double stop_probability(Relevance relevance, const EvalParams& params) {
  if (relevance != 0 && relevance != 1) {
    throw ContractError("relevance must be 0 or 1");
  }
  return params.stop_coefficient() * relevance;
}

/// Probability that rank `position` (1-based) is examined, given the stop
/// probabilities of the documents above it.
inline double examination_weight(std::size_t position,
                                 std::span<const double> prefix_stop_probs,
                                 const EvalParams& params) {
  if (position == 0 || prefix_stop_probs.size() != position - 1) {
    throw ContractError("examination_weight needs position-1 stop probabilities");
  }
  double w = 1.0;
  for (double p : prefix_stop_probs) w *= params.gamma() * (1.0 - p);
  return w;
}

/// Examination weights for every rank of a list with the given stop
/// probabilities.
inline std::vector<double> examination_weights(std::span<const double> stop_probs,
                                               double gamma) {
  std::vector<double> w(stop_probs.size());
  double running = 1.0;
  for (std::size_t i = 0; i < stop_probs.size(); ++i) {
    w[i] = running;
    running *= gamma * (1.0 - stop_probs[i]);
  }
  return w;
}

inline std::vector<double> stop_probabilities(std::span<const DocumentId> order,
                                              const QueryRequest& request,
                                              const EvalParams& params) {
  std::vector<double> p;
  p.reserve(order.size());
  for (const auto& d : order) {
    p.push_back(stop_probability(request.relevance_of(d), params));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Single-ranking quantities
// ---------------------------------------------------------------------------

/// Author exposure in one ranking. A document counts toward every one of
/// its authors; authors of no ranked document are absent.
inline AuthorValues ranking_exposure(const Ranking& ranking,
                                     const DocumentMap& docs,
                                     const QueryRequest& request,
                                     const EvalParams& params) {
  auto probs = stop_probabilities(ranking.order, request, params);
  auto weights = examination_weights(probs, params.gamma());
  AuthorValues out;
  for (std::size_t i = 0; i < ranking.order.size(); ++i) {
    for (const auto& a : lookup_document(docs, ranking.order[i]).authors()) {
      out[a] += weights[i];
    }
  }
  return out;
}

/// Author relevance for a query: sum of p(s|d) over the author's documents
/// in the query's pool. Independent of ranking order.
inline AuthorValues author_relevance(const QueryRequest& request,
                                     const DocumentMap& docs,
                                     const EvalParams& params) {
  AuthorValues out;
  for (const auto& d : request.pool()) {
    double p = stop_probability(request.relevance_of(d), params);
    for (const auto& a : lookup_document(docs, d).authors()) out[a] += p;
  }
  return out;
}

inline double ranking_utility(const Ranking& ranking,
                              const QueryRequest& request,
                              const EvalParams& params) {
  auto probs = stop_probabilities(ranking.order, request, params);
  auto weights = examination_weights(probs, params.gamma());
  double u = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) u += weights[i] * probs[i];
  return u;
}

// ---------------------------------------------------------------------------
// Amortization
// ---------------------------------------------------------------------------

/// Amortized author exposure and relevance over the rankings folded so far.
class ExposureAccumulator {
 public:
  void fold(const Ranking& ranking, const QueryRequest& request,
            const DocumentMap& docs, const EvalParams& params) {
    if (ranking.qid != request.qid()) {
      throw ProtocolError("ranking for " + ranking.qid.str() +
                          " folded against request " + request.qid().str());
    }
    check_permutation(ranking, request);
    // Compute both before touching state so a failure leaves *this intact.
    auto e = ranking_exposure(ranking, docs, request, params);
    auto r = author_relevance(request, docs, params);
    for (const auto& [a, v] : e) exposure_[a].add(v);
    for (const auto& [a, v] : r) relevance_[a].add(v);
    ++rankings_seen_;
  }

  AuthorValues exposure() const { return flatten(exposure_); }
  AuthorValues relevance() const { return flatten(relevance_); }
  std::size_t rankings_seen() const noexcept { return rankings_seen_; }

 private:
  static AuthorValues flatten(const std::map<AuthorId, CompensatedSum>& m) {
    AuthorValues out;
    for (const auto& [a, s] : m) out.emplace(a, s.value());
    return out;
  }

  std::map<AuthorId, CompensatedSum> exposure_;
  std::map<AuthorId, CompensatedSum> relevance_;
  std::size_t rankings_seen_ = 0;
};

inline ExposureAccumulator fold_ranking(ExposureAccumulator acc,
                                        const Ranking& ranking,
                                        const QueryRequest& request,
                                        const DocumentMap& docs,
                                        const EvalParams& params) {
  acc.fold(ranking, request, docs, params);
  return acc;
}

// ---------------------------------------------------------------------------
// Group fairness
// ---------------------------------------------------------------------------

inline const GroupId& unknown_group() {
  static const GroupId g{"(unknown)"};
  return g;
}

struct GroupShares {
  GroupValues exposure;   // delta_g
  GroupValues relevance;  // Gamma_g
};

/// Group exposure and relevance shares. Every group in the universe gets an
/// entry. Authors without a group are dropped from numerators and totals
/// unless `unknown_as_group`, in which case they form one extra group.
inline GroupShares group_shares(const AuthorValues& exposure,
                                const AuthorValues& relevance,
                                const GroupAssignment& groups,
                                bool unknown_as_group = false) {
  std::map<GroupId, CompensatedSum> e_sum, r_sum;
  for (const auto& g : groups.universe()) {
    e_sum[g];
    r_sum[g];
  }
  if (unknown_as_group) {
    e_sum[unknown_group()];
    r_sum[unknown_group()];
  }
  auto accumulate = [&](const AuthorValues& values,
                        std::map<GroupId, CompensatedSum>& sums) {
    for (const auto& [a, v] : values) {
      if (const GroupId* g = groups.group_of(a)) {
        sums[*g].add(v);
      } else if (unknown_as_group) {
        sums[unknown_group()].add(v);
      }
    }
  };
  accumulate(exposure, e_sum);
  accumulate(relevance, r_sum);

  auto normalize = [](const std::map<GroupId, CompensatedSum>& sums,
                      const char* what) {
    CompensatedSum total;
    for (const auto& [g, s] : sums) total.add(s.value());
    if (!(total.value() > 0.0)) {
      throw DegenerateTotalError(std::string("total grouped ") + what +
                                 " is zero");
    }
    GroupValues out;
    for (const auto& [g, s] : sums) out.emplace(g, s.value() / total.value());
    return out;
  };
  return {normalize(e_sum, "exposure"), normalize(r_sum, "relevance")};
}

inline GroupShares group_shares(const ExposureAccumulator& acc,
                                const GroupAssignment& groups,
                                bool unknown_as_group = false) {
  return group_shares(acc.exposure(), acc.relevance(), groups,
                      unknown_as_group);
}

inline GroupValues deviations(const GroupValues& exposure_share,
                              const GroupValues& relevance_share) {
  if (exposure_share.size() != relevance_share.size()) {
    throw ContractError("exposure and relevance shares cover different groups");
  }
  GroupValues out;
  auto r = relevance_share.begin();
  for (const auto& [g, e] : exposure_share) {
    if (r->first != g) {
      throw ContractError("exposure and relevance shares cover different groups");
    }
    out.emplace(g, e - r->second);
    ++r;
  }
  return out;
}

/// L2 norm of the per-group gap between exposure share and relevance share.
inline double unfairness(const GroupValues& exposure_share,
                         const GroupValues& relevance_share) {
  double sq = 0.0;
  for (const auto& [g, d] : deviations(exposure_share, relevance_share)) {
    sq += d * d;
  }
  return std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// Evaluation driver
// ---------------------------------------------------------------------------

namespace detail {

inline std::string at_position(const RankingSequence& run, std::size_t pos) {
  std::string s = "sequence ";
  s += run.sequence_id().empty() ? "?" : run.sequence_id();
  s += " position " + std::to_string(pos) + ": ";
  return s;
}

}  // namespace detail

/// Evaluates one ranking sequence. Micro mode amortizes over the whole
/// sequence. Macro mode amortizes per distinct query and averages those
/// unfairness values unweighted; in that mode the group maps still describe
/// the whole sequence. Utility is the plain mean over rankings in both modes.
inline EvalResult evaluate_run(const RankingSequence& run,
                               const QueryMap& queries,
                               const DocumentMap& docs,
                               const GroupAssignment& groups,
                               const EvalParams& params) {
  const bool macro = params.amortization() == Amortization::Macro;
  EvalResult result;
  result.mode = params.amortization();

  ExposureAccumulator total;
  CompensatedSum utility;
  std::vector<QueryId> query_order;
  std::unordered_map<QueryId, ExposureAccumulator, IdHash> per_query;

  for (const auto& entry : run.entries()) {
    try {
      auto it = queries.find(entry.ranking.qid);
      if (it == queries.end()) {
        throw ProtocolError("unknown qid " + entry.ranking.qid.str());
      }
      const QueryRequest& request = it->second;
      total.fold(entry.ranking, request, docs, params);
      utility.add(ranking_utility(entry.ranking, request, params));
      if (macro) {
        auto [slot, inserted] =
            per_query.try_emplace(request.qid(), ExposureAccumulator{});
        if (inserted) query_order.push_back(request.qid());
        slot->second.fold(entry.ranking, request, docs, params);
      }
    } catch (const ProtocolError& e) {
      throw ProtocolError(detail::at_position(run, entry.position) + e.what());
    } catch (const DataFormatError& e) {
      throw DataFormatError(detail::at_position(run, entry.position) +
                            e.what());
    }
  }

  result.rankings_evaluated = total.rankings_seen();
  if (run.empty()) {
    result.undefined_reason = "empty sequence";
    return result;
  }
  result.mean_utility =
      utility.value() / static_cast<double>(result.rankings_evaluated);

  try {
    auto shares = group_shares(total, groups, params.unknown_as_group);
    result.deviation = deviations(shares.exposure, shares.relevance);
    result.exposure_share = std::move(shares.exposure);
    result.relevance_share = std::move(shares.relevance);
    if (!macro) {
      result.unfairness =
          unfairness(result.exposure_share, result.relevance_share);
    }
  } catch (const DegenerateTotalError& e) {
    result.undefined_reason = e.what();
  }

  if (macro) {
    CompensatedSum sum;
    std::size_t defined = 0;
    for (const auto& qid : query_order) {
      QueryUnfairness qu{qid, std::nullopt};
      try {
        auto s = group_shares(per_query.at(qid), groups,
                              params.unknown_as_group);
        qu.unfairness = unfairness(s.exposure, s.relevance);
        sum.add(*qu.unfairness);
        ++defined;
      } catch (const DegenerateTotalError&) {
      }
      result.per_query.push_back(std::move(qu));
    }
    if (defined > 0) {
      result.unfairness = sum.value() / static_cast<double>(defined);
      result.undefined_reason.clear();
    } else {
      result.undefined_reason = "every query has degenerate totals";
    }
  }
  return result;
}

/// Whole-run evaluation over several sequences. Each sequence is amortized
/// on its own; the run scores are unweighted means over sequences.
struct RunEvaluation {
  std::vector<std::pair<std::uint64_t, EvalResult>> sequences;
  double mean_utility = 0.0;
  std::optional<double> unfairness;
  std::size_t rankings_evaluated = 0;
  std::string undefined_reason;
};

inline RunEvaluation evaluate_run(const RunSequences& run,
                                  const QueryMap& queries,
                                  const DocumentMap& docs,
                                  const GroupAssignment& groups,
                                  const EvalParams& params) {
  std::vector<const RankingSequence*> seqs;
  std::vector<std::uint64_t> ids;
  for (const auto& [id, seq] : run) {
    ids.push_back(id);
    seqs.push_back(&seq);
  }
  std::vector<std::optional<EvalResult>> results(seqs.size());
  parallel_for(seqs.size(), [&](std::size_t i) {
    results[i] = evaluate_run(*seqs[i], queries, docs, groups, params);
  });

  RunEvaluation out;
  if (seqs.empty()) {
    out.undefined_reason = "run contains no sequences";
    return out;
  }
  CompensatedSum util, unfair;
  bool all_defined = true;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    EvalResult& r = *results[i];
    util.add(r.mean_utility);
    out.rankings_evaluated += r.rankings_evaluated;
    if (r.unfairness) {
      unfair.add(*r.unfairness);
    } else if (all_defined) {
      all_defined = false;
      out.undefined_reason =
          "sequence " + std::to_string(ids[i]) + ": " + r.undefined_reason;
    }
    out.sequences.emplace_back(ids[i], std::move(r));
  }
  const auto n = static_cast<double>(seqs.size());
  out.mean_utility = util.value() / n;
  if (all_defined) out.unfairness = unfair.value() / n;
  return out;
}

inline std::set<QueryId> query_universe(const RunSequences& run) {
  std::set<QueryId> qids;
  for (const auto& [id, seq] : run) {
    for (const auto& e : seq.entries()) qids.insert(e.ranking.qid);
  }
  return qids;
}

struct TradeoffPoint {
  std::string label;
  double utility = 0.0;
  std::optional<double> unfairness;
};

/// One (utility, unfairness) point per run, ordered by label. All runs must
/// rank the same set of queries.
inline std::vector<TradeoffPoint> tradeoff_points(
    const std::vector<std::pair<std::string, RunSequences>>& runs,
    const QueryMap& queries, const DocumentMap& docs,
    const GroupAssignment& groups, const EvalParams& params) {
  std::optional<std::set<QueryId>> universe;
  std::vector<TradeoffPoint> points;
  for (const auto& [label, run] : runs) {
    auto qids = query_universe(run);
    if (!universe) {
      universe = std::move(qids);
    } else if (*universe != qids) {
      throw ProtocolError("run " + label +
                          " covers a different query set than the others");
    }
    auto ev = evaluate_run(run, queries, docs, groups, params);
    points.push_back({label, ev.mean_utility, ev.unfairness});
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.label < b.label; });
  return points;
}

inline std::vector<TradeoffPoint> tradeoff_points(
    const std::vector<std::pair<std::string, RankingSequence>>& runs,
    const QueryMap& queries, const DocumentMap& docs,
    const GroupAssignment& groups, const EvalParams& params) {
  std::vector<std::pair<std::string, RunSequences>> wrapped;
  for (const auto& [label, seq] : runs) {
    RunSequences rs;
    rs.emplace(0, seq);
    wrapped.emplace_back(label, std::move(rs));
  }
  return tradeoff_points(wrapped, queries, docs, groups, params);
}

}  // namespace fairrank
