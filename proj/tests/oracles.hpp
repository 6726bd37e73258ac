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

// Test-only reference computations. Nothing here calls into the metric or
// reranker code it is used to check; inputs are plain vectors and strings.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// One ranked document as the oracles see it.
struct Doc {
  std::string id;
  std::vector<std::string> authors = {};
  int relevance = 0;
};

using List = std::vector<Doc>;

// ---------------------------------------------------------------------------
// Monte-Carlo cascade
// ---------------------------------------------------------------------------

struct CascadeStats {
  std::vector<double> examined;  // per rank, fraction of trials
  double satisfied = 0.0;        // fraction of trials that stopped satisfied
  std::map<std::string, double> author_exposure;
};

/// Simulates the browsing user: examine rank 1; after examining d, stop with
/// probability c * r_d; otherwise continue with probability gamma.
inline CascadeStats simulate_cascade(const List& ranking, double gamma, double c,
                                     std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> examined(ranking.size(), 0);
  std::size_t satisfied = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      ++examined[i];
      if (u(gen) < c * ranking[i].relevance) {
        ++satisfied;
        break;
      }
      if (!(u(gen) < gamma)) break;
    }
  }
  CascadeStats s;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    double f = static_cast<double>(examined[i]) / static_cast<double>(trials);
    s.examined.push_back(f);
    for (const auto& a : ranking[i].authors) s.author_exposure[a] += f;
  }
  s.satisfied = static_cast<double>(satisfied) / static_cast<double>(trials);
  return s;
}

// ---------------------------------------------------------------------------
// Direct evaluation of the definitions
// ---------------------------------------------------------------------------

/// gamma^(i) * prod_{j<i} (1 - c r_j), recomputed from scratch (0-based i).
inline double weight_at(const List& ranking, std::size_t i, double gamma,
                        double c) {
  double w = std::pow(gamma, static_cast<double>(i));
  for (std::size_t j = 0; j < i; ++j) w *= 1.0 - c * ranking[j].relevance;
  return w;
}

inline double utility(const List& ranking, double gamma, double c) {
  double u = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    u += weight_at(ranking, i, gamma, c) * c * ranking[i].relevance;
  }
  return u;
}

inline std::map<std::string, double> exposure(const List& ranking, double gamma,
                                              double c) {
  std::map<std::string, double> e;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    for (const auto& a : ranking[i].authors) {
      e[a] += weight_at(ranking, i, gamma, c);
    }
  }
  return e;
}

/// Relevance depends on the pool only; the ranking is the pool.
inline std::map<std::string, double> relevance(const List& pool, double c) {
  std::map<std::string, double> r;
  for (const auto& d : pool) {
    for (const auto& a : d.authors) r[a] += c * d.relevance;
  }
  return r;
}

struct Evaluation {
  double utility = 0.0;
  double unfairness = 0.0;
  std::map<std::string, double> delta;  // exposure share
  std::map<std::string, double> Gamma;  // relevance share
};

/// Micro-amortized evaluation of a sequence of rankings. Authors missing
/// from `group_of` are excluded; `universe` lists every group.
inline Evaluation evaluate(const std::vector<List>& rankings, double gamma,
                           double c,
                           const std::map<std::string, std::string>& group_of,
                           const std::set<std::string>& universe) {
  std::map<std::string, double> E, R;
  double util = 0.0;
  for (const auto& r : rankings) {
    for (const auto& [a, v] : exposure(r, gamma, c)) E[a] += v;
    for (const auto& [a, v] : relevance(r, c)) R[a] += v;
    util += utility(r, gamma, c);
  }
  std::map<std::string, double> ge, gr;
  for (const auto& g : universe) ge[g] = gr[g] = 0.0;
  double te = 0.0, tr = 0.0;
  for (const auto& [a, v] : E) {
    auto it = group_of.find(a);
    if (it == group_of.end()) continue;
    ge[it->second] += v;
    te += v;
  }
  for (const auto& [a, v] : R) {
    auto it = group_of.find(a);
    if (it == group_of.end()) continue;
    gr[it->second] += v;
    tr += v;
  }
  Evaluation out;
  out.utility = util / static_cast<double>(rankings.size());
  double sq = 0.0;
  for (const auto& g : universe) {
    out.delta[g] = ge[g] / te;
    out.Gamma[g] = gr[g] / tr;
    sq += (out.delta[g] - out.Gamma[g]) * (out.delta[g] - out.Gamma[g]);
  }
  out.unfairness = std::sqrt(sq);
  return out;
}

/// Best utility over every permutation of `pool`, with stop probabilities
/// given directly.
inline double max_utility_over_permutations(std::vector<double> stop_probs,
                                            double gamma) {
  std::sort(stop_probs.begin(), stop_probs.end());
  double best = -1.0;
  do {
    double u = 0.0, w = 1.0;
    for (double p : stop_probs) {
      u += w * p;
      w *= gamma * (1.0 - p);
    }
    best = std::max(best, u);
  } while (std::next_permutation(stop_probs.begin(), stop_probs.end()));
  return best;
}

}  // namespace oracle
