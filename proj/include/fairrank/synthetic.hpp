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

// Synthetic two-group dataset with a biased scorer.
//
// Every document has a latent quality q ~ U(0,1) and is relevant iff
// q > relevance_cut. Its title repeats round(tokens * clamp(q + bias_g +
// noise)) of its query's tokens, so the lexical scorer in rerank.hpp sees a
// predicted relevance that tracks q but is shifted up for the majority
// group and down for the minority group.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fairrank/core.hpp"
#include "fairrank/io.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

struct SyntheticConfig {
  std::size_t queries = 40;
  std::size_t pool_size = 6;
  std::size_t query_tokens = 5;
  std::size_t majority_authors = 30;
  std::size_t minority_authors = 30;
  double majority_fraction = 0.7;  // share of documents written by group A
  double majority_bias = 0.15;     // scorer over-rates group A by this much
  double minority_bias = -0.15;
  double noise = 0.1;
  double relevance_cut = 0.5;
  double coauthor_probability = 0.3;
  std::uint64_t seed = 2019;
};

struct SyntheticDataset {
  Corpus corpus;
  std::vector<QueryRequest> queries;  // with relevance labels
  GroupAssignment groups;
};

inline const GroupId& synthetic_majority() {
  static const GroupId g{"A"};
  return g;
}
inline const GroupId& synthetic_minority() {
  static const GroupId g{"B"};
  return g;
}

inline SyntheticDataset make_synthetic(const SyntheticConfig& cfg) {
  if (cfg.pool_size == 0 || cfg.query_tokens == 0 || cfg.majority_authors == 0 ||
      cfg.minority_authors == 0) {
    throw ContractError("synthetic config sizes must be positive");
  }
  Rng rng(cfg.seed);
  SyntheticDataset ds;
  std::vector<AuthorId> majority, minority;
  for (std::size_t i = 0; i < cfg.majority_authors; ++i) {
    majority.emplace_back("a" + std::to_string(i));
    ds.groups.assign(majority.back(), synthetic_majority());
  }
  for (std::size_t i = 0; i < cfg.minority_authors; ++i) {
    minority.emplace_back("b" + std::to_string(i));
    ds.groups.assign(minority.back(), synthetic_minority());
  }

  for (std::size_t q = 0; q < cfg.queries; ++q) {
    std::vector<std::string> tokens;
    std::string text;
    for (std::size_t t = 0; t < cfg.query_tokens; ++t) {
      tokens.push_back("q" + std::to_string(q) + "w" + std::to_string(t));
      if (t) text += ' ';
      text += tokens.back();
    }
    std::vector<DocumentId> pool;
    RelevanceMap relevance;
    for (std::size_t k = 0; k < cfg.pool_size; ++k) {
      DocumentId id("d" + std::to_string(q) + "_" + std::to_string(k));
      bool major = rng.uniform01() < cfg.majority_fraction;
      const auto& authors = major ? majority : minority;
      std::vector<AuthorId> doc_authors{authors[rng.below(authors.size())]};
      if (rng.uniform01() < cfg.coauthor_probability) {
        const auto& co = authors[rng.below(authors.size())];
        if (co != doc_authors.front()) doc_authors.push_back(co);
      }
      double quality = rng.uniform01();
      double seen = quality + (major ? cfg.majority_bias : cfg.minority_bias) +
                    cfg.noise * (2.0 * rng.uniform01() - 1.0);
      seen = std::clamp(seen, 0.0, 1.0);
      auto hits = static_cast<std::size_t>(
          std::lround(seen * static_cast<double>(cfg.query_tokens)));
      std::string title = "paper";
      for (std::size_t t = 0; t < hits; ++t) title += " " + tokens[t];
      relevance.emplace(id, quality > cfg.relevance_cut ? 1 : 0);
      pool.push_back(id);
      ds.corpus.order.push_back(id);
      ds.corpus.documents.emplace(
          id, Document(id, std::move(doc_authors), std::move(title)));
    }
    double frequency = 1.0 + static_cast<double>(rng.below(10));
    ds.queries.emplace_back(QueryId("q" + std::to_string(q)), std::move(text),
                            frequency, std::move(pool), std::move(relevance));
  }
  return ds;
}

inline std::string format_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& id : corpus.order) {
    const Document& d = corpus.documents.at(id);
    nlohmann::ordered_json j;
    j["id"] = id.str();
    j["title"] = d.title().value_or("");
    j["paperAbstract"] = d.abstract_text().value_or("");
    auto& authors = j["authors"] = nlohmann::ordered_json::array();
    for (const auto& a : d.authors()) {
      authors.push_back({{"name", a.str()}, {"ids", {a.str()}}});
    }
    out += j.dump() + "\n";
  }
  return out;
}

inline std::string format_queries(const std::vector<QueryRequest>& queries) {
  std::string out;
  for (const auto& q : queries) {
    nlohmann::ordered_json j;
    j["qid"] = q.qid().str();
    j["query"] = q.text();
    j["frequency"] = q.frequency();
    auto& docs = j["documents"] = nlohmann::ordered_json::array();
    for (const auto& d : q.pool()) {
      nlohmann::ordered_json e;
      e["doc_id"] = d.str();
      if (q.relevance()) e["relevance"] = q.relevance_of(d);
      docs.push_back(std::move(e));
    }
    out += j.dump() + "\n";
  }
  return out;
}

/// Writes corpus.jsonl, queries.jsonl and groups.csv into `dir`.
inline void write_synthetic(const std::string& dir, const SyntheticDataset& ds) {
  std::filesystem::create_directories(dir);
  atomic_write(dir + "/corpus.jsonl", format_corpus(ds.corpus));
  atomic_write(dir + "/queries.jsonl", format_queries(ds.queries));
  write_groups(dir + "/groups.csv", ds.groups);
}

}  // namespace fairrank
