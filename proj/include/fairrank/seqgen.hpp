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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairrank/core.hpp"
#include "fairrank/parallel.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

inline constexpr std::size_t kDefaultSequenceCount = 5;
inline constexpr std::size_t kDefaultSequenceLength = 25000;

using QuerySequence = std::vector<QueryId>;

/// Draws `length` qids i.i.d. with replacement, with probability
/// proportional to query frequency. Sequence i uses the stream
/// derive_seed(seed, i), so output does not depend on thread count.
inline std::vector<QuerySequence> generate_sequences(
    std::span<const QueryRequest> queries, std::size_t n_sequences,
    std::size_t length, std::uint64_t seed) {
  if (length == 0) throw ContractError("sequence length must be positive");

  std::vector<const QueryId*> support;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& q : queries) {
    if (q.frequency() > 0.0) {
      total += q.frequency();
      support.push_back(&q.qid());
      cumulative.push_back(total);
    }
  }
  if (support.empty()) {
    throw ContractError("every query has zero frequency; nothing to sample");
  }

  std::vector<QuerySequence> out(n_sequences);
  parallel_for(n_sequences, [&](std::size_t s) {
    Rng rng(derive_seed(seed, s));
    auto& seq = out[s];
    seq.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
      double u = rng.uniform01() * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      auto idx = std::min<std::size_t>(it - cumulative.begin(),
                                       support.size() - 1);
      seq.push_back(*support[idx]);
    }
  });
  return out;
}

}  // namespace fairrank
