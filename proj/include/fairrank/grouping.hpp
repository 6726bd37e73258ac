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

// Group definitions derived from per-author statistics (h-index, i10-index)
// by bucketing on left-closed thresholds.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairrank/core.hpp"
#include "fairrank/io.hpp"

namespace fairrank {

/// Bucket boundaries t1 < t2 < ... < tk over a statistic named `stat`.
/// Buckets are  stat<t1,  t1<=stat<t2,  ...,  stat>=tk.
class ThresholdBuckets {
 public:
  ThresholdBuckets(std::string stat, std::vector<std::int64_t> cuts)
      : stat_(std::move(stat)), cuts_(std::move(cuts)) {
    if (stat_.empty()) throw ContractError("statistic name is empty");
    if (cuts_.empty()) throw ContractError("at least one threshold is required");
    for (std::size_t i = 1; i < cuts_.size(); ++i) {
      if (cuts_[i] <= cuts_[i - 1]) {
        throw ContractError("thresholds must be strictly increasing");
      }
    }
  }

  std::size_t bucket_count() const noexcept { return cuts_.size() + 1; }

  std::string label(std::size_t bucket) const {
    if (bucket == 0) return stat_ + "<" + std::to_string(cuts_.front());
    if (bucket == cuts_.size()) {
      return stat_ + ">=" + std::to_string(cuts_.back());
    }
    return std::to_string(cuts_[bucket - 1]) + "<=" + stat_ + "<" +
           std::to_string(cuts_[bucket]);
  }

  std::size_t bucket_of(std::int64_t value) const {
    std::size_t b = 0;
    while (b < cuts_.size() && value >= cuts_[b]) ++b;
    return b;
  }

  GroupId group_of(std::int64_t value) const {
    return GroupId(label(bucket_of(value)));
  }

 private:
  std::string stat_;
  std::vector<std::int64_t> cuts_;
};

/// The four h-index buckets used for evaluation: h<5, 5<=h<15, 15<=h<30,
/// h>=30.
inline const ThresholdBuckets& hindex_buckets() {
  static const ThresholdBuckets b("h", {5, 15, 30});
  return b;
}

using AuthorStats = std::map<AuthorId, std::int64_t>;

/// Assigns each author to its bucket. Every bucket is part of the group
/// universe even if empty. Negative statistics are rejected.
inline GroupAssignment group_from_thresholds(const AuthorStats& stats,
                                             const ThresholdBuckets& buckets) {
  GroupAssignment out;
  for (std::size_t b = 0; b < buckets.bucket_count(); ++b) {
    out.add_group(GroupId(buckets.label(b)));
  }
  for (const auto& [author, value] : stats) {
    if (value < 0) {
      throw DataFormatError("author " + author.str() +
                            " has a negative statistic");
    }
    out.assign(author, buckets.group_of(value));
  }
  return out;
}

inline GroupAssignment group_from_hindex(const AuthorStats& hindex) {
  return group_from_thresholds(hindex, hindex_buckets());
}

/// Loads a two-column CSV "author_id,<stat>" of non-negative integers.
inline AuthorStats load_author_stats(const std::string& path) {
  LineReader in(path);
  AuthorStats out;
  std::string line;
  bool header = false;
  while (in.next(line)) {
    if (is_blank(line)) continue;
    auto cols = detail::split_csv(line);
    if (cols.size() != 2) in.fail("expected two columns");
    if (!header) {
      header = true;
      if (cols[0] != "author_id") in.fail("expected header \"author_id,<stat>\"");
      continue;
    }
    if (cols[0].empty()) in.fail("empty author id");
    std::int64_t v = 0;
    bool negative = !cols[1].empty() && cols[1].front() == '-';
    std::uint64_t mag = 0;
    if (!detail::parse_u64(negative ? std::string_view(cols[1]).substr(1)
                                    : std::string_view(cols[1]),
                           mag)) {
      in.fail("statistic \"" + cols[1] + "\" is not an integer");
    }
    if (negative) in.fail("negative statistic for author " + cols[0]);
    v = static_cast<std::int64_t>(mag);
    AuthorId a(cols[0]);
    if (auto [it, fresh] = out.emplace(a, v); !fresh && it->second != v) {
      in.fail("author " + cols[0] + " listed with two different values");
    }
  }
  return out;
}

}  // namespace fairrank
