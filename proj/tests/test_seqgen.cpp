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

#include <gtest/gtest.h>

#include <cstdlib>
#include <map>

#include "fairrank/io.hpp"
#include "fairrank/seqgen.hpp"

namespace fairrank {
namespace {

std::vector<QueryRequest> queries_with(const std::vector<double>& freqs) {
  std::vector<QueryRequest> out;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    out.emplace_back(QueryId("q" + std::to_string(i)), "", freqs[i],
                     std::vector{DocumentId("d" + std::to_string(i))});
  }
  return out;
}

std::map<std::string, std::size_t> histogram(const QuerySequence& seq) {
  std::map<std::string, std::size_t> h;
  for (const auto& q : seq) ++h[q.str()];
  return h;
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
  EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(GenerateSequences, SingleQuery) {
  auto qs = queries_with({0.3});
  auto seqs = generate_sequences(qs, 2, 10, 1);
  ASSERT_EQ(seqs.size(), 2u);
  for (const auto& s : seqs) {
    ASSERT_EQ(s.size(), 10u);
    for (const auto& q : s) EXPECT_EQ(q, QueryId("q0"));
  }
}

TEST(GenerateSequences, ZeroFrequencyNeverDrawn) {
  auto qs = queries_with({1.0, 0.0});
  auto seqs = generate_sequences(qs, 3, 10000, 5);
  for (const auto& s : seqs) EXPECT_EQ(histogram(s).count("q1"), 0u);
}

TEST(GenerateSequences, EqualFrequenciesAreBalanced) {
  auto qs = queries_with({2.0, 2.0});
  const std::size_t n = 100000;
  auto seq = generate_sequences(qs, 1, n, 2019).front();
  auto h = histogram(seq);
  double p = static_cast<double>(h["q0"]) / static_cast<double>(n);
  EXPECT_NEAR(p, 0.5, 0.005);
  // chi-square with one degree of freedom; 10.83 is the 0.001 critical value
  double e = n / 2.0;
  double chi2 = (h["q0"] - e) * (h["q0"] - e) / e + (h["q1"] - e) * (h["q1"] - e) / e;
  EXPECT_LT(chi2, 10.83);
}

TEST(GenerateSequences, ProportionalToFrequency) {
  auto qs = queries_with({1.0, 3.0, 6.0});
  const std::size_t n = 200000;
  auto h = histogram(generate_sequences(qs, 1, n, 3).front());
  EXPECT_NEAR(h["q0"] / static_cast<double>(n), 0.1, 0.005);
  EXPECT_NEAR(h["q1"] / static_cast<double>(n), 0.3, 0.005);
  EXPECT_NEAR(h["q2"] / static_cast<double>(n), 0.6, 0.005);
}

TEST(GenerateSequences, DeterministicAndSeedSensitive) {
  auto qs = queries_with({1.0, 1.0, 1.0, 1.0});
  auto a = generate_sequences(qs, 4, 500, 11);
  auto b = generate_sequences(qs, 4, 500, 11);
  auto c = generate_sequences(qs, 4, 500, 12);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a[0], a[1]);
}

TEST(GenerateSequences, IndependentOfThreadCount) {
  auto qs = queries_with({1.0, 2.0, 3.0});
  setenv("FAIRRANK_THREADS", "1", 1);
  auto one = generate_sequences(qs, 6, 1000, 99);
  setenv("FAIRRANK_THREADS", "8", 1);
  auto many = generate_sequences(qs, 6, 1000, 99);
  unsetenv("FAIRRANK_THREADS");
  EXPECT_EQ(one, many);
}

TEST(GenerateSequences, PrefixOfLongerSequence) {
  auto qs = queries_with({1.0, 2.0});
  auto short_run = generate_sequences(qs, 2, 100, 4);
  auto long_run = generate_sequences(qs, 2, 300, 4);
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_TRUE(std::equal(short_run[s].begin(), short_run[s].end(), long_run[s].begin()));
  }
}

TEST(GenerateSequences, Errors) {
  auto qs = queries_with({0.0, 0.0});
  EXPECT_THROW(generate_sequences(qs, 1, 10, 1), ContractError);
  auto ok = queries_with({1.0});
  EXPECT_THROW(generate_sequences(ok, 1, 0, 1), ContractError);
  EXPECT_TRUE(generate_sequences(ok, 0, 10, 1).empty());
}

TEST(GenerateSequences, Defaults) {
  EXPECT_EQ(kDefaultSequenceCount, 5u);
  EXPECT_EQ(kDefaultSequenceLength, 25000u);
}

}  // namespace
}  // namespace fairrank
