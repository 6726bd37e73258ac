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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairrank/fairrank.hpp"
#include "oracles.hpp"

namespace testing_support {

using namespace fairrank;

/// A query whose pool is `pool` (in that order); registers every document.
inline QueryRequest add_query(const std::string& qid, const oracle::List& pool,
                              DocumentMap& docs) {
  std::vector<DocumentId> ids;
  RelevanceMap rel;
  for (const auto& d : pool) {
    DocumentId id(d.id);
    if (!docs.contains(id)) {
      std::vector<AuthorId> authors;
      for (const auto& a : d.authors) authors.emplace_back(a);
      docs.emplace(id, Document(id, std::move(authors)));
    }
    ids.push_back(id);
    rel.emplace(id, d.relevance);
  }
  return QueryRequest(QueryId(qid), "", 1.0, std::move(ids), std::move(rel));
}

inline Ranking ranking_of(const std::string& qid, const oracle::List& list) {
  Ranking r{QueryId(qid), {}};
  for (const auto& d : list) r.order.emplace_back(d.id);
  return r;
}

inline GroupAssignment make_groups(
    const std::vector<std::pair<std::string, std::string>>& rows) {
  GroupAssignment g;
  for (const auto& [a, grp] : rows) g.assign(AuthorId(a), GroupId(grp));
  return g;
}

/// Random list of 1..max_size documents with ids "<prefix><i>", authors drawn
/// from `authors`, and Bernoulli(0.5) relevance.
inline oracle::List random_list(std::mt19937_64& gen, const std::string& prefix,
                                std::size_t max_size,
                                const std::vector<std::string>& authors) {
  std::uniform_int_distribution<std::size_t> size(1, max_size);
  std::uniform_int_distribution<std::size_t> pick(0, authors.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  oracle::List out;
  std::size_t n = size(gen);
  for (std::size_t i = 0; i < n; ++i) {
    oracle::Doc d{prefix + std::to_string(i), {authors[pick(gen)]}, coin(gen)};
    if (coin(gen)) {
      auto co = authors[pick(gen)];
      if (co != d.authors.front()) d.authors.push_back(co);
    }
    out.push_back(std::move(d));
  }
  return out;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "fairrank-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(file(name), std::ios::binary) << content;
    return file(name);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support
