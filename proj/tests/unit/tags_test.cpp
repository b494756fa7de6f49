/* Copyright 2026 The vsent Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include "test_support.hpp"
#include "vsent/error.hpp"
#include "vsent/tags.hpp"

using namespace vsent;

namespace {

ImageRecord with_tokens(std::vector<std::string> tokens) {
  ImageRecord r;
  r.id = "x";
  r.metadata_tokens = std::move(tokens);
  return r;
}

const std::vector<std::string> kDisasterTags{"pain", "shock", "destruction", "rescue", "hope", "happiness", "neutral"};

}  // namespace

TEST_CASE("default vocabulary is the seven disaster tags") {
  CHECK(TagVocabulary::disaster_default().tags() == kDisasterTags);
  CHECK(TagVocabulary::disaster_default().index_of("rescue") == 3u);
  CHECK_FALSE(TagVocabulary::disaster_default().contains("fear"));
  CHECK_THROWS_AS(TagVocabulary({"pain", "pain"}), InvalidArgument);
  CHECK_THROWS_AS(TagVocabulary({"Pain"}), InvalidArgument);
  CHECK_THROWS_AS(TagVocabulary({""}), InvalidArgument);
}

TEST_CASE("tokenize_metadata") {
  CHECK(tokenize_metadata(with_tokens({"Flood!", "PAIN"})) == std::vector<std::string>{"flood", "pain"});
  CHECK(tokenize_metadata(with_tokens({})).empty());

  // 12 raw tokens: two are a single character, one is pure punctuation
  // that survives as a single character after stripping.
  const std::vector<std::string> raw{"Rescue", "a", "boats,", "#Hope", "x", "water", "Help!!", "shock",
                                     "roof", "KIDS", "Sad", "fire"};
  const auto toks = tokenize_metadata(with_tokens(raw));
  CHECK(toks.size() == 10);
  CHECK(toks == std::vector<std::string>{"rescue", "boats", "hope", "water", "help", "shock", "roof", "kids",
                                         "sad", "fire"});
  CHECK(tokenize_metadata(with_tokens({"people waiting on roofs"})) ==
        std::vector<std::string>{"people", "waiting", "on", "roofs"});
}

TEST_CASE("rank_candidates") {
  CHECK(rank_candidates({}, {}, 1).empty());
  CHECK_THROWS_AS(rank_candidates({}, {}, 0), InvalidArgument);

  // flood in 9 records, pain in 4, help in 3, water in 2.
  std::vector<ImageRecord> recs;
  for (int i = 0; i < 9; ++i) {
    std::vector<std::string> t{"Flood"};
    if (i < 4) t.push_back("pain");
    if (i >= 4 && i < 7) t.push_back("help");
    if (i == 7 || i == 8) t.push_back("water");
    if (i == 0) t.push_back("pain");  // repeat inside one record counts once
    recs.push_back(with_tokens(t));
  }
  const auto ranked = rank_candidates(recs, {"flood"}, 1);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0] == RankedToken{"pain", 4});
  CHECK(ranked[1] == RankedToken{"help", 3});
  CHECK(ranked[2] == RankedToken{"water", 2});
  CHECK(rank_candidates(recs, {"flood"}, 3).size() == 2);

  const auto ties = rank_candidates({with_tokens({"zeta", "alpha"}), with_tokens({"beta"})}, {}, 1);
  CHECK(ties == std::vector<RankedToken>{{"alpha", 1}, {"beta", 1}, {"zeta", 1}});
}

TEST_CASE("rank_candidates matches a nested-loop count on random fixtures") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> words{"pain", "hope", "water", "flood", "help", "boat", "roof", "fire"};
  const std::set<std::string> stop{"flood", "fire"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ImageRecord> recs;
    for (int i = 0, n = static_cast<int>(rng() % 20); i < n; ++i) {
      std::vector<std::string> t;
      for (int k = 0, m = static_cast<int>(rng() % 6); k < m; ++k) t.push_back(words[rng() % words.size()]);
      recs.push_back(with_tokens(t));
    }
    const std::size_t min_count = 1 + rng() % 3;
    const auto ranked = rank_candidates(recs, stop, min_count);

    std::vector<RankedToken> oracle;
    for (const auto& w : words) {
      if (stop.contains(w)) continue;
      std::size_t c = 0;
      for (const auto& r : recs) {
        bool has = false;
        for (const auto& tok : r.metadata_tokens) has = has || tok == w;
        c += has ? 1 : 0;
      }
      if (c >= min_count) oracle.push_back({w, c});
    }
    std::sort(oracle.begin(), oracle.end(), [](const RankedToken& a, const RankedToken& b) {
      return a.count != b.count ? a.count > b.count : a.token < b.token;
    });
    CHECK(ranked == oracle);
  }
}

TEST_CASE("build_vocabulary") {
  const std::vector<RankedToken> ranked{{"pain", 40}, {"help", 30}, {"water", 20}, {"boat", 10}};
  CHECK(build_vocabulary(ranked, kDisasterTags, 7).tags() == kDisasterTags);
  CHECK(build_vocabulary({}, kDisasterTags, 10).tags() == kDisasterTags);

  auto expected = kDisasterTags;
  expected.push_back("help");
  CHECK(build_vocabulary(ranked, kDisasterTags, 8).tags() == expected);

  CHECK_THROWS_AS(build_vocabulary(ranked, {"pain", "pain"}, 5), InvalidArgument);
  CHECK_THROWS_AS(build_vocabulary(ranked, kDisasterTags, 6), InvalidArgument);

  for (std::size_t limit = 7; limit < 13; ++limit) {
    const auto v = build_vocabulary(ranked, kDisasterTags, limit);
    CHECK(v.size() <= limit);
    CHECK(std::equal(kDisasterTags.begin(), kDisasterTags.end(), v.tags().begin()));
  }
}

TEST_CASE("vocabulary and stopword files") {
  vsent::testing::TempDir tmp;
  write_vocabulary(tmp / "v.txt", TagVocabulary::disaster_default());
  CHECK(read_vocabulary(tmp / "v.txt") == TagVocabulary::disaster_default());
  {
    std::ofstream(tmp / "s.txt") << "# disaster nouns\nFlood\n\n earthquake \n";
  }
  CHECK(read_stopwords(tmp / "s.txt") == std::set<std::string>{"earthquake", "flood"});
  CHECK_THROWS_AS(read_vocabulary(tmp / "missing.txt"), DataError);
}
