//
// Copyright 2026 The detectbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "detectbench/ranker.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"

namespace detectbench {
namespace {

const std::vector<std::string> kHuman = {"the cat sat"};
const std::vector<std::string> kAi = {"the delve delve"};

TEST(VocabStatsTest, Counts) {
  const auto stats = BuildVocabStats(kHuman, kAi, 0.0, 1);
  EXPECT_EQ(stats.total_h, 3u);
  EXPECT_EQ(stats.total_a, 3u);
  EXPECT_DOUBLE_EQ(stats.PriorAi(), 0.5);
  EXPECT_DOUBLE_EQ(stats.ConditionalAi("delve"), 1.0);
  EXPECT_EQ(stats.CountA("delve"), 2u);
  EXPECT_EQ(stats.CountH("delve"), 0u);
}

TEST(VocabStatsTest, IdenticalCorporaGivePriorConditionals) {
  const std::vector<std::string> docs = {"one two two three", "three four"};
  const auto stats = BuildVocabStats(docs, docs, 0.5, 1);
  for (const auto& [w, c] : stats.count_h) {
    EXPECT_DOUBLE_EQ(stats.ConditionalAi(w), stats.PriorAi()) << w;
    EXPECT_DOUBLE_EQ(stats.ConditionalHuman(w), stats.PriorHuman()) << w;
  }
}

TEST(VocabStatsTest, CasefoldedAndEmpty) {
  const std::vector<std::string> h = {"Delve DELVE delve"};
  const auto stats = BuildVocabStats(h, kAi, 0.5, 1);
  EXPECT_EQ(stats.CountH("delve"), 3u);
  try {
    BuildVocabStats(std::vector<std::string>{"..."}, kAi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
  EXPECT_THROW(BuildVocabStats(kHuman, std::vector<std::string>{}), Error);
}

TEST(MutualInformationTest, Examples) {
  const auto stats = BuildVocabStats(kHuman, kAi, 0.0, 1);
  EXPECT_NEAR(MutualInformation(stats, "the"), 0.0, 1e-15);
  EXPECT_NEAR(MutualInformation(stats, "delve"), std::log(2.0) / 3.0, 1e-15);
  EXPECT_NEAR(MutualInformation(stats, "delve"), 0.23105, 1e-5);
  try {
    MutualInformation(stats, "zzz");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownWord);
  }
}

// Random corpora over a word pool of up to `max_words` words.
struct RandomCorpora {
  std::vector<std::string> human;
  std::vector<std::string> ai;
  std::map<std::string, int> human_counts;
  std::map<std::string, int> ai_counts;
};

RandomCorpora MakeCorpora(std::mt19937_64& rng, int max_words) {
  RandomCorpora c;
  const int vocab = 2 + static_cast<int>(rng() % (max_words - 1));
  std::vector<double> hw(vocab), aw(vocab);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < vocab; ++i) {
    hw[i] = u(rng) * u(rng);
    aw[i] = u(rng) * u(rng);
  }
  std::discrete_distribution<int> hd(hw.begin(), hw.end()), ad(aw.begin(), aw.end());
  auto fill = [&](std::discrete_distribution<int>& d, std::vector<std::string>& docs,
                  std::map<std::string, int>& counts) {
    const int ndocs = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < ndocs; ++i) {
      std::string doc;
      const int len = 1 + static_cast<int>(rng() % 60);
      for (int j = 0; j < len; ++j) {
        const std::string w = "w" + std::to_string(d(rng));
        ++counts[w];
        doc += w + " ";
      }
      docs.push_back(doc);
    }
  };
  fill(hd, c.human, c.human_counts);
  fill(ad, c.ai, c.ai_counts);
  return c;
}

TEST(MutualInformationTest, MatchesBruteForceAndIsNonNegative) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = MakeCorpora(rng, 100);
    const auto stats = BuildVocabStats(c.human, c.ai, 0.0, 1);
    for (const auto& counts : {c.human_counts, c.ai_counts}) {
      for (const auto& [w, n] : counts) {
        const double mi = MutualInformation(stats, w);
        EXPECT_NEAR(mi, oracle::BruteForceMi(c.human_counts, c.ai_counts, w), 1e-12);
        EXPECT_GE(mi, -1e-15);
      }
    }
    // Smoothed MI is non-negative too.
    const auto smoothed = BuildVocabStats(c.human, c.ai, 0.5, 1);
    for (const auto& [w, n] : c.human_counts) {
      EXPECT_GE(MutualInformation(smoothed, w), -1e-15);
    }
  }
}

TEST(MutualInformationTest, InvariantUnderDuplication) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = MakeCorpora(rng, 30);
    const auto stats = BuildVocabStats(c.human, c.ai, 0.0, 1);
    auto h2 = c.human, a2 = c.ai;
    h2.insert(h2.end(), c.human.begin(), c.human.end());
    a2.insert(a2.end(), c.ai.begin(), c.ai.end());
    const auto doubled = BuildVocabStats(h2, a2, 0.0, 1);
    for (const auto& [w, n] : c.human_counts) {
      EXPECT_NEAR(MutualInformation(stats, w), MutualInformation(doubled, w), 1e-14);
    }
  }
}

TEST(PartitionTest, Examples) {
  const auto vocab = Partition(BuildVocabStats(kHuman, kAi, 0.5, 1));
  ASSERT_TRUE(vocab.AiScore("delve").has_value());
  EXPECT_GT(*vocab.AiScore("delve"), 0.0);
  EXPECT_TRUE(vocab.HumanScore("cat").has_value());
  EXPECT_TRUE(vocab.HumanScore("sat").has_value());
  EXPECT_FALSE(vocab.AiScore("the").has_value());
  EXPECT_FALSE(vocab.HumanScore("the").has_value());
}

TEST(PartitionTest, MinCountFilters) {
  const auto vocab = Partition(BuildVocabStats(kHuman, kAi, 0.5, 2));
  EXPECT_TRUE(vocab.AiScore("delve").has_value());
  EXPECT_FALSE(vocab.HumanScore("cat").has_value());
}

TEST(PartitionTest, SwappingCorporaSwapsSets) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = MakeCorpora(rng, 50);
    const auto fwd = Partition(BuildVocabStats(c.human, c.ai, 0.5, 2));
    const auto rev = Partition(BuildVocabStats(c.ai, c.human, 0.5, 2));
    EXPECT_EQ(fwd.ai_set, rev.human_set);
    EXPECT_EQ(fwd.human_set, rev.ai_set);
    for (const auto& [w, s] : fwd.ai_set) EXPECT_FALSE(fwd.human_set.count(w));
  }
}

TEST(PartitionTest, Deterministic) {
  std::mt19937_64 rng(13);
  const auto c = MakeCorpora(rng, 80);
  const auto a = Partition(BuildVocabStats(c.human, c.ai));
  const auto b = Partition(BuildVocabStats(c.human, c.ai));
  EXPECT_EQ(a.ai_set, b.ai_set);
  EXPECT_EQ(a.human_set, b.human_set);
  EXPECT_EQ(VocabFingerprint(a), VocabFingerprint(b));
}

TEST(RankedVocabStoreTest, SaveLoadPreservesScores) {
  std::mt19937_64 rng(14);
  const auto c = MakeCorpora(rng, 60);
  RankedVocab vocab = Partition(BuildVocabStats(c.human, c.ai, 0.5, 1));
  vocab.human_fingerprint = "h";
  vocab.ai_fingerprint = "a";
  const auto dir = std::filesystem::temp_directory_path() / "detectbench_vocab_test";
  std::filesystem::remove_all(dir);
  SaveRankedVocab(dir, vocab);
  const RankedVocab loaded = LoadRankedVocab(dir);
  EXPECT_EQ(loaded.ai_set, vocab.ai_set);
  EXPECT_EQ(loaded.human_set, vocab.human_set);
  EXPECT_EQ(loaded.alpha, 0.5);
  EXPECT_EQ(loaded.min_count, 1u);
  EXPECT_EQ(loaded.human_fingerprint, "h");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace detectbench
