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

#include "detectbench/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace detectbench {
namespace {

std::vector<std::string> Split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Provider with fixed per-token stats, independent of the tokens.
class FixedStats : public TokenProbProvider {
 public:
  explicit FixedStats(std::vector<TokenStat> stats) : stats_(std::move(stats)) {}
  std::vector<TokenStat> Score(std::span<const std::string> tokens) const override {
    std::vector<TokenStat> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      out.push_back(stats_[i % stats_.size()]);
    }
    return out;
  }

 private:
  std::vector<TokenStat> stats_;
};

TEST(NGramTest, BigramHandCounts) {
  const std::vector<std::vector<std::string>> corpus = {Split("a b a b")};
  const auto model = NGramModel::Train(corpus, 2);
  EXPECT_EQ(model.vocab_size(), 2u);
  const auto tokens = Split("a b");
  EXPECT_DOUBLE_EQ(model.Probability(tokens, 1, "b"), 0.75);
  EXPECT_DOUBLE_EQ(model.Probability(tokens, 1, "a"), 0.25);
  // Context <s> was seen once, followed by a.
  EXPECT_DOUBLE_EQ(model.Probability(tokens, 0, "a"), 2.0 / 3.0);
}

TEST(NGramTest, UnigramHandCounts) {
  const std::vector<std::vector<std::string>> corpus = {Split("a b a b")};
  const auto model = NGramModel::Train(corpus, 1);
  const auto tokens = Split("a");
  EXPECT_DOUBLE_EQ(model.Probability(tokens, 0, "a"), 0.5);
}

TEST(NGramTest, UnseenContextIsUniform) {
  const std::vector<std::vector<std::string>> corpus = {Split("a b c a")};
  const auto model = NGramModel::Train(corpus, 2);
  const auto tokens = Split("zzz b");
  EXPECT_DOUBLE_EQ(model.Probability(tokens, 1, "b"), 1.0 / 3.0);
  const auto stats = model.Score(tokens);
  EXPECT_EQ(stats[1].rank, 1u);
}

TEST(NGramTest, DistributionsSumToOne) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<std::string>> corpus;
  for (int d = 0; d < 20; ++d) {
    std::vector<std::string> doc;
    for (int i = 0; i < 30; ++i) doc.push_back("w" + std::to_string(rng() % 12));
    corpus.push_back(doc);
  }
  for (int order : {1, 2, 3}) {
    const auto model = NGramModel::Train(corpus, order);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::string> ctx = corpus[trial % corpus.size()];
      const std::size_t pos = rng() % ctx.size();
      double sum = 0.0;
      for (const auto& w : model.vocabulary()) sum += model.Probability(ctx, pos, w);
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(NGramTest, RankIsCompetitionRanking) {
  // After "x": y twice, z twice, w once.
  const std::vector<std::vector<std::string>> corpus = {
      Split("x y x y x z x z x w")};
  const auto model = NGramModel::Train(corpus, 2);
  const auto stats = model.Score(Split("x y x z x w x x"));
  EXPECT_EQ(stats[1].rank, 1u);  // y ties z for first
  EXPECT_EQ(stats[3].rank, 1u);
  EXPECT_EQ(stats[5].rank, 3u);  // w behind y and z
  EXPECT_EQ(stats[7].rank, 4u);  // x never follows x
}

TEST(NGramTest, Errors) {
  EXPECT_THROW(NGramModel::Train(std::vector<std::vector<std::string>>{}, 2), Error);
  const std::vector<std::vector<std::string>> corpus = {Split("a")};
  EXPECT_THROW(NGramModel::Train(corpus, 0), Error);
}

TEST(DetectorScoreTest, UniformLogLikelihood) {
  FixedStats uniform({{std::log(0.25), 1}});
  const auto tokens = Split("a b c");
  EXPECT_NEAR(DetectorScore(DetectorMethod::kLogLikelihood, tokens, uniform),
              -1.3862943611198906, 1e-12);
}

TEST(DetectorScoreTest, RankScores) {
  FixedStats provider({{-1.0, 1}, {-2.0, 2}, {-3.0, 4}});
  const auto tokens = Split("a b c");
  EXPECT_NEAR(DetectorScore(DetectorMethod::kLogRank, tokens, provider),
              -(std::log(2.0) + std::log(4.0)) / 3.0, 1e-15);
  EXPECT_NEAR(DetectorScore(DetectorMethod::kLogRank, tokens, provider), -0.6931, 1e-4);
  EXPECT_NEAR(DetectorScore(DetectorMethod::kRank, tokens, provider), -7.0 / 3.0, 1e-15);
  EXPECT_NEAR(DetectorScore(DetectorMethod::kLrr, tokens, provider),
              6.0 / (std::log(2.0) + std::log(4.0)), 1e-15);
}

TEST(DetectorScoreTest, Errors) {
  FixedStats ones({{-0.5, 1}});
  const auto tokens = Split("a b");
  try {
    DetectorScore(DetectorMethod::kLrr, tokens, ones);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateRanks);
  }
  try {
    DetectorScore(DetectorMethod::kLogLikelihood, std::vector<std::string>{}, ones);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(DetectorScoreTest, BoundsAndCrossCheck) {
  std::mt19937_64 rng(5);
  std::vector<std::vector<std::string>> corpus;
  for (int d = 0; d < 10; ++d) {
    std::vector<std::string> doc;
    for (int i = 0; i < 40; ++i) doc.push_back("w" + std::to_string(rng() % 15));
    corpus.push_back(doc);
  }
  const auto model = NGramModel::Train(corpus, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> doc;
    const int n = 2 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) doc.push_back("w" + std::to_string(rng() % 18));
    EXPECT_LE(DetectorScore(DetectorMethod::kLogLikelihood, doc, model), 0.0);
    EXPECT_LE(DetectorScore(DetectorMethod::kRank, doc, model), -1.0);
    EXPECT_LE(DetectorScore(DetectorMethod::kLogRank, doc, model), 0.0);
    const auto stats = model.Score(doc);
    double sum_lp = 0.0, sum_lr = 0.0;
    for (const auto& s : stats) {
      sum_lp += s.logprob;
      sum_lr += std::log(static_cast<double>(s.rank));
    }
    if (sum_lr > 0.0) {
      EXPECT_NEAR(DetectorScore(DetectorMethod::kLrr, doc, model), -sum_lp / sum_lr,
                  1e-12);
      // Same identity through the other two methods.
      const double ll = DetectorScore(DetectorMethod::kLogLikelihood, doc, model);
      const double lr = DetectorScore(DetectorMethod::kLogRank, doc, model);
      EXPECT_NEAR(DetectorScore(DetectorMethod::kLrr, doc, model), ll / lr, 1e-12);
    }
  }
}

TEST(DetectorScoreTest, ModelTextBeatsShuffledText) {
  // Sample documents from a trained bigram model and compare them against the
  // same tokens shuffled.
  std::mt19937_64 rng(8);
  const std::vector<std::string> cycle = {"the", "river", "runs", "to", "the",
                                          "sea", "and", "back"};
  std::vector<std::vector<std::string>> corpus;
  for (int d = 0; d < 30; ++d) {
    std::vector<std::string> doc;
    for (int i = 0; i < 40; ++i) {
      doc.push_back(rng() % 10 == 0 ? cycle[rng() % cycle.size()]
                                    : cycle[i % cycle.size()]);
    }
    corpus.push_back(doc);
  }
  const auto model = NGramModel::Train(corpus, 2);
  double generated = 0.0, shuffled = 0.0;
  const int n_docs = 40;
  for (int d = 0; d < n_docs; ++d) {
    std::vector<std::string> doc;
    for (int i = 0; i < 30; ++i) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double r = u(rng);
      const auto& vocab = model.vocabulary();
      std::string pick = vocab.back();
      for (const auto& w : vocab) {
        doc.push_back(w);
        const double p = model.Probability(doc, doc.size() - 1, w);
        doc.pop_back();
        if (r < p) {
          pick = w;
          break;
        }
        r -= p;
      }
      doc.push_back(pick);
    }
    generated += DetectorScore(DetectorMethod::kLogLikelihood, doc, model);
    std::shuffle(doc.begin(), doc.end(), rng);
    shuffled += DetectorScore(DetectorMethod::kLogLikelihood, doc, model);
  }
  EXPECT_GT(generated / n_docs, shuffled / n_docs);
}

TEST(ScoreFileTest, ParsesValidLines) {
  const std::string content =
      R"({"id":"1","score":0.5,"label":"ai","detector":"d","scenario":{"style":"news","generator":"m1","attack":"none","hardness":"0"}})"
      "\n\n"
      R"({"id":"2","score":-1,"label":"human","detector":"d","scenario":{"style":"news","generator":"m1","attack":"none","hardness":"0"},"note":"kept"})"
      "\n";
  const auto records = ParseScores(content);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].label, Label::kAi);
  EXPECT_EQ(records[1].score, -1.0);
  EXPECT_EQ(records[1].extra["note"], "kept");
  EXPECT_EQ(ParseScores(SerializeScores(records)).size(), 2u);
  EXPECT_EQ(SerializeScores(ParseScores(SerializeScores(records))),
            SerializeScores(records));
}

TEST(ScoreFileTest, ErrorsCarryLineNumbers) {
  const std::string good =
      R"({"id":"1","score":0.5,"label":"ai","detector":"d","scenario":{"style":"s","generator":"g","attack":"a","hardness":"h"}})";
  const std::string robot =
      R"({"id":"2","score":0.5,"label":"robot","detector":"d","scenario":{"style":"s","generator":"g","attack":"a","hardness":"h"}})";
  try {
    ParseScores(good + "\n" + robot + "\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownLabel);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  const std::string missing = R"({"id":"3","label":"ai","detector":"d","scenario":{}})";
  try {
    ParseScores(good + "\n" + good + "\n" + missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(ParseScores("not json\n"), Error);
}

TEST(ScoreFileTest, GroupsByScenarioTuple) {
  std::vector<ScoreRecord> records;
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"news", "m1"}, {"news", "m1"}, {"news", "m2"}, {"blog", "m1"}};
  for (std::size_t i = 0; i < keys.size(); ++i) {
    ScoreRecord r;
    r.id = std::to_string(i);
    r.score = static_cast<double>(i);
    r.label = i % 2 ? Label::kAi : Label::kHuman;
    r.detector = "d";
    r.scenario = {keys[i].first, keys[i].second, "none", "0"};
    records.push_back(r);
  }
  const auto parsed = ParseScores(SerializeScores(records));
  const auto groups = GroupScores(parsed, AllScenarioFields());
  ASSERT_EQ(groups.size(), 3u);
  std::size_t total = 0;
  for (const auto& [k, v] : groups) total += v.size();
  EXPECT_EQ(total, records.size());
  EXPECT_EQ(groups.at("style=news|generator=m1|attack=none|hardness=0").size(), 2u);
}

}  // namespace
}  // namespace detectbench
