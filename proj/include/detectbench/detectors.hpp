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

// Zero-shot detector scoring functions over a token-probability provider, a
// small add-one n-gram model that serves as the built-in provider, and the
// score-file format through which external detectors are ingested.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "detectbench/error.hpp"
#include "detectbench/io.hpp"
#include "detectbench/metrics.hpp"
#include "json.hpp"

namespace detectbench {

struct TokenStat {
  double logprob = 0.0;    // natural log, <= 0
  std::uint64_t rank = 1;  // 1 + number of strictly more probable words
};

class TokenProbProvider {
 public:
  virtual ~TokenProbProvider() = default;
  virtual std::vector<TokenStat> Score(
      std::span<const std::string> tokens) const = 0;
};

// Add-one smoothed n-gram model over word keys. Contexts are padded with
// n-1 begin-of-document markers. Words outside the training vocabulary are
// scored as zero-count entries of their context.
class NGramModel : public TokenProbProvider {
 public:
  static constexpr std::string_view kBos = "<s>";

  static NGramModel Train(std::span<const std::vector<std::string>> corpus,
                          int order) {
    if (order < 1) throw Error(ErrorCode::kInvalidKnob, "order must be >= 1");
    NGramModel model;
    model.order_ = order;
    std::set<std::string> vocab;
    for (const auto& doc : corpus) {
      for (std::size_t i = 0; i < doc.size(); ++i) {
        vocab.insert(doc[i]);
        Context& ctx = model.contexts_[model.ContextKey(doc, i)];
        ++ctx.counts[doc[i]];
        ++ctx.total;
      }
    }
    if (vocab.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training tokens");
    model.vocab_.assign(vocab.begin(), vocab.end());
    for (auto& [key, ctx] : model.contexts_) {
      for (const auto& [w, c] : ctx.counts) ctx.sorted_counts.push_back(c);
      std::sort(ctx.sorted_counts.begin(), ctx.sorted_counts.end());
    }
    return model;
  }

  int order() const { return order_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  // P(word | the order-1 words preceding position `i` of `tokens`).
  double Probability(std::span<const std::string> tokens, std::size_t i,
                     const std::string& word) const {
    return std::exp(Stat(tokens, i, word).logprob);
  }

  std::vector<TokenStat> Score(
      std::span<const std::string> tokens) const override {
    std::vector<TokenStat> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      out.push_back(Stat(tokens, i, tokens[i]));
    }
    return out;
  }

 private:
  struct Context {
    std::unordered_map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
    std::vector<std::uint64_t> sorted_counts;  // ascending, non-zero only
  };

  std::string ContextKey(std::span<const std::string> tokens,
                         std::size_t i) const {
    std::string key;
    for (int back = order_ - 1; back >= 1; --back) {
      if (i >= static_cast<std::size_t>(back)) {
        key += tokens[i - back];
      } else {
        key += kBos;
      }
      key += '\x1f';
    }
    return key;
  }

  TokenStat Stat(std::span<const std::string> tokens, std::size_t i,
                 const std::string& word) const {
    const double v = static_cast<double>(vocab_.size());
    auto it = contexts_.find(ContextKey(tokens, i));
    if (it == contexts_.end()) return {-std::log(v), 1};
    const Context& ctx = it->second;
    auto wc = ctx.counts.find(word);
    const std::uint64_t c = wc == ctx.counts.end() ? 0 : wc->second;
    const auto higher = static_cast<std::uint64_t>(
        ctx.sorted_counts.end() -
        std::upper_bound(ctx.sorted_counts.begin(), ctx.sorted_counts.end(), c));
    const double p =
        (static_cast<double>(c) + 1.0) / (static_cast<double>(ctx.total) + v);
    return {std::log(p), 1 + higher};
  }

  int order_ = 1;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, Context> contexts_;
};

enum class DetectorMethod { kLogLikelihood, kRank, kLogRank, kLrr };

inline const char* DetectorMethodName(DetectorMethod m) {
  switch (m) {
    case DetectorMethod::kLogLikelihood: return "log_likelihood";
    case DetectorMethod::kRank: return "rank";
    case DetectorMethod::kLogRank: return "log_rank";
    case DetectorMethod::kLrr: return "lrr";
  }
  return "?";
}

inline DetectorMethod ParseDetectorMethod(std::string_view name) {
  if (name == "log_likelihood") return DetectorMethod::kLogLikelihood;
  if (name == "rank") return DetectorMethod::kRank;
  if (name == "log_rank") return DetectorMethod::kLogRank;
  if (name == "lrr") return DetectorMethod::kLrr;
  throw Error(ErrorCode::kSchemaViolation,
              "unknown detector '" + std::string(name) + "'");
}

// Per-token scores, oriented so that higher means more AI-like:
//   log_likelihood  mean log p
//   rank            -mean rank
//   log_rank        -mean ln rank
//   lrr             -sum log p / sum ln rank
inline double DetectorScore(DetectorMethod method,
                            std::span<const std::string> tokens,
                            const TokenProbProvider& provider) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "no tokens");
  const auto stats = provider.Score(tokens);
  const double n = static_cast<double>(stats.size());
  double sum_logp = 0.0;
  double sum_rank = 0.0;
  double sum_log_rank = 0.0;
  for (const auto& s : stats) {
    sum_logp += s.logprob;
    sum_rank += static_cast<double>(s.rank);
    sum_log_rank += std::log(static_cast<double>(s.rank));
  }
  switch (method) {
    case DetectorMethod::kLogLikelihood:
      return sum_logp / n;
    case DetectorMethod::kRank:
      return -sum_rank / n;
    case DetectorMethod::kLogRank:
      return -sum_log_rank / n;
    case DetectorMethod::kLrr:
      if (sum_log_rank == 0.0) {
        throw Error(ErrorCode::kDegenerateRanks, "every token has rank 1");
      }
      return -sum_logp / sum_log_rank;
  }
  return 0.0;
}

struct Scenario {
  std::string style;
  std::string generator;
  std::string attack;
  std::string hardness;

  const std::string& Field(std::string_view name) const {
    if (name == "style") return style;
    if (name == "generator") return generator;
    if (name == "attack") return attack;
    if (name == "hardness") return hardness;
    throw Error(ErrorCode::kSchemaViolation,
                "unknown scenario field '" + std::string(name) + "'");
  }
};

struct ScoreRecord {
  std::string id;
  double score = 0.0;
  Label label = Label::kHuman;
  std::string detector;
  Scenario scenario;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

inline const char* LabelName(Label l) {
  return l == Label::kAi ? "ai" : "human";
}

inline nlohmann::ordered_json ScoreRecordToJson(const ScoreRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["score"] = r.score;
  j["label"] = LabelName(r.label);
  j["detector"] = r.detector;
  j["scenario"] = {{"style", r.scenario.style},
                   {"generator", r.scenario.generator},
                   {"attack", r.scenario.attack},
                   {"hardness", r.scenario.hardness}};
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

inline std::string SerializeScores(std::span<const ScoreRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += ScoreRecordToJson(r).dump();
    out += '\n';
  }
  return out;
}

// One JSON object per line; blank lines are skipped. Line numbers in errors
// are 1-based.
inline std::vector<ScoreRecord> ParseScores(std::string_view content) {
  std::vector<ScoreRecord> out;
  std::istringstream in{std::string(content)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation, where + ": " + e.what());
    }
    if (!j.is_object()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": not an object");
    }
    auto require_string = [&](const nlohmann::ordered_json& obj,
                              const char* key) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        throw Error(ErrorCode::kSchemaViolation,
                    where + ": field '" + key + "' must be a string");
      }
      return obj[key].get<std::string>();
    };
    ScoreRecord r;
    r.id = require_string(j, "id");
    if (!j.contains("score") || !j["score"].is_number()) {
      throw Error(ErrorCode::kSchemaViolation,
                  where + ": field 'score' must be a number");
    }
    r.score = j["score"].get<double>();
    if (!std::isfinite(r.score)) {
      throw Error(ErrorCode::kNonFiniteScore, where);
    }
    const std::string label = require_string(j, "label");
    if (label == "human") {
      r.label = Label::kHuman;
    } else if (label == "ai") {
      r.label = Label::kAi;
    } else {
      throw Error(ErrorCode::kUnknownLabel, where + ": '" + label + "'");
    }
    r.detector = require_string(j, "detector");
    if (!j.contains("scenario") || !j["scenario"].is_object()) {
      throw Error(ErrorCode::kSchemaViolation,
                  where + ": field 'scenario' must be an object");
    }
    const auto& sc = j["scenario"];
    r.scenario.style = require_string(sc, "style");
    r.scenario.generator = require_string(sc, "generator");
    r.scenario.attack = require_string(sc, "attack");
    r.scenario.hardness = require_string(sc, "hardness");
    for (const auto& [k, v] : j.items()) {
      if (k != "id" && k != "score" && k != "label" && k != "detector" &&
          k != "scenario") {
        r.extra[k] = v;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ScoreRecord> IngestScores(const std::filesystem::path& path) {
  return ParseScores(ReadFile(path));
}

// Scenario key for grouping, e.g. "generator=m1|style=news".
inline std::string ScenarioKey(const Scenario& s,
                               std::span<const std::string> fields) {
  std::string key;
  for (const auto& f : fields) {
    if (!key.empty()) key += '|';
    key += f;
    key += '=';
    key += s.Field(f);
  }
  return key;
}

inline std::map<std::string, std::vector<ScoredSample>> GroupScores(
    std::span<const ScoreRecord> records,
    std::span<const std::string> fields) {
  std::map<std::string, std::vector<ScoredSample>> groups;
  for (const auto& r : records) {
    groups[ScenarioKey(r.scenario, fields)].push_back({r.score, r.label});
  }
  return groups;
}

inline const std::vector<std::string>& AllScenarioFields() {
  static const std::vector<std::string> kFields = {"style", "generator",
                                                   "attack", "hardness"};
  return kFields;
}

}  // namespace detectbench
