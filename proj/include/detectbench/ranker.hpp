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

// Word-level mutual information between word identity and authorship, and
// the split of the vocabulary into AI-associated and human-associated sets.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "detectbench/error.hpp"
#include "detectbench/io.hpp"
#include "detectbench/text.hpp"
#include "json.hpp"

namespace detectbench {

struct VocabStats {
  std::map<std::string, std::uint64_t> count_h;
  std::map<std::string, std::uint64_t> count_a;
  std::uint64_t total_h = 0;
  std::uint64_t total_a = 0;
  double smoothing_alpha = 0.5;
  std::uint64_t min_count = 5;

  std::uint64_t CountH(const std::string& w) const {
    auto it = count_h.find(w);
    return it == count_h.end() ? 0 : it->second;
  }
  std::uint64_t CountA(const std::string& w) const {
    auto it = count_a.find(w);
    return it == count_a.end() ? 0 : it->second;
  }
  double PriorAi() const {
    return static_cast<double>(total_a) /
           static_cast<double>(total_h + total_a);
  }
  double PriorHuman() const {
    return static_cast<double>(total_h) /
           static_cast<double>(total_h + total_a);
  }
  // Smoothed P(ai | w).
  double ConditionalAi(const std::string& w) const {
    const double ca = static_cast<double>(CountA(w));
    const double ch = static_cast<double>(CountH(w));
    return (ca + smoothing_alpha) / (ca + ch + 2.0 * smoothing_alpha);
  }
  double ConditionalHuman(const std::string& w) const {
    const double ca = static_cast<double>(CountA(w));
    const double ch = static_cast<double>(CountH(w));
    return (ch + smoothing_alpha) / (ca + ch + 2.0 * smoothing_alpha);
  }
};

struct RankedVocab {
  std::map<std::string, double> ai_set;
  std::map<std::string, double> human_set;
  std::uint64_t min_count = 5;
  double alpha = 0.5;
  std::string human_fingerprint;
  std::string ai_fingerprint;

  bool empty() const { return ai_set.empty() && human_set.empty(); }

  std::optional<double> AiScore(const std::string& key) const {
    auto it = ai_set.find(key);
    if (it == ai_set.end()) return std::nullopt;
    return it->second;
  }
  std::optional<double> HumanScore(const std::string& key) const {
    auto it = human_set.find(key);
    if (it == human_set.end()) return std::nullopt;
    return it->second;
  }
};

namespace internal {

inline void AddCounts(std::string_view text,
                      std::map<std::string, std::uint64_t>& counts,
                      std::uint64_t& total) {
  for (auto& tok : Tokenize(text)) {
    ++counts[tok.key];
    ++total;
  }
}

}  // namespace internal

inline VocabStats BuildVocabStats(std::span<const std::string> human_docs,
                                  std::span<const std::string> ai_docs,
                                  double alpha = 0.5,
                                  std::uint64_t min_count = 5) {
  if (alpha < 0.0 || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidKnob, "alpha must be non-negative");
  }
  VocabStats stats;
  stats.smoothing_alpha = alpha;
  stats.min_count = min_count;
  for (const auto& d : human_docs) {
    internal::AddCounts(d, stats.count_h, stats.total_h);
  }
  for (const auto& d : ai_docs) {
    internal::AddCounts(d, stats.count_a, stats.total_a);
  }
  if (stats.total_h == 0 || stats.total_a == 0) {
    throw Error(ErrorCode::kEmptyCorpus,
                stats.total_h == 0 ? "human corpus has no words"
                                   : "ai corpus has no words");
  }
  return stats;
}

// MI(w) = sum over x in {human, ai} of P(x, w) ln(P(x|w) / P(x)), with
// P(x, w) = P(x|w) P(w) and P(w) the pooled token frequency of w.
inline double MutualInformation(const VocabStats& stats,
                                const std::string& word) {
  const std::uint64_t ch = stats.CountH(word);
  const std::uint64_t ca = stats.CountA(word);
  if (ch + ca == 0) throw Error(ErrorCode::kUnknownWord, word);
  const double p_w = static_cast<double>(ch + ca) /
                     static_cast<double>(stats.total_h + stats.total_a);
  auto term = [p_w](double cond, double prior) {
    if (cond <= 0.0) return 0.0;
    return p_w * cond * std::log(cond / prior);
  };
  return term(stats.ConditionalHuman(word), stats.PriorHuman()) +
         term(stats.ConditionalAi(word), stats.PriorAi());
}

// Words seen at least min_count times go to the AI set when their relative
// frequency is higher in the AI corpus, to the human set when lower, and to
// neither on an exact tie.
inline RankedVocab Partition(const VocabStats& stats) {
  RankedVocab out;
  out.min_count = stats.min_count;
  out.alpha = stats.smoothing_alpha;
  std::map<std::string, bool> words;
  for (const auto& [w, c] : stats.count_h) words.emplace(w, true);
  for (const auto& [w, c] : stats.count_a) words.emplace(w, true);
  for (const auto& [w, unused] : words) {
    const std::uint64_t ch = stats.CountH(w);
    const std::uint64_t ca = stats.CountA(w);
    if (ch + ca < stats.min_count) continue;
    // ca / total_a vs ch / total_h, cross-multiplied.
    const auto lhs = static_cast<unsigned __int128>(ca) * stats.total_h;
    const auto rhs = static_cast<unsigned __int128>(ch) * stats.total_a;
    if (lhs == rhs) continue;
    const double mi = MutualInformation(stats, w);
    (lhs > rhs ? out.ai_set : out.human_set).emplace(w, mi);
  }
  return out;
}

// On-disk layout: ai_set.tsv and human_set.tsv (word<TAB>score per line,
// sorted by word) plus vocab.json with the build parameters.
inline std::string SerializeVocabSet(const std::map<std::string, double>& set) {
  std::string out;
  for (const auto& [w, s] : set) {
    out += w;
    out += '\t';
    out += FormatDouble(s);
    out += '\n';
  }
  return out;
}

inline std::string VocabFingerprint(const RankedVocab& vocab) {
  return Sha256Hex(SerializeVocabSet(vocab.ai_set) + "\x1e" +
                   SerializeVocabSet(vocab.human_set));
}

inline void SaveRankedVocab(const std::filesystem::path& dir,
                            const RankedVocab& vocab) {
  WriteFileAtomic(dir / "ai_set.tsv", SerializeVocabSet(vocab.ai_set));
  WriteFileAtomic(dir / "human_set.tsv", SerializeVocabSet(vocab.human_set));
  nlohmann::ordered_json meta;
  meta["schema_version"] = 1;
  meta["alpha"] = vocab.alpha;
  meta["min_count"] = vocab.min_count;
  meta["human_fingerprint"] = vocab.human_fingerprint;
  meta["ai_fingerprint"] = vocab.ai_fingerprint;
  meta["ai_set_size"] = vocab.ai_set.size();
  meta["human_set_size"] = vocab.human_set.size();
  meta["vocab_fingerprint"] = VocabFingerprint(vocab);
  WriteFileAtomic(dir / "vocab.json", meta.dump(2) + "\n");
}

namespace internal {

inline std::map<std::string, double> ParseVocabSet(
    const std::string& content, const std::string& name) {
  std::map<std::string, double> out;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kSchemaViolation,
                  name + " line " + std::to_string(lineno) + ": missing tab");
    }
    const std::string score = line.substr(tab + 1);
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(score.data(), score.data() + score.size(), value);
    if (ec != std::errc() || ptr != score.data() + score.size()) {
      throw Error(ErrorCode::kSchemaViolation,
                  name + " line " + std::to_string(lineno) + ": bad score");
    }
    out.emplace(line.substr(0, tab), value);
  }
  return out;
}

}  // namespace internal

inline RankedVocab LoadRankedVocab(const std::filesystem::path& dir) {
  RankedVocab vocab;
  vocab.ai_set =
      internal::ParseVocabSet(ReadFile(dir / "ai_set.tsv"), "ai_set.tsv");
  vocab.human_set =
      internal::ParseVocabSet(ReadFile(dir / "human_set.tsv"), "human_set.tsv");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ReadFile(dir / "vocab.json"));
    vocab.alpha = meta.at("alpha").get<double>();
    vocab.min_count = meta.at("min_count").get<std::uint64_t>();
    vocab.human_fingerprint = meta.value("human_fingerprint", "");
    vocab.ai_fingerprint = meta.value("ai_fingerprint", "");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("vocab.json: ") + e.what());
  }
  return vocab;
}

}  // namespace detectbench
