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

// Humanification: masked-word substitution strategies that rewrite
// AI-generated text toward human word usage.
//
//   Rmm  random non-stop-word positions, first differing candidate.
//   Aws  positions ranked by AI-set MI, candidates chosen by human-set MI.
//   Rhl  Aws applied for R rounds at a fixed per-round proportion.
//
// Strategies are pure functions of (document, knob, seed, provider, vocab).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "detectbench/error.hpp"
#include "detectbench/io.hpp"
#include "detectbench/ranker.hpp"
#include "detectbench/text.hpp"
#include "json.hpp"

namespace detectbench {

inline constexpr std::string_view kMaskToken = "<mask>";
inline constexpr std::size_t kDefaultTopK = 50;

class StopWords {
 public:
  StopWords() = default;
  explicit StopWords(const std::vector<std::string>& words) {
    for (const auto& w : words) words_.insert(Casefold(w));
  }

  // One word per line; blank lines and lines starting with '#' are ignored.
  static StopWords Parse(std::string_view content) {
    std::vector<std::string> words;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
        line.pop_back();
      }
      if (line.empty() || line.front() == '#') continue;
      words.push_back(line);
    }
    StopWords out(words);
    out.hash_ = Sha256Hex(content);
    return out;
  }

  static StopWords Load(const std::filesystem::path& path) {
    return Parse(ReadFile(path));
  }

  bool contains(const std::string& key) const { return words_.count(key) > 0; }
  std::size_t size() const { return words_.size(); }
  // sha256 of the source file content; empty when built from a word list.
  const std::string& content_hash() const { return hash_; }

 private:
  std::unordered_set<std::string> words_;
  std::string hash_;
};

struct DocumentMeta {
  std::string id;
  std::string label;
  std::string style;
  std::string generator;
  std::string attack;
  std::string hardness;
  // Unrecognised corpus fields, carried through unchanged.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

struct Document {
  Segmentation text;
  DocumentMeta meta;

  static Document FromText(std::string_view text, DocumentMeta meta = {}) {
    return {Segment(text), std::move(meta)};
  }
  std::size_t size() const { return text.words.size(); }
};

enum class EditReason { kReplaced, kSkippedNoCandidate, kFallbackTopRank };

inline const char* EditReasonName(EditReason r) {
  switch (r) {
    case EditReason::kReplaced: return "replaced";
    case EditReason::kSkippedNoCandidate: return "skipped-no-candidate";
    case EditReason::kFallbackTopRank: return "fallback-top-rank";
  }
  return "?";
}

inline EditReason ParseEditReason(std::string_view name) {
  if (name == "replaced") return EditReason::kReplaced;
  if (name == "skipped-no-candidate") return EditReason::kSkippedNoCandidate;
  if (name == "fallback-top-rank") return EditReason::kFallbackTopRank;
  throw Error(ErrorCode::kSchemaViolation,
              "unknown edit reason '" + std::string(name) + "'");
}

struct TraceEntry {
  std::size_t position = 0;
  std::string original;     // surface form before the edit
  std::string replacement;  // surface form written; empty when skipped
  EditReason reason = EditReason::kReplaced;
  int round = 1;

  bool operator==(const TraceEntry&) const = default;
};

struct EditedDocument {
  Segmentation text;
  DocumentMeta meta;
  std::vector<TraceEntry> trace;
  int rounds = 0;

  std::size_t size() const { return text.words.size(); }
};

inline std::string Detokenize(const EditedDocument& edited) {
  return Join(edited.text);
}

enum class Strategy { kRmm, kAws, kRhl };

struct MaskPlan {
  std::vector<std::size_t> positions;  // ascending
  Strategy strategy = Strategy::kRmm;
  double knob = 0.0;
};

// Text with some words replaced by kMaskToken, as sent to a provider.
struct MaskedText {
  std::string text;
  std::vector<std::string> tokens;           // word keys, masks as kMaskToken
  std::vector<std::size_t> mask_positions;   // ascending word indices
};

struct Candidate {
  std::string word;
  double score = 0.0;
};

// Returns, for each mask in document order, candidates ordered by descending
// preference. Implementations must be safe to call concurrently.
class MaskFillProvider {
 public:
  virtual ~MaskFillProvider() = default;
  virtual std::vector<std::vector<Candidate>> Fill(const MaskedText& masked,
                                                   std::size_t top_k) const = 0;
  // Identifies the provider's behaviour for cache keys.
  virtual std::string Fingerprint() const = 0;
};

inline MaskedText MakeMaskedText(const Segmentation& seg,
                                 const std::vector<std::size_t>& positions) {
  MaskedText out;
  out.mask_positions = positions;
  out.tokens.reserve(seg.words.size());
  std::size_t next = 0;
  out.text = seg.gaps.front();
  for (std::size_t i = 0; i < seg.words.size(); ++i) {
    const bool masked = next < positions.size() && positions[next] == i;
    if (masked) ++next;
    out.tokens.emplace_back(masked ? std::string(kMaskToken) : seg.words[i].key);
    out.text += masked ? std::string(kMaskToken) : seg.words[i].surface;
    out.text += seg.gaps[i + 1];
  }
  return out;
}

// Deterministic provider for tests and offline runs: each mask receives a
// pseudo-random selection from a fixed word pool, seeded by the keys of the
// surrounding words (masks included) and top_k.
class StubMaskFillProvider : public MaskFillProvider {
 public:
  explicit StubMaskFillProvider(std::vector<std::string> pool,
                                std::size_t window = 2)
      : pool_(std::move(pool)), window_(window) {
    std::sort(pool_.begin(), pool_.end());
    pool_.erase(std::unique(pool_.begin(), pool_.end()), pool_.end());
    if (pool_.empty()) {
      throw Error(ErrorCode::kEmptyVocab, "stub provider needs a word pool");
    }
  }

  std::vector<std::vector<Candidate>> Fill(const MaskedText& masked,
                                           std::size_t top_k) const override {
    std::vector<std::vector<Candidate>> out;
    const std::size_t want = std::min(top_k, pool_.size());
    for (std::size_t pos : masked.mask_positions) {
      std::uint64_t h = Fnv1a64(std::to_string(top_k));
      const std::size_t lo = pos >= window_ ? pos - window_ : 0;
      const std::size_t hi = std::min(masked.tokens.size(), pos + window_ + 1);
      for (std::size_t i = lo; i < hi; ++i) {
        h = Fnv1a64(masked.tokens[i], h);
        h = Fnv1a64("\x1f", h);
      }
      std::vector<Candidate> list;
      std::set<std::size_t> used;
      for (std::uint64_t j = 0; list.size() < want; ++j) {
        const std::size_t idx = SplitMix(h + j) % pool_.size();
        if (!used.insert(idx).second) continue;
        list.push_back({pool_[idx], 1.0 / static_cast<double>(list.size() + 1)});
      }
      out.push_back(std::move(list));
    }
    return out;
  }

  std::string Fingerprint() const override {
    std::string joined;
    for (const auto& w : pool_) {
      joined += w;
      joined += '\n';
    }
    return "stub:w" + std::to_string(window_) + ":" + Sha256Hex(joined);
  }

 private:
  static std::uint64_t SplitMix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::vector<std::string> pool_;
  std::size_t window_;
};

inline std::vector<std::size_t> SelectNonStop(const Segmentation& seg,
                                              const StopWords& stopwords) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seg.words.size(); ++i) {
    if (!stopwords.contains(seg.words[i].key)) out.push_back(i);
  }
  return out;
}

inline std::vector<std::size_t> SelectNonStop(const Document& doc,
                                              const StopWords& stopwords) {
  return SelectNonStop(doc.text, stopwords);
}

// floor(p * n), tolerant of products such as 0.29 * 100 landing a hair
// below an integer.
inline std::size_t MaskBudget(double p, std::size_t n) {
  const double raw = p * static_cast<double>(n);
  const auto count = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return std::min(count, n);
}

// Copies the capitalisation pattern of `original` onto `replacement_key`:
// all caps (two or more letters), initial capital, or lowercase.
inline std::string TransferCase(std::string_view original,
                                std::string_view replacement_key) {
  int upper = 0;
  int lower = 0;
  bool first_upper = false;
  bool first_seen = false;
  for (std::size_t pos = 0; pos < original.size();) {
    const auto cp = internal::DecodeUtf8(original, pos);
    pos += cp.length;
    const char32_t folded = internal::FoldCodePoint(cp.value);
    const bool is_upper = folded != cp.value;
    const bool is_lower = !is_upper && internal::IsWordCodePoint(cp.value) &&
                          !(cp.value >= '0' && cp.value <= '9');
    if (!first_seen && (is_upper || is_lower)) {
      first_seen = true;
      first_upper = is_upper;
    }
    upper += is_upper;
    lower += is_lower;
  }
  auto to_upper = [](char32_t cp) -> char32_t {
    if (cp >= 'a' && cp <= 'z') return cp - 32;
    if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 32;
    return cp;
  };
  const bool all_caps = upper >= 2 && lower == 0;
  std::string out;
  bool first = true;
  for (std::size_t pos = 0; pos < replacement_key.size();) {
    const auto cp = internal::DecodeUtf8(replacement_key, pos);
    char32_t v = cp.value;
    if (all_caps || (first_upper && first)) v = to_upper(v);
    if (cp.value == 0xFFFD && cp.length == 1) {
      out.push_back(replacement_key[pos]);
    } else {
      internal::EncodeUtf8(v, out);
    }
    first = false;
    pos += cp.length;
  }
  return out;
}

struct HumanifyOptions {
  std::size_t top_k = kDefaultTopK;
  StopWords stopwords;
};

namespace internal {

inline std::vector<std::vector<Candidate>> CallProvider(
    const Segmentation& seg, const std::vector<std::size_t>& positions,
    const MaskFillProvider& provider, std::size_t top_k,
    const std::string& doc_id) {
  const MaskedText masked = MakeMaskedText(seg, positions);
  std::vector<std::vector<Candidate>> lists;
  auto context = [&] {
    std::string s = "document '" + doc_id + "' positions [";
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(positions[i]);
    }
    return s + "]";
  };
  try {
    lists = provider.Fill(masked, top_k);
  } catch (const Error& e) {
    throw Error(ErrorCode::kProviderFailure,
                context() + ": " + std::string(e.what()));
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kProviderFailure,
                context() + ": " + std::string(e.what()));
  }
  if (lists.size() != positions.size()) {
    throw Error(ErrorCode::kProviderFailure,
                context() + ": expected " + std::to_string(positions.size()) +
                    " candidate lists, got " + std::to_string(lists.size()));
  }
  for (auto& l : lists) {
    if (l.size() > top_k) l.resize(top_k);
  }
  return lists;
}

// Candidate keys usable as a substitute for `original_key`: a single word
// token that differs from the original under casefolding.
inline std::vector<std::string> UsableCandidates(
    const std::vector<Candidate>& list, const std::string& original_key) {
  std::vector<std::string> out;
  for (const auto& c : list) {
    if (!IsSingleWord(c.word)) continue;
    std::string key = Casefold(c.word);
    if (key == original_key) continue;
    out.push_back(std::move(key));
  }
  return out;
}

inline void Substitute(Segmentation& seg, std::size_t position,
                       const std::string& key, EditReason reason, int round,
                       std::vector<TraceEntry>& trace) {
  Token& tok = seg.words[position];
  TraceEntry e;
  e.position = position;
  e.original = tok.surface;
  e.reason = reason;
  e.round = round;
  e.replacement = TransferCase(tok.surface, key);
  tok.surface = e.replacement;
  tok.key = Casefold(tok.surface);
  trace.push_back(std::move(e));
}

inline void Skip(const Segmentation& seg, std::size_t position, int round,
                 std::vector<TraceEntry>& trace) {
  trace.push_back({position, seg.words[position].surface, "",
                   EditReason::kSkippedNoCandidate, round});
}

inline void CheckFraction(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidKnob,
                std::string(what) + " must be within [0, 1]");
  }
}

inline std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection sampling; std::uniform_int_distribution is not specified to be
  // identical across standard libraries.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// One AI-flagged swap round over `seg`, appending to `trace`.
inline void AwsRound(Segmentation& seg, double p,
                     const MaskFillProvider& provider,
                     const RankedVocab& vocab, const HumanifyOptions& options,
                     const std::string& doc_id, int round,
                     std::vector<TraceEntry>& trace) {
  std::vector<std::size_t> nonstop = SelectNonStop(seg, options.stopwords);
  const std::size_t budget = MaskBudget(p, nonstop.size());
  if (budget == 0) return;

  struct Ranked {
    bool in_ai;
    double score;
    const std::string* key;
    std::size_t position;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(nonstop.size());
  for (std::size_t pos : nonstop) {
    const auto s = vocab.AiScore(seg.words[pos].key);
    ranked.push_back({s.has_value(), s.value_or(0.0), &seg.words[pos].key, pos});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.in_ai != b.in_ai) return a.in_ai;
    if (a.in_ai && a.score != b.score) return a.score > b.score;
    if (*a.key != *b.key) return *a.key < *b.key;
    return a.position < b.position;
  });
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < budget; ++i) positions.push_back(ranked[i].position);
  std::sort(positions.begin(), positions.end());

  const auto lists =
      CallProvider(seg, positions, provider, options.top_k, doc_id);
  for (std::size_t m = 0; m < positions.size(); ++m) {
    const std::size_t pos = positions[m];
    const auto usable = UsableCandidates(lists[m], seg.words[pos].key);
    const std::string* best = nullptr;
    double best_score = 0.0;
    for (const auto& key : usable) {
      const auto s = vocab.HumanScore(key);
      if (s && (best == nullptr || *s > best_score)) {
        best = &key;
        best_score = *s;
      }
    }
    if (best != nullptr) {
      Substitute(seg, pos, *best, EditReason::kReplaced, round, trace);
    } else if (!usable.empty()) {
      Substitute(seg, pos, usable.front(), EditReason::kFallbackTopRank, round,
                 trace);
    } else {
      Skip(seg, pos, round, trace);
    }
  }
}

}  // namespace internal

// Random meaning-preserving mutation: floor(p * |S|) non-stop positions drawn
// uniformly without replacement, all masked in one provider call, each
// replaced by its first candidate that differs from the original word.
inline EditedDocument Rmm(const Document& doc, double p,
                          const MaskFillProvider& provider, std::uint64_t seed,
                          const HumanifyOptions& options = {}) {
  internal::CheckFraction(p, "p");
  EditedDocument out{doc.text, doc.meta, {}, 1};
  std::vector<std::size_t> pool = SelectNonStop(doc.text, options.stopwords);
  const std::size_t budget = MaskBudget(p, pool.size());
  if (budget == 0) return out;

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t j = i + internal::UniformBelow(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> positions(pool.begin(), pool.begin() + budget);
  std::sort(positions.begin(), positions.end());

  const auto lists = internal::CallProvider(doc.text, positions, provider,
                                            options.top_k, doc.meta.id);
  for (std::size_t m = 0; m < positions.size(); ++m) {
    const std::size_t pos = positions[m];
    const auto usable =
        internal::UsableCandidates(lists[m], out.text.words[pos].key);
    if (usable.empty()) {
      internal::Skip(out.text, pos, 1, out.trace);
    } else {
      internal::Substitute(out.text, pos, usable.front(), EditReason::kReplaced,
                           1, out.trace);
    }
  }
  return out;
}

// AI-flagged word swap: the floor(p * |S|) non-stop words with the highest
// AI-set MI are masked (words outside the AI set rank last; ties by word, then
// position); each is replaced by the candidate with the highest human-set MI.
// Without a human-set candidate the first differing candidate is used.
inline EditedDocument Aws(const Document& doc, double p,
                          const MaskFillProvider& provider,
                          const RankedVocab& vocab,
                          const HumanifyOptions& options = {}) {
  internal::CheckFraction(p, "p");
  if (vocab.empty()) throw Error(ErrorCode::kEmptyVocab, "ranked vocab is empty");
  EditedDocument out{doc.text, doc.meta, {}, 1};
  internal::AwsRound(out.text, p, provider, vocab, options, doc.meta.id, 1,
                     out.trace);
  return out;
}

// Recursive humanification: `rounds` AWS rounds at proportion p0, each
// re-deriving the non-stop set and MI ordering from the previous round's text.
inline EditedDocument Rhl(const Document& doc, int rounds, double p0,
                          const MaskFillProvider& provider,
                          const RankedVocab& vocab,
                          const HumanifyOptions& options = {}) {
  if (rounds < 0) throw Error(ErrorCode::kInvalidKnob, "rounds must be >= 0");
  internal::CheckFraction(p0, "p0");
  if (vocab.empty()) throw Error(ErrorCode::kEmptyVocab, "ranked vocab is empty");
  EditedDocument out{doc.text, doc.meta, {}, rounds};
  for (int r = 1; r <= rounds; ++r) {
    internal::AwsRound(out.text, p0, provider, vocab, options, doc.meta.id, r,
                       out.trace);
  }
  return out;
}

}  // namespace detectbench
