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

// Word segmentation over UTF-8 text.
//
// A word is a maximal run of word code points (letters, digits, and any
// non-ASCII code point outside the common punctuation/symbol blocks), where a
// single apostrophe or hyphen between two word code points stays inside the
// word ("state-of-the-art", "don't"). Everything between words is kept
// verbatim as a gap so text can be rebuilt byte-for-byte.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace detectbench {

struct Token {
  std::string surface;
  std::string key;  // casefolded form used for every statistic
};

// Text split into words plus the inter-word gaps. gaps.size() is always
// words.size() + 1; gaps[i] precedes words[i] and gaps.back() trails.
struct Segmentation {
  std::vector<Token> words;
  std::vector<std::string> gaps;
};

namespace internal {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
};

// Invalid sequences decode as U+FFFD with length 1.
inline CodePoint DecodeUtf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > s.size()) return {0xFFFD, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

inline void EncodeUtf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool IsWordCodePoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  if (cp <= 0xBF) return false;                  // Latin-1 punctuation, NBSP
  if (cp == 0xD7 || cp == 0xF7) return false;    // multiplication, division
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp == 0xFEFF || cp == 0xFFFD) return false;
  return true;
}

inline bool IsJoiner(char32_t cp) {
  return cp == '\'' || cp == '-' || cp == 0x2019;
}

// Simple case folding: ASCII, Latin-1, Latin Extended-A pairs, Greek and
// Cyrillic basic blocks. Other code points pass through unchanged.
inline char32_t FoldCodePoint(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp == 0x130 || cp == 0x131) return cp;
  if (cp == 0x178) return 0xFF;
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

}  // namespace internal

inline std::string Casefold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto cp = internal::DecodeUtf8(text, pos);
    if (cp.value == 0xFFFD && cp.length == 1 &&
        static_cast<unsigned char>(text[pos]) >= 0x80) {
      out.push_back(text[pos]);  // keep invalid bytes untouched
    } else {
      internal::EncodeUtf8(internal::FoldCodePoint(cp.value), out);
    }
    pos += cp.length;
  }
  return out;
}

inline Segmentation Segment(std::string_view text) {
  Segmentation seg;
  std::string gap;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto cp = internal::DecodeUtf8(text, pos);
    if (!internal::IsWordCodePoint(cp.value)) {
      gap.append(text.substr(pos, cp.length));
      pos += cp.length;
      continue;
    }
    const std::size_t start = pos;
    std::size_t end = pos;
    while (end < text.size()) {
      const auto c = internal::DecodeUtf8(text, end);
      if (internal::IsWordCodePoint(c.value)) {
        end += c.length;
        continue;
      }
      if (internal::IsJoiner(c.value) && end + c.length < text.size()) {
        const auto next = internal::DecodeUtf8(text, end + c.length);
        if (internal::IsWordCodePoint(next.value)) {
          end += c.length;
          continue;
        }
      }
      break;
    }
    seg.gaps.push_back(std::move(gap));
    gap.clear();
    std::string surface(text.substr(start, end - start));
    std::string key = Casefold(surface);
    seg.words.push_back({std::move(surface), std::move(key)});
    pos = end;
  }
  seg.gaps.push_back(std::move(gap));
  return seg;
}

inline std::vector<Token> Tokenize(std::string_view text) {
  return Segment(text).words;
}

inline std::string Join(const Segmentation& seg) {
  std::string out = seg.gaps.front();
  for (std::size_t i = 0; i < seg.words.size(); ++i) {
    out += seg.words[i].surface;
    out += seg.gaps[i + 1];
  }
  return out;
}

// True when `text` is exactly one word with no surrounding characters.
inline bool IsSingleWord(std::string_view text) {
  const Segmentation seg = Segment(text);
  return seg.words.size() == 1 && seg.gaps.front().empty() &&
         seg.gaps.back().empty();
}

}  // namespace detectbench
