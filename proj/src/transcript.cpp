// src/transcript.cpp

// Copyright 2026  The wsw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "wsw/transcript.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "wsw/errors.hpp"

namespace wsw {

std::string_view to_string(SpeakerRole role) {
  switch (role) {
    case SpeakerRole::Teacher: return "teacher";
    case SpeakerRole::Child: return "child";
    case SpeakerRole::Other: return "other";
  }
  return "other";
}

std::string_view to_string(Source source) {
  return source == Source::Machine ? "machine" : "expert";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' ||
                        s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           auto lx = (x >= 'A' && x <= 'Z') ? char(x - 'A' + 'a') : x;
           auto ly = (y >= 'A' && y <= 'Z') ? char(y - 'A' + 'a') : y;
           return lx == ly;
         });
}

inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

// Three-byte UTF-8 punctuation in the U+2000 block that gets folded before
// the byte-level pass. Returns the replacement byte (0 when not folded).
char fold_general_punctuation(unsigned char b1, unsigned char b2) {
  if (b1 != 0x80) return 0;
  switch (b2) {
    case 0x98:  // left single quotation mark
    case 0x99:  // right single quotation mark
      return '\'';
    case 0x93:  // en dash
    case 0x94:  // em dash
    case 0x9c:  // left double quotation mark
    case 0x9d:  // right double quotation mark
    case 0xa6:  // horizontal ellipsis
      return ' ';
    default:
      return 0;
  }
}

std::string strip_and_fold(std::string_view raw,
                           const std::vector<std::pair<char, char>>& brackets) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    bool stripped = false;
    for (const auto& [open, close] : brackets) {
      if (c != open) continue;
      const auto end = raw.find(close, i + 1);
      if (end != std::string_view::npos) {
        out.push_back(' ');
        i = end;
        stripped = true;
      }
      break;
    }
    if (stripped) continue;
    if (static_cast<unsigned char>(c) == 0xe2 && i + 2 < raw.size()) {
      const char folded = fold_general_punctuation(static_cast<unsigned char>(raw[i + 1]),
                                                   static_cast<unsigned char>(raw[i + 2]));
      if (folded != 0) {
        out.push_back(folded);
        i += 2;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::optional<SpeakerRole> parse_role(std::string_view label) {
  label = trim(label);
  if (iequals(label, "teacher")) return SpeakerRole::Teacher;
  if (iequals(label, "child")) return SpeakerRole::Child;
  if (iequals(label, "other")) return SpeakerRole::Other;
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view label) {
  label = trim(label);
  if (iequals(label, "machine")) return Source::Machine;
  if (iequals(label, "expert")) return Source::Expert;
  return std::nullopt;
}

TextNormalizer::TextNormalizer() : strip_brackets_{{'[', ']'}, {'<', '>'}} {}

TextNormalizer::TextNormalizer(std::vector<std::pair<char, char>> strip_brackets)
    : strip_brackets_(std::move(strip_brackets)) {}

std::string TextNormalizer::operator()(std::string_view raw_text) const {
  const std::string text = strip_and_fold(raw_text, strip_brackets_);
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      out.push_back((c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : char(c));
    } else if (c == '-') {
      // joins the two halves of a hyphenated word
    } else if (c == '\'') {
      const bool after_word = !out.empty() && out.back() != ' ' && out.back() != '\'';
      const bool before_word =
          i + 1 < text.size() && is_word_byte(static_cast<unsigned char>(text[i + 1]));
      if (after_word && before_word) out.push_back('\'');
      else if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else if (!out.empty() && out.back() != ' ') {
      out.push_back(' ');
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

const TextNormalizer& default_normalizer() {
  static const TextNormalizer normalizer;
  return normalizer;
}

std::string normalize(std::string_view raw_text) { return default_normalizer()(raw_text); }

std::vector<std::string> tokenize(std::string_view normalized_text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= normalized_text.size()) {
    auto end = normalized_text.find(' ', start);
    if (end == std::string_view::npos) end = normalized_text.size();
    if (end > start) tokens.emplace_back(normalized_text.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

bool is_question(std::string_view raw_text) {
  return raw_text.find('?') != std::string_view::npos;
}

Utterance make_utterance(std::string id, double onset, double offset, std::string raw_text,
                         SpeakerRole role, Source source, const TextNormalizer& normalizer) {
  if (!std::isfinite(onset) || !std::isfinite(offset) || onset < 0.0 || offset < onset) {
    throw Error(ErrorCode::InvalidTimestamps,
                "utterance " + id + ": onset " + std::to_string(onset) + ", offset " +
                    std::to_string(offset));
  }
  Utterance u;
  u.id = std::move(id);
  u.onset = onset;
  u.offset = offset;
  u.question = is_question(raw_text);
  u.tokens = tokenize(normalizer(raw_text));
  u.raw_text = std::move(raw_text);
  u.role = role;
  u.source = source;
  return u;
}

bool utterance_before(const Utterance& a, const Utterance& b) {
  return std::tie(a.onset, a.offset, a.id) < std::tie(b.onset, b.offset, b.id);
}

void Transcript::sort() { std::stable_sort(utterances.begin(), utterances.end(), utterance_before); }

}  // namespace wsw
