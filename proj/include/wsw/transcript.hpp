// include/wsw/transcript.hpp

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wsw {

enum class SpeakerRole : std::uint8_t { Teacher, Child, Other };
enum class Source : std::uint8_t { Machine, Expert };

std::string_view to_string(SpeakerRole role);
std::string_view to_string(Source source);

/// Accepts "teacher", "child" or "other", case-insensitively, with
/// surrounding whitespace ignored. Anything else yields nullopt.
std::optional<SpeakerRole> parse_role(std::string_view label);
std::optional<Source> parse_source(std::string_view label);

/// Text normalization for word counting.
///
/// Annotation spans delimited by any of `strip_brackets` (by default
/// "[...]" and "<...>") are removed first. The remaining text is lower-cased
/// (ASCII), hyphens are deleted so hyphenated compounds become one word,
/// apostrophes survive only between two word characters, and every other
/// punctuation character acts as a word separator. Runs of whitespace
/// collapse to a single space with no leading or trailing space.
///
/// Bytes >= 0x80 are treated as word characters so UTF-8 letters pass
/// through untouched; the typographic apostrophe U+2019 is folded to '\''.
class TextNormalizer {
 public:
  TextNormalizer();
  explicit TextNormalizer(std::vector<std::pair<char, char>> strip_brackets);

  std::string operator()(std::string_view raw_text) const;

  const std::vector<std::pair<char, char>>& strip_brackets() const {
    return strip_brackets_;
  }

 private:
  std::vector<std::pair<char, char>> strip_brackets_;
};

const TextNormalizer& default_normalizer();

std::string normalize(std::string_view raw_text);
std::vector<std::string> tokenize(std::string_view normalized_text);

/// True iff the raw (pre-normalization) text contains a '?' anywhere.
bool is_question(std::string_view raw_text);

struct Utterance {
  std::string id;
  double onset = 0.0;   // seconds from recording start
  double offset = 0.0;  // seconds, >= onset
  std::string raw_text;
  std::vector<std::string> tokens;
  SpeakerRole role = SpeakerRole::Other;
  Source source = Source::Machine;
  bool question = false;
  std::optional<double> confidence;
  // Expert rows that edited a copy of the machine transcript carry the id of
  // the machine segment they correspond to.
  std::optional<std::string> linked_machine_id;

  std::size_t word_count() const { return tokens.size(); }
  double duration() const { return offset - onset; }

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// Builds an utterance, deriving tokens and the question flag from
/// `raw_text`. Throws Error(InvalidTimestamps) when offset < onset or either
/// timestamp is negative or not finite.
Utterance make_utterance(std::string id, double onset, double offset,
                         std::string raw_text, SpeakerRole role, Source source,
                         const TextNormalizer& normalizer = default_normalizer());

struct RecordingMeta {
  std::string recording_id;
  SpeakerRole wearer_role = SpeakerRole::Other;
  std::string classroom_id;
  std::string academic_year;
  double duration_minutes = 0.0;

  friend bool operator==(const RecordingMeta&, const RecordingMeta&) = default;
};

/// Total order used for every transcript: onset, then offset, then id.
bool utterance_before(const Utterance& a, const Utterance& b);

struct Transcript {
  RecordingMeta meta;
  Source source = Source::Machine;
  std::vector<Utterance> utterances;  // sorted by utterance_before
  // Set by the expert parser when machine ids are present on >= 90% of rows.
  bool linked = false;

  void sort();

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

}  // namespace wsw
