// src/features.cpp

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

#include "wsw/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string_view>
#include <unordered_set>

#include "csv_format.hpp"
#include "wsw/errors.hpp"

namespace wsw {

namespace {

bool takes_part(const Utterance& u) {
  return u.role != SpeakerRole::Other && u.word_count() > 0;
}

void require_duration(const Transcript& t) {
  if (!(t.meta.duration_minutes > 0.0)) {
    throw Error(ErrorCode::ZeroDuration, "recording " + t.meta.recording_id);
  }
}

// Calls on_link(target_index, response_index) for every response pair, in
// target-then-response transcript order.
template <typename OnLink>
void scan_responses(const Transcript& t, double window, OnLink&& on_link) {
  const auto& utts = t.utterances;
  std::vector<std::size_t> order;
  order.reserve(utts.size());
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (takes_part(utts[i])) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return utterance_before(utts[a], utts[b]);
  });

  for (std::size_t p = 0; p < order.size(); ++p) {
    const Utterance& target = utts[order[p]];
    const double limit = window + kTimeTolerance;
    // First candidate starting strictly after the target.
    auto q = std::upper_bound(order.begin() + static_cast<std::ptrdiff_t>(p) + 1, order.end(),
                              target.onset,
                              [&](double onset, std::size_t i) { return onset < utts[i].onset; });
    for (; q != order.end() && utts[*q].onset - target.offset <= limit; ++q) {
      if (utts[*q].role != target.role) on_link(order[p], *q);
    }
  }
}

std::size_t window_count(double duration_seconds, double window_seconds) {
  const double ratio = duration_seconds / window_seconds;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-9)));
}

}  // namespace

void check(const FeatureConfig& cfg) {
  if (!(cfg.response_window > 0.0) || !std::isfinite(cfg.response_window)) {
    throw Error(ErrorCode::InvalidConfig, "response_window must be > 0");
  }
  if (!(cfg.ld_window > 0.0) || !std::isfinite(cfg.ld_window)) {
    throw Error(ErrorCode::InvalidConfig, "ld_window must be > 0");
  }
}

std::optional<double> mlu(std::span<const Utterance> utterances) {
  std::size_t words = 0, count = 0;
  for (const auto& u : utterances) {
    if (u.word_count() == 0) continue;
    words += u.word_count();
    ++count;
  }
  if (count == 0) return std::nullopt;
  return static_cast<double>(words) / static_cast<double>(count);
}

std::optional<double> mlu(std::span<const Utterance* const> utterances) {
  std::size_t words = 0, count = 0;
  for (const auto* u : utterances) {
    if (u->word_count() == 0) continue;
    words += u->word_count();
    ++count;
  }
  if (count == 0) return std::nullopt;
  return static_cast<double>(words) / static_cast<double>(count);
}

double words_per_minute(const Transcript& transcript, SpeakerRole role) {
  require_duration(transcript);
  std::size_t words = 0;
  for (const auto& u : transcript.utterances) {
    if (u.role == role) words += u.word_count();
  }
  return static_cast<double>(words) / transcript.meta.duration_minutes;
}

std::vector<ResponseLink> detect_responses(const Transcript& transcript, double window) {
  std::vector<ResponseLink> links;
  const auto& utts = transcript.utterances;
  scan_responses(transcript, window, [&](std::size_t target, std::size_t response) {
    links.push_back({utts[target].id, utts[response].id,
                     utts[response].onset - utts[target].offset});
  });
  return links;
}

std::optional<double> response_proportion(std::size_t responded, std::size_t total) {
  if (responded > total) {
    throw Error(ErrorCode::InvalidCounts,
                std::to_string(responded) + " responded of " + std::to_string(total));
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(responded) / static_cast<double>(total);
}

double lexical_diversity_per_minute(const Transcript& transcript, SpeakerRole role,
                                    double window_seconds) {
  require_duration(transcript);
  if (!(window_seconds > 0.0)) throw Error(ErrorCode::InvalidConfig, "ld window must be > 0");
  const std::size_t windows =
      window_count(transcript.meta.duration_minutes * 60.0, window_seconds);

  std::size_t total_types = 0;
  std::size_t current = windows;  // no window open yet
  std::unordered_set<std::string_view> types;
  // Utterances are onset-sorted, so windows are visited in order.
  for (const auto& u : transcript.utterances) {
    if (u.role != role || u.word_count() == 0) continue;
    const auto bucket = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor(u.onset / window_seconds)), windows - 1);
    if (bucket != current) {
      total_types += types.size();
      types.clear();
      current = bucket;
    }
    for (const auto& tok : u.tokens) types.insert(tok);
  }
  total_types += types.size();
  const double mean_per_window = static_cast<double>(total_types) / static_cast<double>(windows);
  return mean_per_window * (60.0 / window_seconds);
}

double lexical_diversity_pooled(const Transcript& transcript, SpeakerRole role) {
  require_duration(transcript);
  std::unordered_set<std::string_view> types;
  for (const auto& u : transcript.utterances) {
    if (u.role != role) continue;
    for (const auto& tok : u.tokens) types.insert(tok);
  }
  return static_cast<double>(types.size()) / transcript.meta.duration_minutes;
}

FeatureSummary summarize(const Transcript& transcript, SpeakerRole role,
                         const FeatureConfig& cfg) {
  check(cfg);
  require_duration(transcript);
  const auto& utts = transcript.utterances;

  std::vector<bool> responded(utts.size(), false);
  scan_responses(transcript, cfg.response_window,
                 [&](std::size_t target, std::size_t) { responded[target] = true; });

  FeatureSummary s;
  s.role = role;
  s.duration_minutes = transcript.meta.duration_minutes;
  std::size_t words_q = 0, words_nq = 0;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const auto& u = utts[i];
    if (u.role != role || u.word_count() == 0) continue;
    ++s.n_utterances;
    if (u.question) {
      ++s.n_questions;
      words_q += u.word_count();
      if (responded[i]) ++s.n_responded_questions;
    } else {
      ++s.n_non_questions;
      words_nq += u.word_count();
      if (responded[i]) ++s.n_responded_non_questions;
    }
  }
  s.n_words = words_q + words_nq;

  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  const double minutes = s.duration_minutes;
  s.mlu_overall = ratio(s.n_words, s.n_utterances);
  s.mlu_question = ratio(words_q, s.n_questions);
  s.mlu_non_question = ratio(words_nq, s.n_non_questions);
  s.words_per_minute = static_cast<double>(s.n_words) / minutes;
  s.prop_responded_questions = response_proportion(s.n_responded_questions, s.n_questions);
  s.prop_responded_non_questions =
      response_proportion(s.n_responded_non_questions, s.n_non_questions);
  s.prop_responded_total =
      response_proportion(s.n_responded_questions + s.n_responded_non_questions, s.n_utterances);
  s.pct_questions = ratio(s.n_questions, s.n_utterances);
  s.questions_per_minute = static_cast<double>(s.n_questions) / minutes;
  s.non_questions_per_minute = static_cast<double>(s.n_non_questions) / minutes;
  s.responded_questions_per_minute = static_cast<double>(s.n_responded_questions) / minutes;
  s.lexical_diversity_per_minute = lexical_diversity_per_minute(transcript, role, cfg.ld_window);
  s.lexical_diversity_pooled = lexical_diversity_pooled(transcript, role);
  return s;
}

const std::vector<std::string>& feature_csv_columns() {
  static const std::vector<std::string> columns = {
      "recording_id",
      "source",
      "role",
      "duration_minutes",
      "n_words",
      "n_utterances",
      "n_questions",
      "n_non_questions",
      "mlu_overall",
      "mlu_question",
      "mlu_non_question",
      "words_per_minute",
      "n_responded_questions",
      "n_responded_non_questions",
      "prop_responded_questions",
      "prop_responded_non_questions",
      "prop_responded_total",
      "pct_questions",
      "questions_per_minute",
      "non_questions_per_minute",
      "responded_questions_per_minute",
      "lexical_diversity_per_minute",
      "lexical_diversity_pooled",
  };
  return columns;
}

void write_feature_csv_header(std::ostream& out) {
  const auto& cols = feature_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_feature_csv_row(std::ostream& out, const FeatureRow& row) {
  using detail::fixed3;
  const auto& s = row.summary;
  out << detail::csv_field(row.recording_id) << ',' << to_string(row.source) << ','
      << to_string(s.role) << ',' << fixed3(s.duration_minutes) << ',' << s.n_words << ','
      << s.n_utterances << ',' << s.n_questions << ',' << s.n_non_questions << ','
      << fixed3(s.mlu_overall) << ',' << fixed3(s.mlu_question) << ','
      << fixed3(s.mlu_non_question) << ',' << fixed3(s.words_per_minute) << ','
      << s.n_responded_questions << ',' << s.n_responded_non_questions << ','
      << fixed3(s.prop_responded_questions) << ',' << fixed3(s.prop_responded_non_questions)
      << ',' << fixed3(s.prop_responded_total) << ',' << fixed3(s.pct_questions) << ','
      << fixed3(s.questions_per_minute) << ',' << fixed3(s.non_questions_per_minute) << ','
      << fixed3(s.responded_questions_per_minute) << ','
      << fixed3(s.lexical_diversity_per_minute) << ',' << fixed3(s.lexical_diversity_pooled)
      << '\n';
}

}  // namespace wsw
