// include/wsw/features.hpp

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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsw/transcript.hpp"

namespace wsw {

inline constexpr double kDefaultResponseWindow = 2.5;  // seconds after target offset
inline constexpr double kDefaultLexicalWindow = 60.0;  // seconds
// Slack on the response-window end so that latencies landing exactly on the
// window survive rounding after a time translation.
inline constexpr double kTimeTolerance = 1e-6;  // seconds

struct FeatureConfig {
  double response_window = kDefaultResponseWindow;
  double ld_window = kDefaultLexicalWindow;
};

/// Throws InvalidConfig unless both windows are positive and finite.
void check(const FeatureConfig& cfg);

/// A partner utterance that responds to `target`.
struct ResponseLink {
  std::string target_id;
  std::string response_id;
  double latency = 0.0;  // response onset - target offset; negative on overlap

  friend bool operator==(const ResponseLink&, const ResponseLink&) = default;
  friend auto operator<=>(const ResponseLink&, const ResponseLink&) = default;
};

/// Mean words per utterance over utterances with at least one word;
/// nullopt when there are none.
std::optional<double> mlu(std::span<const Utterance> utterances);
std::optional<double> mlu(std::span<const Utterance* const> utterances);

/// Words spoken by `role` per minute of recording. Throws ZeroDuration.
double words_per_minute(const Transcript& transcript, SpeakerRole role);

/// Every teacher/child pair (U, V) with role(V) != role(U), V starting
/// strictly after U starts and no later than U.offset + window (latency
/// compared with kTimeTolerance slack). Utterances
/// without words and Other-role utterances take no part. Links are ordered
/// by target, then by response, in transcript order.
std::vector<ResponseLink> detect_responses(const Transcript& transcript,
                                           double window = kDefaultResponseWindow);

/// responded / total; nullopt when total == 0. Throws InvalidCounts when
/// responded > total.
std::optional<double> response_proportion(std::size_t responded, std::size_t total);

/// Mean over fixed onset-bucketed windows covering [0, duration) of the
/// number of distinct word types `role` produced in the window, scaled to a
/// per-minute rate. Silent windows count as zero. An utterance starting at
/// or past the end of the recording is counted in the last window.
/// Throws ZeroDuration.
double lexical_diversity_per_minute(const Transcript& transcript, SpeakerRole role,
                                    double window_seconds = kDefaultLexicalWindow);

/// Distinct word types over the whole recording divided by its minutes.
double lexical_diversity_pooled(const Transcript& transcript, SpeakerRole role);

struct FeatureSummary {
  SpeakerRole role = SpeakerRole::Teacher;
  double duration_minutes = 0.0;
  std::size_t n_words = 0;
  std::size_t n_utterances = 0;  // utterances with at least one word
  std::size_t n_questions = 0;
  std::size_t n_non_questions = 0;
  std::optional<double> mlu_overall;
  std::optional<double> mlu_question;
  std::optional<double> mlu_non_question;
  double words_per_minute = 0.0;
  // Own utterances that drew at least one partner response.
  std::size_t n_responded_questions = 0;
  std::size_t n_responded_non_questions = 0;
  std::optional<double> prop_responded_questions;
  std::optional<double> prop_responded_non_questions;
  std::optional<double> prop_responded_total;
  std::optional<double> pct_questions;
  double questions_per_minute = 0.0;
  double non_questions_per_minute = 0.0;
  // Own questions that drew a partner response, per minute.
  double responded_questions_per_minute = 0.0;
  double lexical_diversity_per_minute = 0.0;
  double lexical_diversity_pooled = 0.0;

  friend bool operator==(const FeatureSummary&, const FeatureSummary&) = default;
};

/// The whole feature battery for one role. Throws ZeroDuration.
FeatureSummary summarize(const Transcript& transcript, SpeakerRole role,
                         const FeatureConfig& cfg = {});

/// Column order of the per-recording feature CSV.
const std::vector<std::string>& feature_csv_columns();

struct FeatureRow {
  std::string recording_id;
  Source source = Source::Machine;
  FeatureSummary summary;

  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

/// One CSV row in feature_csv_columns() order; ratios rounded to 3
/// decimals, absent values left empty.
void write_feature_csv_header(std::ostream& out);
void write_feature_csv_row(std::ostream& out, const FeatureRow& row);

}  // namespace wsw
