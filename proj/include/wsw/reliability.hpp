// include/wsw/reliability.hpp

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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsw/align.hpp"
#include "wsw/confusion.hpp"
#include "wsw/edit_distance.hpp"
#include "wsw/transcript.hpp"

namespace wsw {

/// Word error rate of one hypothesis against one reference utterance.
///
///   both present  -> LD / reference words (LD / hypothesis words when the
///                    reference has none; 0 when both are empty)
///   hyp absent    -> 1.0, every reference word is missed
///   ref absent    -> 1.0, every hypothesis word is an insertion
///
/// Pass nullptr for an absent side. Throws BothAbsent.
double utterance_wer(const Utterance* hyp, const Utterance* ref);

/// Running sum of per-utterance WERs. Merging tallies and then taking the
/// mean equals the mean over the union of utterances.
struct WerTally {
  double sum = 0.0;
  std::size_t count = 0;

  void add(double wer) {
    sum += wer;
    ++count;
  }
  WerTally& operator+=(const WerTally& other) {
    sum += other.sum;
    count += other.count;
    return *this;
  }
  std::optional<double> mean() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
  friend bool operator==(const WerTally&, const WerTally&) = default;
};

/// Per-utterance WERs for `role` in one aligned recording: every pair whose
/// expert side has that role, plus expert residues of that role and machine
/// residues the machine labelled with that role, the residues at 1.0.
/// With `wearer_match` set, recordings whose wearer is not `role` contribute
/// nothing.
WerTally wer_tally(const AlignedCorpus& corpus, SpeakerRole role, bool wearer_match);

/// Mean per-utterance WER over the selected utterances of every recording.
/// Throws EmptySelection when nothing is selected.
double corpus_wer(std::span<const AlignedCorpus> recordings, SpeakerRole role,
                  bool wearer_match);

/// sum(v_i * d_i) / sum(d_i) over the present values. Throws LengthMismatch
/// and ZeroTotalWeight (no present value carries positive weight).
double time_weighted_mean(std::span<const std::optional<double>> values,
                          std::span<const double> durations);

struct IccResult {
  double value = 0.0;
  std::size_t rows = 0;
  // Every cell held the same value; the coefficient is 1 by convention.
  bool zero_variance = false;
};

/// Two-way, absolute-agreement, single-measure intraclass correlation for
/// n recordings rated by two raters (machine, expert):
///
///   (MSR - MSE) / (MSR + (k - 1) MSE + (k / n) (MSC - MSE)),  k = 2
///
/// with MSR, MSC and MSE the row, column and residual mean squares of the
/// two-way ANOVA. Throws TooFewRows when n < 2.
IccResult icc_absolute(std::span<const std::array<double, 2>> ratings);

struct IccEntry {
  std::optional<double> value;  // absent when fewer than 2 complete rows
  std::size_t rows = 0;
  std::size_t dropped = 0;  // rows with a missing side
  bool zero_variance = false;

  friend bool operator==(const IccEntry&, const IccEntry&) = default;
};

/// icc_absolute after dropping rows where either side is missing.
IccEntry icc_pairwise(std::span<const std::array<std::optional<double>, 2>> ratings);

/// Metrics reported per recording and for the corpus aggregates.
struct ReliabilityMetrics {
  std::optional<double> f1_weighted;
  std::optional<double> accuracy;
  std::optional<double> kappa;
  std::optional<double> wer_teacher;
  std::optional<double> wer_child;

  friend bool operator==(const ReliabilityMetrics&, const ReliabilityMetrics&) = default;
};

/// Confusion metrics (nullopt on an empty matrix) with the given WERs.
ReliabilityMetrics metrics_from(const ConfusionMatrix& m, std::optional<double> wer_teacher,
                                std::optional<double> wer_child);

/// Everything measured on one machine/expert recording pair.
struct RecordingReliability {
  RecordingMeta meta;
  AlignMethod method = AlignMethod::Time;
  std::size_t pairs = 0;
  ConfusionMatrix confusion;
  WerTally wer_teacher;
  WerTally wer_child;
  ReliabilityMetrics metrics;

  friend bool operator==(const RecordingReliability&, const RecordingReliability&) = default;
};

RecordingReliability assess(const AlignedCorpus& corpus, bool wearer_match);

struct ReliabilityReport {
  std::map<std::string, RecordingReliability> per_recording;  // by recording_id
  ReliabilityMetrics overall;        // pooled counts and utterances
  ReliabilityMetrics time_weighted;  // per-recording values weighted by minutes
  ConfusionMatrix pooled;
  std::map<std::string, IccEntry> iccs;  // "<role>.<feature>" -> ICC

  friend bool operator==(const ReliabilityReport&, const ReliabilityReport&) = default;
};

/// Fills overall, time_weighted and pooled from per_recording.
void aggregate(ReliabilityReport& report);

}  // namespace wsw
