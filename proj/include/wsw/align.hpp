// include/wsw/align.hpp

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
#include <limits>
#include <optional>
#include <vector>

#include "wsw/confusion.hpp"
#include "wsw/transcript.hpp"

namespace wsw {

struct AlignConfig {
  double gap_penalty = 0.05;        // cost of leaving one utterance unmatched
  double min_iou = 0.10;            // demotion threshold on time overlap...
  double min_similarity = 0.20;     // ...and on text similarity (both must fail)
  double similarity_weight = 0.5;   // score = w*text + (1-w)*time
  // Only pairs whose intervals come within this many seconds of each other
  // are candidates for matching. Infinity searches every monotone matching.
  double search_window = 30.0;
};

/// Throws InvalidConfig when a parameter is out of range.
void check(const AlignConfig& cfg);

/// |intersection| / |union| of the two closed time intervals. Two identical
/// zero-length intervals have IoU 1.
double time_iou(const Utterance& a, const Utterance& b);

/// 1 - LD / max(word counts), clamped to [0, 1]; 1 when both are empty.
double text_similarity(const Utterance& a, const Utterance& b);

struct AlignedPair {
  Utterance machine;
  Utterance expert;
  double time_iou = 0.0;
  double text_similarity = 0.0;

  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

enum class AlignMethod { Index, Time };

struct AlignedCorpus {
  RecordingMeta meta;
  AlignMethod method = AlignMethod::Time;
  std::vector<AlignedPair> pairs;       // monotone in both onsets
  std::vector<Utterance> machine_only;  // residues, in transcript order
  std::vector<Utterance> expert_only;
  // Objective value of the matching before low-quality pairs are demoted.
  // Zero for index alignment.
  double score = 0.0;

  friend bool operator==(const AlignedCorpus&, const AlignedCorpus&) = default;
};

/// Pairs expert rows with the machine segment named by their machine_id.
/// Unknown or repeated ids send the expert row to expert_only, unreferenced
/// machine segments go to machine_only. Links that cross each other are
/// resolved by keeping the largest non-crossing subset, so the result is
/// monotone. Throws NotLinked unless `expert.linked`.
AlignedCorpus align_by_index(const Transcript& machine, const Transcript& expert);

/// Global monotone one-to-one matching maximizing
///   sum over pairs of score(pair) - gap_penalty * (unmatched utterances)
/// with score = w * text_similarity + (1 - w) * time_iou. Pairs with
/// time_iou < min_iou and text_similarity < min_similarity are demoted to
/// the residue lists after the optimum is found.
AlignedCorpus align_by_time(const Transcript& machine, const Transcript& expert,
                            const AlignConfig& cfg = {});

/// Index alignment when the expert transcript is linked, time alignment
/// otherwise.
AlignedCorpus align(const Transcript& machine, const Transcript& expert,
                    const AlignConfig& cfg = {});

/// Pair score used by align_by_time.
double pair_score(const Utterance& machine, const Utterance& expert, const AlignConfig& cfg);

/// Whether align_by_time may pair the two utterances under cfg.search_window.
bool within_search_window(const Utterance& a, const Utterance& b, const AlignConfig& cfg);

/// 2x2 teacher/child counts over pairs (rows expert, columns machine).
/// Pairs involving Other are counted in excluded_other; residue sizes are
/// copied into residue_machine / residue_expert.
ConfusionMatrix cross_classify(const AlignedCorpus& corpus);

/// Audit trail: one JSON object per pair
///   {"machine_id", "expert_id", "machine_role", "expert_role", "time_iou",
///    "text_similarity"}
/// followed by one {"machine_id"} or {"expert_id"} line per residue with
/// "matched": false.
void write_aligned(std::ostream& out, const AlignedCorpus& corpus);

}  // namespace wsw
