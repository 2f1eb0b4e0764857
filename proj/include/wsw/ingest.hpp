// include/wsw/ingest.hpp

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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsw/transcript.hpp"

namespace wsw {

/// Machine transcripts are line-delimited JSON, one segment per line:
///
///   {"start": 0.0, "end": 1.2, "text": "Sunny.", "speaker": "child"}
///
/// `confidence` (a number in [0, 1]) is the only optional key; any other
/// key is a MalformedRecord. Blank lines are skipped but still counted, so
/// utterance ids are the 1-based physical line numbers.
Transcript parse_machine(std::istream& in, RecordingMeta meta,
                         const TextNormalizer& normalizer = default_normalizer());

/// Writes the transcript in the machine format, in utterance order.
void write_machine(std::ostream& out, const Transcript& transcript);

inline constexpr double kLinkedRowFraction = 0.9;

/// Expert annotations are a delimiter-separated table with a header row
/// naming at least start, end, speaker and text (any order); a machine_id
/// column links rows to machine segment ids. Fields may be double-quoted
/// with "" as the escaped quote. Utterance ids are 1-based data-row numbers.
///
/// The transcript is flagged `linked` when a non-empty machine_id is present
/// on at least kLinkedRowFraction of the rows.
Transcript parse_expert(std::istream& in, RecordingMeta meta, char delimiter = '\t',
                        const TextNormalizer& normalizer = default_normalizer());

void write_expert(std::ostream& out, const Transcript& transcript, char delimiter = '\t');

/// Metadata sidecar: {recording_id, wearer_role, classroom_id, academic_year,
/// duration_minutes}. Throws MalformedRecord on missing keys or a
/// non-positive duration.
RecordingMeta parse_meta(std::istream& in);
void write_meta(std::ostream& out, const RecordingMeta& meta);

RecordingMeta load_meta(const std::filesystem::path& path);
Transcript load_machine(const std::filesystem::path& path, RecordingMeta meta,
                        const TextNormalizer& normalizer = default_normalizer());
Transcript load_expert(const std::filesystem::path& path, RecordingMeta meta,
                       char delimiter = '\t',
                       const TextNormalizer& normalizer = default_normalizer());

enum class WarningKind { Overlap, PastDuration, ZeroWords };

std::string_view to_string(WarningKind kind);

struct Warning {
  WarningKind kind;
  std::string utterance_id;
  std::string other_id;  // the earlier utterance, for Overlap
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

/// Seconds an utterance may run past the recorded duration before a
/// PastDuration warning is raised.
inline constexpr double kDurationToleranceSeconds = 1.0;

/// Non-fatal checks, in utterance order:
///  - Overlap: the utterance starts strictly before the latest-ending earlier
///    utterance of the same role has finished (one warning per utterance,
///    naming that earlier utterance);
///  - PastDuration: offset beyond duration + kDurationToleranceSeconds;
///  - ZeroWords: nothing left after normalization.
std::vector<Warning> validate(const Transcript& transcript);

}  // namespace wsw
