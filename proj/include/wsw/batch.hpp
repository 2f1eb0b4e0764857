// include/wsw/batch.hpp

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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wsw/align.hpp"
#include "wsw/features.hpp"
#include "wsw/reliability.hpp"
#include "wsw/transcript.hpp"

namespace wsw {

namespace fs = std::filesystem;

struct ManifestEntry {
  std::string recording_id;
  fs::path machine_path;
  std::optional<fs::path> expert_path;
  fs::path meta_path;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;  // sorted by recording_id, ids unique
};

/// File names used when scanning a directory tree: every
/// "<id>.meta.json" must sit next to "<id>.machine.jsonl"; a sibling
/// "<id>.expert.tsv" is optional.
inline constexpr const char* kMetaSuffix = ".meta.json";
inline constexpr const char* kMachineSuffix = ".machine.jsonl";
inline constexpr const char* kExpertSuffix = ".expert.tsv";

/// Scans `root` recursively without opening any transcript. Throws
/// MissingFile (meta without machine transcript), DuplicateRecording or
/// EmptyCorpus.
CorpusManifest discover(const fs::path& root);

/// Reads an explicit manifest: a JSON array (or {"recordings": [...]}) of
/// {recording_id, machine_path, meta_path[, expert_path]}, relative paths
/// resolved against the manifest's directory. Every referenced file must
/// exist (MissingFile).
CorpusManifest load_manifest(const fs::path& manifest_path);

struct RunConfig {
  AlignConfig align;
  FeatureConfig features;
  fs::path output_dir = "wsw-out";
  unsigned workers = 1;
  // Restrict WER to recordings whose wearer has the scored role.
  bool wer_wearer_match = true;
  char expert_delimiter = '\t';
};

/// Throws InvalidConfig.
void check(const RunConfig& cfg);

/// Keys mirror the struct: {"align": {...}, "response_window", "ld_window",
/// "output_dir", "workers", "wer_wearer_match", "expert_delimiter"}; absent
/// keys keep their defaults.
RunConfig load_run_config(const fs::path& path);

struct EntryError {
  std::string recording_id;
  std::string code;
  std::string message;

  friend bool operator==(const EntryError&, const EntryError&) = default;
};

struct RecordingResult {
  RecordingMeta meta;
  std::size_t machine_utterances = 0;
  std::size_t expert_utterances = 0;
  std::size_t warnings = 0;
  // machine teacher, machine child, then expert teacher, expert child
  std::vector<FeatureRow> features;
  std::optional<RecordingReliability> reliability;

  friend bool operator==(const RecordingResult&, const RecordingResult&) = default;
};

/// Pooled feature counts and ratios for one (group, source, role). `group` is
/// "all" or "<academic_year>/<classroom_id>".
struct AggregateRow {
  std::string group;
  Source source = Source::Machine;
  SpeakerRole role = SpeakerRole::Teacher;
  std::size_t recordings = 0;
  double minutes = 0.0;
  std::size_t words = 0;
  std::size_t utterances = 0;
  std::size_t questions = 0;
  std::size_t non_questions = 0;
  std::size_t responded_questions = 0;
  std::size_t responded_non_questions = 0;
  std::optional<double> mlu;
  std::optional<double> words_per_minute;
  std::optional<double> prop_responded_questions;
  std::optional<double> prop_responded_non_questions;
  std::optional<double> pct_questions_pooled;
  std::optional<double> pct_questions_mean;  // mean of per-recording ratios
  std::optional<double> lexical_diversity_per_minute;  // minute-weighted mean
  std::optional<double> teacher_child_utterance_ratio;

  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

struct CorpusTotals {
  std::size_t recordings = 0;
  double hours = 0.0;
  std::size_t machine_utterances = 0;
  std::size_t expert_utterances = 0;

  friend bool operator==(const CorpusTotals&, const CorpusTotals&) = default;
};

struct PipelineResult {
  std::vector<RecordingResult> recordings;  // successful entries, manifest order
  std::vector<EntryError> errors;           // failed entries, manifest order
  ReliabilityReport reliability;
  std::vector<AggregateRow> aggregate;
  CorpusTotals totals;

  friend bool operator==(const PipelineResult&, const PipelineResult&) = default;
};

/// ingest -> features (-> align -> reliability when an expert file exists)
/// for one manifest entry. Throws on any failure.
RecordingResult process_recording(const ManifestEntry& entry, const RunConfig& cfg);

/// Processes entries on cfg.workers threads, one recording in memory per
/// worker, and merges results in manifest order. Failing entries land in
/// `errors`; the run continues.
PipelineResult run_pipeline(const CorpusManifest& manifest, const RunConfig& cfg);

/// Names of the per-role features compared by ICC, as "<role>.<feature>".
const std::vector<std::string>& icc_feature_names();

/// Rebuilds aggregate rows, totals and the corpus-level reliability figures
/// from `recordings`.
void finalize(PipelineResult& result);

}  // namespace wsw
