// src/batch.cpp

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

#include "wsw/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <thread>
#include <tuple>
#include <utility>

#include <nlohmann/json.hpp>

#include "wsw/errors.hpp"
#include "wsw/ingest.hpp"

namespace wsw {

namespace {

using nlohmann::json;

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                suffix.data(), suffix.size()) == 0;
}

void sort_and_check_unique(CorpusManifest& manifest) {
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.recording_id < b.recording_id;
            });
  for (std::size_t i = 1; i < manifest.entries.size(); ++i) {
    if (manifest.entries[i].recording_id == manifest.entries[i - 1].recording_id) {
      throw Error(ErrorCode::DuplicateRecording, manifest.entries[i].recording_id);
    }
  }
  if (manifest.entries.empty()) throw Error(ErrorCode::EmptyCorpus, "no recordings found");
}

void require_file(const fs::path& path, const std::string& id) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, id + ": " + path.string());
  }
}

const json* find_key(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

template <typename T>
void read_into(const json& obj, const char* key, T& dst) {
  if (const json* v = find_key(obj, key)) {
    try {
      dst = v->get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string(key) + ": " + e.what());
    }
  }
}

}  // namespace

CorpusManifest discover(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::MissingFile, root.string());

  CorpusManifest manifest;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator();
       ++it) {
    if (!it->is_regular_file()) continue;
    const std::string name = it->path().filename().string();
    if (!ends_with(name, kMetaSuffix)) continue;

    ManifestEntry entry;
    entry.recording_id = name.substr(0, name.size() - std::string_view(kMetaSuffix).size());
    entry.meta_path = it->path();
    const fs::path dir = it->path().parent_path();
    entry.machine_path = dir / (entry.recording_id + kMachineSuffix);
    require_file(entry.machine_path, entry.recording_id);
    const fs::path expert = dir / (entry.recording_id + kExpertSuffix);
    if (fs::is_regular_file(expert, ec)) entry.expert_path = expert;
    manifest.entries.push_back(std::move(entry));
  }
  sort_and_check_unique(manifest);
  return manifest;
}

CorpusManifest load_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::MissingFile, manifest_path.string());
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(ErrorCode::MalformedRecord, manifest_path.string());
  const json* list = &doc;
  if (doc.is_object()) list = find_key(doc, "recordings");
  if (list == nullptr || !list->is_array()) {
    throw Error(ErrorCode::MalformedRecord, "manifest has no recordings array");
  }

  const fs::path base = manifest_path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  CorpusManifest manifest;
  for (const auto& item : *list) {
    if (!item.is_object()) throw Error(ErrorCode::MalformedRecord, "manifest entry");
    ManifestEntry entry;
    try {
      entry.recording_id = item.at("recording_id").get<std::string>();
      entry.machine_path = resolve(item.at("machine_path").get<std::string>());
      entry.meta_path = resolve(item.at("meta_path").get<std::string>());
      if (const json* e = find_key(item, "expert_path")) {
        entry.expert_path = resolve(e->get<std::string>());
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, std::string("manifest entry: ") + e.what());
    }
    require_file(entry.machine_path, entry.recording_id);
    require_file(entry.meta_path, entry.recording_id);
    if (entry.expert_path) require_file(*entry.expert_path, entry.recording_id);
    manifest.entries.push_back(std::move(entry));
  }
  sort_and_check_unique(manifest);
  return manifest;
}

void check(const RunConfig& cfg) {
  check(cfg.align);
  check(cfg.features);
  if (cfg.workers == 0) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::InvalidConfig, path.string() + " is not a JSON object");
  }
  RunConfig cfg;
  if (const json* a = find_key(doc, "align")) {
    read_into(*a, "gap_penalty", cfg.align.gap_penalty);
    read_into(*a, "min_iou", cfg.align.min_iou);
    read_into(*a, "min_similarity", cfg.align.min_similarity);
    read_into(*a, "similarity_weight", cfg.align.similarity_weight);
    if (const json* w = find_key(*a, "search_window")) {
      // JSON has no infinity; "inf" or a negative number disables the window.
      if (w->is_string() && w->get<std::string>() == "inf") {
        cfg.align.search_window = std::numeric_limits<double>::infinity();
      } else {
        read_into(*a, "search_window", cfg.align.search_window);
        if (cfg.align.search_window < 0.0)
          cfg.align.search_window = std::numeric_limits<double>::infinity();
      }
    }
  }
  read_into(doc, "response_window", cfg.features.response_window);
  read_into(doc, "ld_window", cfg.features.ld_window);
  read_into(doc, "workers", cfg.workers);
  read_into(doc, "wer_wearer_match", cfg.wer_wearer_match);
  if (const json* o = find_key(doc, "output_dir")) cfg.output_dir = o->get<std::string>();
  if (const json* d = find_key(doc, "expert_delimiter")) {
    const auto s = d->get<std::string>();
    if (s.size() != 1) throw Error(ErrorCode::InvalidConfig, "expert_delimiter must be 1 char");
    cfg.expert_delimiter = s[0];
  }
  check(cfg);
  return cfg;
}

RecordingResult process_recording(const ManifestEntry& entry, const RunConfig& cfg) {
  RecordingResult result;
  RecordingMeta meta = load_meta(entry.meta_path);
  if (meta.recording_id != entry.recording_id) {
    throw Error(ErrorCode::MalformedRecord, "metadata names recording '" + meta.recording_id +
                                                "', expected '" + entry.recording_id + "'");
  }
  result.meta = meta;

  const Transcript machine = load_machine(entry.machine_path, meta);
  result.machine_utterances = machine.utterances.size();
  result.warnings += validate(machine).size();
  for (SpeakerRole role : {SpeakerRole::Teacher, SpeakerRole::Child}) {
    result.features.push_back(
        {meta.recording_id, Source::Machine, summarize(machine, role, cfg.features)});
  }

  if (entry.expert_path) {
    const Transcript expert = load_expert(*entry.expert_path, meta, cfg.expert_delimiter);
    result.expert_utterances = expert.utterances.size();
    result.warnings += validate(expert).size();
    for (SpeakerRole role : {SpeakerRole::Teacher, SpeakerRole::Child}) {
      result.features.push_back(
          {meta.recording_id, Source::Expert, summarize(expert, role, cfg.features)});
    }
    const AlignedCorpus corpus = align(machine, expert, cfg.align);
    result.reliability = assess(corpus, cfg.wer_wearer_match);
  }
  return result;
}

const std::vector<std::string>& icc_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const char* role : {"teacher", "child"}) {
      for (const char* feature :
           {"questions_per_minute", "non_questions_per_minute",
            "responded_questions_per_minute", "prop_responded_total", "mlu_overall",
            "mlu_question", "mlu_non_question", "words_per_minute",
            "lexical_diversity_per_minute"}) {
        out.push_back(std::string(role) + "." + feature);
      }
    }
    return out;
  }();
  return names;
}

namespace {

std::optional<double> feature_value(const FeatureSummary& s, std::string_view feature) {
  if (feature == "questions_per_minute") return s.questions_per_minute;
  if (feature == "non_questions_per_minute") return s.non_questions_per_minute;
  if (feature == "responded_questions_per_minute") return s.responded_questions_per_minute;
  if (feature == "prop_responded_total") return s.prop_responded_total;
  if (feature == "mlu_overall") return s.mlu_overall;
  if (feature == "mlu_question") return s.mlu_question;
  if (feature == "mlu_non_question") return s.mlu_non_question;
  if (feature == "words_per_minute") return s.words_per_minute;
  if (feature == "lexical_diversity_per_minute") return s.lexical_diversity_per_minute;
  return std::nullopt;
}

const FeatureSummary* find_summary(const RecordingResult& r, Source source, SpeakerRole role) {
  for (const auto& row : r.features) {
    if (row.source == source && row.summary.role == role) return &row.summary;
  }
  return nullptr;
}

struct AggregateAccumulator {
  std::size_t recordings = 0;
  double minutes = 0.0;
  std::size_t words = 0, utterances = 0, questions = 0, non_questions = 0;
  std::size_t responded_questions = 0, responded_non_questions = 0;
  double pct_sum = 0.0;
  std::size_t pct_count = 0;
  double ld_weighted = 0.0;

  void add(const FeatureSummary& s) {
    ++recordings;
    minutes += s.duration_minutes;
    words += s.n_words;
    utterances += s.n_utterances;
    questions += s.n_questions;
    non_questions += s.n_non_questions;
    responded_questions += s.n_responded_questions;
    responded_non_questions += s.n_responded_non_questions;
    if (s.pct_questions) {
      pct_sum += *s.pct_questions;
      ++pct_count;
    }
    ld_weighted += s.lexical_diversity_per_minute * s.duration_minutes;
  }
};

std::optional<double> ratio(double num, double den) {
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

std::vector<AggregateRow> build_aggregate(const std::vector<RecordingResult>& recordings) {
  // group -> source -> role accumulators; std::map keeps output ordered.
  using Key = std::tuple<std::string, Source, SpeakerRole>;
  std::map<Key, AggregateAccumulator> acc;
  for (const auto& r : recordings) {
    const std::string group = r.meta.academic_year + "/" + r.meta.classroom_id;
    for (const auto& row : r.features) {
      acc[{"all", row.source, row.summary.role}].add(row.summary);
      acc[{group, row.source, row.summary.role}].add(row.summary);
    }
  }

  std::vector<AggregateRow> rows;
  auto emit = [&](const Key& key, const AggregateAccumulator& a) {
    AggregateRow row;
    std::tie(row.group, row.source, row.role) = key;
    row.recordings = a.recordings;
    row.minutes = a.minutes;
    row.words = a.words;
    row.utterances = a.utterances;
    row.questions = a.questions;
    row.non_questions = a.non_questions;
    row.responded_questions = a.responded_questions;
    row.responded_non_questions = a.responded_non_questions;
    row.mlu = ratio(static_cast<double>(a.words), static_cast<double>(a.utterances));
    row.words_per_minute = ratio(static_cast<double>(a.words), a.minutes);
    row.prop_responded_questions =
        ratio(static_cast<double>(a.responded_questions), static_cast<double>(a.questions));
    row.prop_responded_non_questions = ratio(static_cast<double>(a.responded_non_questions),
                                             static_cast<double>(a.non_questions));
    row.pct_questions_pooled =
        ratio(static_cast<double>(a.questions), static_cast<double>(a.utterances));
    row.pct_questions_mean = ratio(a.pct_sum, static_cast<double>(a.pct_count));
    row.lexical_diversity_per_minute = ratio(a.ld_weighted, a.minutes);

    const auto teacher = acc.find({row.group, row.source, SpeakerRole::Teacher});
    const auto child = acc.find({row.group, row.source, SpeakerRole::Child});
    if (teacher != acc.end() && child != acc.end()) {
      row.teacher_child_utterance_ratio =
          ratio(static_cast<double>(teacher->second.utterances),
                static_cast<double>(child->second.utterances));
    }
    rows.push_back(std::move(row));
  };
  // "all" first, then the year/classroom groups in order.
  for (const auto& [key, a] : acc)
    if (std::get<0>(key) == "all") emit(key, a);
  for (const auto& [key, a] : acc)
    if (std::get<0>(key) != "all") emit(key, a);
  return rows;
}

}  // namespace

void finalize(PipelineResult& result) {
  result.totals = {};
  result.reliability = {};
  for (const auto& r : result.recordings) {
    ++result.totals.recordings;
    result.totals.hours += r.meta.duration_minutes / 60.0;
    result.totals.machine_utterances += r.machine_utterances;
    result.totals.expert_utterances += r.expert_utterances;
    if (r.reliability) result.reliability.per_recording.emplace(r.meta.recording_id, *r.reliability);
  }
  aggregate(result.reliability);

  for (const auto& name : icc_feature_names()) {
    const auto dot = name.find('.');
    const SpeakerRole role = *parse_role(name.substr(0, dot));
    const std::string_view feature = std::string_view(name).substr(dot + 1);
    std::vector<std::array<std::optional<double>, 2>> ratings;
    for (const auto& r : result.recordings) {
      if (!r.reliability) continue;
      const auto* m = find_summary(r, Source::Machine, role);
      const auto* e = find_summary(r, Source::Expert, role);
      if (m == nullptr || e == nullptr) continue;
      ratings.push_back({feature_value(*m, feature), feature_value(*e, feature)});
    }
    result.reliability.iccs.emplace(name, icc_pairwise(ratings));
  }
  result.aggregate = build_aggregate(result.recordings);
}

PipelineResult run_pipeline(const CorpusManifest& manifest, const RunConfig& cfg) {
  check(cfg);
  const std::size_t n = manifest.entries.size();
  std::vector<std::optional<RecordingResult>> done(n);
  std::vector<std::optional<EntryError>> failed(n);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& entry = manifest.entries[i];
      try {
        done[i] = process_recording(entry, cfg);
      } catch (const Error& e) {
        failed[i] = EntryError{entry.recording_id, std::string(to_string(e.code())), e.what()};
      } catch (const std::exception& e) {
        failed[i] = EntryError{entry.recording_id, "Internal", e.what()};
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(cfg.workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  PipelineResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) result.recordings.push_back(std::move(*done[i]));
    if (failed[i]) result.errors.push_back(std::move(*failed[i]));
  }
  finalize(result);
  return result;
}

}  // namespace wsw
