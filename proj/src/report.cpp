// src/report.cpp

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

#include "wsw/report.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "csv_format.hpp"
#include "wsw/errors.hpp"

namespace wsw {

namespace {

using json = nlohmann::ordered_json;
using detail::csv_field;
using detail::fixed3;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

void write_metric_cells(std::ostream& out, const ReliabilityMetrics& m) {
  out << fixed3(m.f1_weighted) << ',' << fixed3(m.accuracy) << ',' << fixed3(m.kappa) << ','
      << fixed3(m.wer_teacher) << ',' << fixed3(m.wer_child);
}

void write_confusion_cells(std::ostream& out, const ConfusionMatrix& c) {
  out << c.counts[0][0] << ',' << c.counts[0][1] << ',' << c.counts[1][0] << ','
      << c.counts[1][1] << ',' << c.excluded_other << ',' << c.residue_machine << ','
      << c.residue_expert;
}

// --- JSON helpers -------------------------------------------------------

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

template <typename Enum, typename Parse>
Enum get_enum(const json& j, const char* key, Parse parse) {
  auto value = parse(j.at(key).get<std::string>());
  if (!value) throw Error(ErrorCode::MalformedRecord, std::string("bad value for ") + key);
  return *value;
}

std::optional<AlignMethod> parse_method(std::string_view s) {
  if (s == "index") return AlignMethod::Index;
  if (s == "time") return AlignMethod::Time;
  return std::nullopt;
}

std::string_view to_string(AlignMethod m) { return m == AlignMethod::Index ? "index" : "time"; }

json meta_json(const RecordingMeta& m) {
  return {{"recording_id", m.recording_id},
          {"wearer_role", to_string(m.wearer_role)},
          {"classroom_id", m.classroom_id},
          {"academic_year", m.academic_year},
          {"duration_minutes", m.duration_minutes}};
}

RecordingMeta meta_from(const json& j) {
  RecordingMeta m;
  m.recording_id = j.at("recording_id").get<std::string>();
  m.wearer_role = get_enum<SpeakerRole>(j, "wearer_role", parse_role);
  m.classroom_id = j.at("classroom_id").get<std::string>();
  m.academic_year = j.at("academic_year").get<std::string>();
  m.duration_minutes = j.at("duration_minutes").get<double>();
  return m;
}

json summary_json(const FeatureSummary& s) {
  return {{"role", to_string(s.role)},
          {"duration_minutes", s.duration_minutes},
          {"n_words", s.n_words},
          {"n_utterances", s.n_utterances},
          {"n_questions", s.n_questions},
          {"n_non_questions", s.n_non_questions},
          {"mlu_overall", opt(s.mlu_overall)},
          {"mlu_question", opt(s.mlu_question)},
          {"mlu_non_question", opt(s.mlu_non_question)},
          {"words_per_minute", s.words_per_minute},
          {"n_responded_questions", s.n_responded_questions},
          {"n_responded_non_questions", s.n_responded_non_questions},
          {"prop_responded_questions", opt(s.prop_responded_questions)},
          {"prop_responded_non_questions", opt(s.prop_responded_non_questions)},
          {"prop_responded_total", opt(s.prop_responded_total)},
          {"pct_questions", opt(s.pct_questions)},
          {"questions_per_minute", s.questions_per_minute},
          {"non_questions_per_minute", s.non_questions_per_minute},
          {"responded_questions_per_minute", s.responded_questions_per_minute},
          {"lexical_diversity_per_minute", s.lexical_diversity_per_minute},
          {"lexical_diversity_pooled", s.lexical_diversity_pooled}};
}

FeatureSummary summary_from(const json& j) {
  FeatureSummary s;
  s.role = get_enum<SpeakerRole>(j, "role", parse_role);
  s.duration_minutes = j.at("duration_minutes").get<double>();
  s.n_words = j.at("n_words").get<std::size_t>();
  s.n_utterances = j.at("n_utterances").get<std::size_t>();
  s.n_questions = j.at("n_questions").get<std::size_t>();
  s.n_non_questions = j.at("n_non_questions").get<std::size_t>();
  s.mlu_overall = get_opt(j, "mlu_overall");
  s.mlu_question = get_opt(j, "mlu_question");
  s.mlu_non_question = get_opt(j, "mlu_non_question");
  s.words_per_minute = j.at("words_per_minute").get<double>();
  s.n_responded_questions = j.at("n_responded_questions").get<std::size_t>();
  s.n_responded_non_questions = j.at("n_responded_non_questions").get<std::size_t>();
  s.prop_responded_questions = get_opt(j, "prop_responded_questions");
  s.prop_responded_non_questions = get_opt(j, "prop_responded_non_questions");
  s.prop_responded_total = get_opt(j, "prop_responded_total");
  s.pct_questions = get_opt(j, "pct_questions");
  s.questions_per_minute = j.at("questions_per_minute").get<double>();
  s.non_questions_per_minute = j.at("non_questions_per_minute").get<double>();
  s.responded_questions_per_minute = j.at("responded_questions_per_minute").get<double>();
  s.lexical_diversity_per_minute = j.at("lexical_diversity_per_minute").get<double>();
  s.lexical_diversity_pooled = j.at("lexical_diversity_pooled").get<double>();
  return s;
}

json metrics_json(const ReliabilityMetrics& m) {
  return {{"f1_weighted", opt(m.f1_weighted)},
          {"accuracy", opt(m.accuracy)},
          {"kappa", opt(m.kappa)},
          {"wer_teacher", opt(m.wer_teacher)},
          {"wer_child", opt(m.wer_child)}};
}

ReliabilityMetrics metrics_from_json(const json& j) {
  return {get_opt(j, "f1_weighted"), get_opt(j, "accuracy"), get_opt(j, "kappa"),
          get_opt(j, "wer_teacher"), get_opt(j, "wer_child")};
}

json confusion_json(const ConfusionMatrix& c) {
  return {{"counts", {{c.counts[0][0], c.counts[0][1]}, {c.counts[1][0], c.counts[1][1]}}},
          {"excluded_other", c.excluded_other},
          {"residue_machine", c.residue_machine},
          {"residue_expert", c.residue_expert}};
}

ConfusionMatrix confusion_from(const json& j) {
  ConfusionMatrix c;
  const auto& counts = j.at("counts");
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t k = 0; k < 2; ++k) c.counts[r][k] = counts.at(r).at(k).get<std::uint64_t>();
  c.excluded_other = j.at("excluded_other").get<std::uint64_t>();
  c.residue_machine = j.at("residue_machine").get<std::uint64_t>();
  c.residue_expert = j.at("residue_expert").get<std::uint64_t>();
  return c;
}

json tally_json(const WerTally& t) { return {{"sum", t.sum}, {"count", t.count}}; }

WerTally tally_from(const json& j) {
  return {j.at("sum").get<double>(), j.at("count").get<std::size_t>()};
}

json recording_reliability_json(const RecordingReliability& r) {
  return {{"meta", meta_json(r.meta)},
          {"method", to_string(r.method)},
          {"pairs", r.pairs},
          {"confusion", confusion_json(r.confusion)},
          {"wer_teacher_tally", tally_json(r.wer_teacher)},
          {"wer_child_tally", tally_json(r.wer_child)},
          {"metrics", metrics_json(r.metrics)}};
}

RecordingReliability recording_reliability_from(const json& j) {
  RecordingReliability r;
  r.meta = meta_from(j.at("meta"));
  r.method = get_enum<AlignMethod>(j, "method", parse_method);
  r.pairs = j.at("pairs").get<std::size_t>();
  r.confusion = confusion_from(j.at("confusion"));
  r.wer_teacher = tally_from(j.at("wer_teacher_tally"));
  r.wer_child = tally_from(j.at("wer_child_tally"));
  r.metrics = metrics_from_json(j.at("metrics"));
  return r;
}

json icc_json(const IccEntry& e) {
  return {{"value", opt(e.value)},
          {"rows", e.rows},
          {"dropped", e.dropped},
          {"zero_variance", e.zero_variance}};
}

IccEntry icc_from(const json& j) {
  IccEntry e;
  e.value = get_opt(j, "value");
  e.rows = j.at("rows").get<std::size_t>();
  e.dropped = j.at("dropped").get<std::size_t>();
  e.zero_variance = j.at("zero_variance").get<bool>();
  return e;
}

json aggregate_json(const AggregateRow& a) {
  return {{"group", a.group},
          {"source", to_string(a.source)},
          {"role", to_string(a.role)},
          {"recordings", a.recordings},
          {"minutes", a.minutes},
          {"words", a.words},
          {"utterances", a.utterances},
          {"questions", a.questions},
          {"non_questions", a.non_questions},
          {"responded_questions", a.responded_questions},
          {"responded_non_questions", a.responded_non_questions},
          {"mlu", opt(a.mlu)},
          {"words_per_minute", opt(a.words_per_minute)},
          {"prop_responded_questions", opt(a.prop_responded_questions)},
          {"prop_responded_non_questions", opt(a.prop_responded_non_questions)},
          {"pct_questions_pooled", opt(a.pct_questions_pooled)},
          {"pct_questions_mean", opt(a.pct_questions_mean)},
          {"lexical_diversity_per_minute", opt(a.lexical_diversity_per_minute)},
          {"teacher_child_utterance_ratio", opt(a.teacher_child_utterance_ratio)}};
}

AggregateRow aggregate_from(const json& j) {
  AggregateRow a;
  a.group = j.at("group").get<std::string>();
  a.source = get_enum<Source>(j, "source", parse_source);
  a.role = get_enum<SpeakerRole>(j, "role", parse_role);
  a.recordings = j.at("recordings").get<std::size_t>();
  a.minutes = j.at("minutes").get<double>();
  a.words = j.at("words").get<std::size_t>();
  a.utterances = j.at("utterances").get<std::size_t>();
  a.questions = j.at("questions").get<std::size_t>();
  a.non_questions = j.at("non_questions").get<std::size_t>();
  a.responded_questions = j.at("responded_questions").get<std::size_t>();
  a.responded_non_questions = j.at("responded_non_questions").get<std::size_t>();
  a.mlu = get_opt(j, "mlu");
  a.words_per_minute = get_opt(j, "words_per_minute");
  a.prop_responded_questions = get_opt(j, "prop_responded_questions");
  a.prop_responded_non_questions = get_opt(j, "prop_responded_non_questions");
  a.pct_questions_pooled = get_opt(j, "pct_questions_pooled");
  a.pct_questions_mean = get_opt(j, "pct_questions_mean");
  a.lexical_diversity_per_minute = get_opt(j, "lexical_diversity_per_minute");
  a.teacher_child_utterance_ratio = get_opt(j, "teacher_child_utterance_ratio");
  return a;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

void write_reliability_csv(std::ostream& out, const ReliabilityReport& report) {
  out << "recording_id,academic_year,classroom_id,recorder,duration_minutes,method,pairs,"
         "teacher_teacher,teacher_child,child_teacher,child_child,excluded_other,"
         "residue_machine,residue_expert,f1_weighted,accuracy,kappa,wer_teacher,wer_child\n";
  double minutes = 0.0;
  for (const auto& [id, r] : report.per_recording) {
    minutes += r.meta.duration_minutes;
    out << csv_field(id) << ',' << csv_field(r.meta.academic_year) << ','
        << csv_field(r.meta.classroom_id) << ',' << to_string(r.meta.wearer_role) << ','
        << fixed3(r.meta.duration_minutes) << ',' << to_string(r.method) << ',' << r.pairs
        << ',';
    write_confusion_cells(out, r.confusion);
    out << ',';
    write_metric_cells(out, r.metrics);
    out << '\n';
  }
  if (report.per_recording.empty()) return;
  out << "Time-Weighted Mean,,,," << fixed3(minutes) << ",,,,,,,,,,";
  write_metric_cells(out, report.time_weighted);
  out << '\n';
  std::uint64_t pairs = 0;
  for (const auto& [id, r] : report.per_recording) pairs += r.pairs;
  out << "Overall,,,," << fixed3(minutes) << ",," << pairs << ',';
  write_confusion_cells(out, report.pooled);
  out << ',';
  write_metric_cells(out, report.overall);
  out << '\n';
}

void write_features_csv(std::ostream& out, const std::vector<RecordingResult>& recordings) {
  write_feature_csv_header(out);
  for (const auto& r : recordings)
    for (const auto& row : r.features) write_feature_csv_row(out, row);
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "group,source,role,recordings,minutes,words,utterances,questions,non_questions,"
         "responded_questions,responded_non_questions,mlu,words_per_minute,"
         "prop_responded_questions,prop_responded_non_questions,pct_questions_pooled,"
         "pct_questions_mean,lexical_diversity_per_minute,teacher_child_utterance_ratio\n";
  for (const auto& a : rows) {
    out << csv_field(a.group) << ',' << to_string(a.source) << ',' << to_string(a.role) << ','
        << a.recordings << ',' << fixed3(a.minutes) << ',' << a.words << ',' << a.utterances
        << ',' << a.questions << ',' << a.non_questions << ',' << a.responded_questions << ','
        << a.responded_non_questions << ',' << fixed3(a.mlu) << ','
        << fixed3(a.words_per_minute) << ',' << fixed3(a.prop_responded_questions) << ','
        << fixed3(a.prop_responded_non_questions) << ',' << fixed3(a.pct_questions_pooled)
        << ',' << fixed3(a.pct_questions_mean) << ','
        << fixed3(a.lexical_diversity_per_minute) << ','
        << fixed3(a.teacher_child_utterance_ratio) << '\n';
  }
}

void write_icc_csv(std::ostream& out, const std::map<std::string, IccEntry>& iccs) {
  // Columns follow icc_feature_names(); entries not in that list go last.
  std::vector<std::string> columns;
  for (const auto& name : icc_feature_names())
    if (iccs.contains(name)) columns.push_back(name);
  for (const auto& [name, entry] : iccs)
    if (std::find(columns.begin(), columns.end(), name) == columns.end())
      columns.push_back(name);

  out << "rater_pair";
  for (const auto& c : columns) out << ',' << csv_field(c);
  out << "\nmachine_vs_expert";
  for (const auto& c : columns) out << ',' << fixed3(iccs.at(c).value);
  out << "\nrecordings";
  for (const auto& c : columns) out << ',' << iccs.at(c).rows;
  out << "\ndropped";
  for (const auto& c : columns) out << ',' << iccs.at(c).dropped;
  out << '\n';
}

void write_errors_csv(std::ostream& out, const std::vector<EntryError>& errors) {
  out << "recording_id,code,message\n";
  for (const auto& e : errors) {
    out << csv_field(e.recording_id) << ',' << csv_field(e.code) << ',' << csv_field(e.message)
        << '\n';
  }
}

nlohmann::ordered_json to_json(const PipelineResult& result) {
  json doc;
  doc["totals"] = {{"recordings", result.totals.recordings},
                   {"hours", result.totals.hours},
                   {"machine_utterances", result.totals.machine_utterances},
                   {"expert_utterances", result.totals.expert_utterances}};

  json recordings = json::array();
  for (const auto& r : result.recordings) {
    json features = json::array();
    for (const auto& row : r.features) {
      features.push_back({{"recording_id", row.recording_id},
                          {"source", to_string(row.source)},
                          {"summary", summary_json(row.summary)}});
    }
    recordings.push_back({{"meta", meta_json(r.meta)},
                          {"machine_utterances", r.machine_utterances},
                          {"expert_utterances", r.expert_utterances},
                          {"warnings", r.warnings},
                          {"features", std::move(features)},
                          {"reliability", r.reliability
                                              ? recording_reliability_json(*r.reliability)
                                              : json(nullptr)}});
  }
  doc["recordings"] = std::move(recordings);

  json per_recording = json::object();
  for (const auto& [id, r] : result.reliability.per_recording) {
    per_recording[id] = recording_reliability_json(r);
  }
  json iccs = json::object();
  for (const auto& [name, e] : result.reliability.iccs) iccs[name] = icc_json(e);
  doc["reliability"] = {{"per_recording", std::move(per_recording)},
                        {"time_weighted", metrics_json(result.reliability.time_weighted)},
                        {"overall", metrics_json(result.reliability.overall)},
                        {"pooled", confusion_json(result.reliability.pooled)},
                        {"iccs", std::move(iccs)}};

  json aggregate = json::array();
  for (const auto& a : result.aggregate) aggregate.push_back(aggregate_json(a));
  doc["aggregate"] = std::move(aggregate);

  json errors = json::array();
  for (const auto& e : result.errors) {
    errors.push_back({{"recording_id", e.recording_id}, {"code", e.code}, {"message", e.message}});
  }
  doc["errors"] = std::move(errors);
  return doc;
}

PipelineResult pipeline_result_from_json(const nlohmann::ordered_json& doc) {
  try {
    PipelineResult result;
    const auto& t = doc.at("totals");
    result.totals.recordings = t.at("recordings").get<std::size_t>();
    result.totals.hours = t.at("hours").get<double>();
    result.totals.machine_utterances = t.at("machine_utterances").get<std::size_t>();
    result.totals.expert_utterances = t.at("expert_utterances").get<std::size_t>();

    for (const auto& jr : doc.at("recordings")) {
      RecordingResult r;
      r.meta = meta_from(jr.at("meta"));
      r.machine_utterances = jr.at("machine_utterances").get<std::size_t>();
      r.expert_utterances = jr.at("expert_utterances").get<std::size_t>();
      r.warnings = jr.at("warnings").get<std::size_t>();
      for (const auto& jf : jr.at("features")) {
        r.features.push_back({jf.at("recording_id").get<std::string>(),
                              get_enum<Source>(jf, "source", parse_source),
                              summary_from(jf.at("summary"))});
      }
      if (!jr.at("reliability").is_null()) {
        r.reliability = recording_reliability_from(jr.at("reliability"));
      }
      result.recordings.push_back(std::move(r));
    }

    const auto& rel = doc.at("reliability");
    for (const auto& [id, jr] : rel.at("per_recording").items()) {
      result.reliability.per_recording.emplace(id, recording_reliability_from(jr));
    }
    result.reliability.time_weighted = metrics_from_json(rel.at("time_weighted"));
    result.reliability.overall = metrics_from_json(rel.at("overall"));
    result.reliability.pooled = confusion_from(rel.at("pooled"));
    for (const auto& [name, je] : rel.at("iccs").items()) {
      result.reliability.iccs.emplace(name, icc_from(je));
    }

    for (const auto& ja : doc.at("aggregate")) result.aggregate.push_back(aggregate_from(ja));
    for (const auto& je : doc.at("errors")) {
      result.errors.push_back({je.at("recording_id").get<std::string>(),
                               je.at("code").get<std::string>(),
                               je.at("message").get<std::string>()});
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("report: ") + e.what());
  }
}

PipelineResult load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(ErrorCode::MalformedRecord, path.string());
  return pipeline_result_from_json(doc);
}

void emit_report(const PipelineResult& result, const std::filesystem::path& out_dir,
                 ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string());

  auto write = [&](const std::filesystem::path& path, auto&& body) {
    auto out = open_output(path);
    body(out);
    finish(out, path);
  };

  if (format == ReportFormat::Json) {
    write(out_dir / "report.json", [&](std::ostream& o) { o << to_json(result).dump(2) << '\n'; });
    return;
  }

  write(out_dir / "reliability.csv",
        [&](std::ostream& o) { write_reliability_csv(o, result.reliability); });
  write(out_dir / "features.csv",
        [&](std::ostream& o) { write_features_csv(o, result.recordings); });
  write(out_dir / "aggregate.csv",
        [&](std::ostream& o) { write_aggregate_csv(o, result.aggregate); });
  write(out_dir / "icc.csv", [&](std::ostream& o) { write_icc_csv(o, result.reliability.iccs); });
  write(out_dir / "errors.csv", [&](std::ostream& o) { write_errors_csv(o, result.errors); });

  if (!result.recordings.empty()) {
    const auto dir = out_dir / "features";
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
    for (const auto& r : result.recordings) {
      write(dir / (r.meta.recording_id + ".csv"), [&](std::ostream& o) {
        write_feature_csv_header(o);
        for (const auto& row : r.features) write_feature_csv_row(o, row);
      });
    }
  }
}

}  // namespace wsw
