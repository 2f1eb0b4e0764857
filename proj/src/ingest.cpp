// src/ingest.cpp

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

#include "wsw/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "wsw/errors.hpp"

namespace wsw {

namespace {

using nlohmann::json;

void strip_cr_and_bom(std::string& line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

SpeakerRole require_role(std::string_view label, std::size_t line_no) {
  auto role = parse_role(label);
  if (!role) {
    throw Error(ErrorCode::UnknownSpeakerLabel, "'" + std::string(label) + "'", line_no);
  }
  return *role;
}

void check_times(double start, double end, std::size_t line_no) {
  if (start < 0.0 || end < start) {
    throw Error(ErrorCode::InvalidTimestamps,
                "start " + format_number(start) + ", end " + format_number(end), line_no);
  }
}

double json_number(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::MalformedRecord, std::string("missing numeric '") + key + "'",
                line_no);
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::MalformedRecord, std::string("non-finite '") + key + "'", line_no);
  }
  return v;
}

const std::string& json_string(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::MalformedRecord, std::string("missing string '") + key + "'",
                line_no);
  }
  return it->get_ref<const std::string&>();
}

// Splits one delimiter-separated record, honouring double quotes. Quoted
// fields may span physical lines; `more` pulls the next one.
template <typename NextLine>
std::vector<std::string> split_record(std::string line, char delimiter, NextLine&& more,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (!quoted) break;
      std::string next;
      if (!more(next)) throw Error(ErrorCode::MalformedRecord, "unterminated quote", line_no);
      field.push_back('\n');
      line = std::move(next);
      i = 0;
      continue;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
    ++i;
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_field(std::string_view value, char delimiter) {
  const bool needs_quotes = value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                                std::string_view::npos ||
                            (!value.empty() && (value.front() == ' ' || value.back() == ' '));
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return in;
}

}  // namespace

Transcript parse_machine(std::istream& in, RecordingMeta meta, const TextNormalizer& normalizer) {
  Transcript t;
  t.meta = std::move(meta);
  t.source = Source::Machine;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr_and_bom(line, line_no);
    if (is_blank(line)) continue;

    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw Error(ErrorCode::MalformedRecord, "not a JSON object", line_no);
    }
    for (const auto& [key, value] : obj.items()) {
      if (key != "start" && key != "end" && key != "text" && key != "speaker" &&
          key != "confidence") {
        throw Error(ErrorCode::MalformedRecord, "unexpected key '" + key + "'", line_no);
      }
    }
    const double start = json_number(obj, "start", line_no);
    const double end = json_number(obj, "end", line_no);
    const std::string& text = json_string(obj, "text", line_no);
    const SpeakerRole role = require_role(json_string(obj, "speaker", line_no), line_no);
    check_times(start, end, line_no);

    Utterance u = make_utterance(std::to_string(line_no), start, end, text, role,
                                 Source::Machine, normalizer);
    if (auto it = obj.find("confidence"); it != obj.end() && !it->is_null()) {
      if (!it->is_number()) throw Error(ErrorCode::MalformedRecord, "confidence", line_no);
      const double c = it->get<double>();
      if (!(c >= 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::MalformedRecord, "confidence outside [0, 1]", line_no);
      }
      u.confidence = c;
    }
    t.utterances.push_back(std::move(u));
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failure");
  t.sort();
  return t;
}

void write_machine(std::ostream& out, const Transcript& transcript) {
  for (const auto& u : transcript.utterances) {
    nlohmann::ordered_json obj;
    obj["start"] = u.onset;
    obj["end"] = u.offset;
    obj["text"] = u.raw_text;
    obj["speaker"] = to_string(u.role);
    if (u.confidence) obj["confidence"] = *u.confidence;
    out << obj.dump() << '\n';
  }
}

Transcript parse_expert(std::istream& in, RecordingMeta meta, char delimiter,
                        const TextNormalizer& normalizer) {
  Transcript t;
  t.meta = std::move(meta);
  t.source = Source::Expert;

  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::string& dst) {
    if (!std::getline(in, dst)) return false;
    ++line_no;
    strip_cr_and_bom(dst, line_no);
    return true;
  };

  bool have_header = false;
  while (next_line(line)) {
    if (!is_blank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::MissingHeader, "empty expert file");

  const std::size_t header_line = line_no;
  auto header = split_record(line, delimiter, next_line, header_line);
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name(trim(header[i]));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    column.emplace(std::move(name), i);
  }
  for (const char* required : {"start", "end", "speaker", "text"}) {
    if (!column.contains(required)) {
      throw Error(ErrorCode::MissingHeader, std::string("no '") + required + "' column",
                  header_line);
    }
  }
  const std::size_t c_start = column["start"], c_end = column["end"],
                    c_speaker = column["speaker"], c_text = column["text"];
  const auto link_it = column.find("machine_id");
  const std::optional<std::size_t> c_link =
      link_it == column.end() ? std::nullopt : std::optional(link_it->second);

  std::size_t rows = 0, linked_rows = 0;
  while (next_line(line)) {
    if (is_blank(line)) continue;
    const std::size_t record_line = line_no;
    auto fields = split_record(line, delimiter, next_line, record_line);
    if (fields.size() > header.size()) {
      throw Error(ErrorCode::MalformedRecord,
                  "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()),
                  record_line);
    }
    // Trailing empty cells are often dropped by spreadsheet exports.
    fields.resize(header.size());

    auto start = parse_number(fields[c_start]);
    auto end = parse_number(fields[c_end]);
    if (!start || !end) throw Error(ErrorCode::MalformedRecord, "bad timestamp", record_line);
    check_times(*start, *end, record_line);
    const SpeakerRole role = require_role(fields[c_speaker], record_line);

    ++rows;
    Utterance u = make_utterance(std::to_string(rows), *start, *end, fields[c_text], role,
                                 Source::Expert, normalizer);
    if (c_link) {
      auto id = trim(fields[*c_link]);
      if (!id.empty()) {
        u.linked_machine_id = std::string(id);
        ++linked_rows;
      }
    }
    t.utterances.push_back(std::move(u));
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failure");
  t.linked = rows > 0 && static_cast<double>(linked_rows) >=
                             kLinkedRowFraction * static_cast<double>(rows);
  t.sort();
  return t;
}

void write_expert(std::ostream& out, const Transcript& transcript, char delimiter) {
  const bool any_link =
      std::any_of(transcript.utterances.begin(), transcript.utterances.end(),
                  [](const Utterance& u) { return u.linked_machine_id.has_value(); });
  out << "start" << delimiter << "end" << delimiter << "speaker" << delimiter << "text";
  if (any_link) out << delimiter << "machine_id";
  out << '\n';
  for (const auto& u : transcript.utterances) {
    out << format_number(u.onset) << delimiter << format_number(u.offset) << delimiter
        << to_string(u.role) << delimiter << quote_field(u.raw_text, delimiter);
    if (any_link) out << delimiter << quote_field(u.linked_machine_id.value_or(""), delimiter);
    out << '\n';
  }
}

RecordingMeta parse_meta(std::istream& in) {
  json obj = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw Error(ErrorCode::MalformedRecord, "metadata is not a JSON object");
  }
  RecordingMeta meta;
  meta.recording_id = json_string(obj, "recording_id", 1);
  meta.wearer_role = require_role(json_string(obj, "wearer_role", 1), 1);
  meta.classroom_id = json_string(obj, "classroom_id", 1);
  meta.academic_year = json_string(obj, "academic_year", 1);
  meta.duration_minutes = json_number(obj, "duration_minutes", 1);
  if (!(meta.duration_minutes > 0.0)) {
    throw Error(ErrorCode::ZeroDuration, "recording " + meta.recording_id);
  }
  return meta;
}

void write_meta(std::ostream& out, const RecordingMeta& meta) {
  nlohmann::ordered_json obj;
  obj["recording_id"] = meta.recording_id;
  obj["wearer_role"] = to_string(meta.wearer_role);
  obj["classroom_id"] = meta.classroom_id;
  obj["academic_year"] = meta.academic_year;
  obj["duration_minutes"] = meta.duration_minutes;
  out << obj.dump(2) << '\n';
}

RecordingMeta load_meta(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_meta(in);
}

Transcript load_machine(const std::filesystem::path& path, RecordingMeta meta,
                        const TextNormalizer& normalizer) {
  auto in = open_input(path);
  return parse_machine(in, std::move(meta), normalizer);
}

Transcript load_expert(const std::filesystem::path& path, RecordingMeta meta, char delimiter,
                       const TextNormalizer& normalizer) {
  auto in = open_input(path);
  return parse_expert(in, std::move(meta), delimiter, normalizer);
}

std::string_view to_string(WarningKind kind) {
  switch (kind) {
    case WarningKind::Overlap: return "Overlap";
    case WarningKind::PastDuration: return "PastDuration";
    case WarningKind::ZeroWords: return "ZeroWords";
  }
  return "Unknown";
}

std::vector<Warning> validate(const Transcript& transcript) {
  std::vector<Warning> warnings;
  const double limit = transcript.meta.duration_minutes * 60.0 + kDurationToleranceSeconds;

  // Latest-ending utterance seen so far, per role.
  std::array<const Utterance*, 3> latest{};
  for (const auto& u : transcript.utterances) {
    auto& prev = latest[static_cast<std::size_t>(u.role)];
    if (prev != nullptr && u.onset < prev->offset) {
      warnings.push_back({WarningKind::Overlap, u.id, prev->id,
                          "overlaps " + std::string(to_string(u.role)) + " utterance " +
                              prev->id + " by " + format_number(prev->offset - u.onset) +
                              " s"});
    }
    if (prev == nullptr || u.offset > prev->offset) prev = &u;

    if (u.offset > limit) {
      warnings.push_back({WarningKind::PastDuration, u.id, {},
                          "offset " + format_number(u.offset) + " s past duration"});
    }
    if (u.word_count() == 0) {
      warnings.push_back({WarningKind::ZeroWords, u.id, {}, "no words after normalization"});
    }
  }
  return warnings;
}

}  // namespace wsw
