// include/wsw/report.hpp

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
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wsw/batch.hpp"
#include "wsw/reliability.hpp"

namespace wsw {

enum class ReportFormat { Csv, Json };

std::optional<ReportFormat> parse_report_format(std::string_view name);

/// Writes the report files into `out_dir` (created if needed):
///
///   csv:  reliability.csv  per-recording metrics + Time-Weighted Mean + Overall
///         features.csv     one row per (recording, source, role)
///         features/<id>.csv the same rows split per recording
///         aggregate.csv    pooled counts and ratios per group/source/role
///         icc.csv          machine-vs-expert ICC per feature and role
///         errors.csv       failed entries (header only when none)
///   json: report.json      everything above at full precision
///
/// CSV numbers are rounded to 3 decimals. Throws IoError.
void emit_report(const PipelineResult& result, const std::filesystem::path& out_dir,
                 ReportFormat format);

void write_reliability_csv(std::ostream& out, const ReliabilityReport& report);
void write_features_csv(std::ostream& out, const std::vector<RecordingResult>& recordings);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_icc_csv(std::ostream& out, const std::map<std::string, IccEntry>& iccs);
void write_errors_csv(std::ostream& out, const std::vector<EntryError>& errors);

nlohmann::ordered_json to_json(const PipelineResult& result);
PipelineResult pipeline_result_from_json(const nlohmann::ordered_json& doc);

/// Reads a report.json written by emit_report. Throws MissingFile or
/// MalformedRecord.
PipelineResult load_report(const std::filesystem::path& path);

}  // namespace wsw
