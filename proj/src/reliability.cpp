// src/reliability.cpp

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

#include "wsw/reliability.hpp"

#include <cmath>

#include "wsw/errors.hpp"

namespace wsw {

double utterance_wer(const Utterance* hyp, const Utterance* ref) {
  if (hyp == nullptr && ref == nullptr) {
    throw Error(ErrorCode::BothAbsent, "utterance_wer needs at least one side");
  }
  if (hyp == nullptr || ref == nullptr) return 1.0;
  const std::size_t distance = levenshtein(hyp->tokens, ref->tokens);
  if (ref->word_count() > 0) {
    return static_cast<double>(distance) / static_cast<double>(ref->word_count());
  }
  if (hyp->word_count() > 0) {
    return static_cast<double>(distance) / static_cast<double>(hyp->word_count());
  }
  return 0.0;
}

WerTally wer_tally(const AlignedCorpus& corpus, SpeakerRole role, bool wearer_match) {
  WerTally tally;
  if (wearer_match && corpus.meta.wearer_role != role) return tally;
  for (const auto& p : corpus.pairs) {
    if (p.expert.role == role) tally.add(utterance_wer(&p.machine, &p.expert));
  }
  for (const auto& u : corpus.expert_only) {
    if (u.role == role) tally.add(utterance_wer(nullptr, &u));
  }
  for (const auto& u : corpus.machine_only) {
    if (u.role == role) tally.add(utterance_wer(&u, nullptr));
  }
  return tally;
}

double corpus_wer(std::span<const AlignedCorpus> recordings, SpeakerRole role,
                  bool wearer_match) {
  WerTally total;
  for (const auto& c : recordings) total += wer_tally(c, role, wearer_match);
  auto mean = total.mean();
  if (!mean) {
    throw Error(ErrorCode::EmptySelection,
                "no " + std::string(to_string(role)) + " utterances selected");
  }
  return *mean;
}

double time_weighted_mean(std::span<const std::optional<double>> values,
                          std::span<const double> durations) {
  if (values.size() != durations.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(values.size()) + " values, " +
                                               std::to_string(durations.size()) + " weights");
  }
  double weighted = 0.0, weight = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    weighted += *values[i] * durations[i];
    weight += durations[i];
  }
  if (!(weight > 0.0)) throw Error(ErrorCode::ZeroTotalWeight, "no weighted values");
  return weighted / weight;
}

IccResult icc_absolute(std::span<const std::array<double, 2>> ratings) {
  constexpr double k = 2.0;
  const std::size_t rows = ratings.size();
  if (rows < 2) {
    throw Error(ErrorCode::TooFewRows, "ICC needs at least 2 rows, got " + std::to_string(rows));
  }
  const double n = static_cast<double>(rows);

  double grand = 0.0;
  std::array<double, 2> col_mean{};
  for (const auto& r : ratings) {
    col_mean[0] += r[0];
    col_mean[1] += r[1];
  }
  grand = (col_mean[0] + col_mean[1]) / (n * k);
  col_mean[0] /= n;
  col_mean[1] /= n;

  bool constant = true;
  double ss_total = 0.0, ss_rows = 0.0;
  for (const auto& r : ratings) {
    const double row_mean = (r[0] + r[1]) / k;
    ss_rows += (row_mean - grand) * (row_mean - grand);
    ss_total += (r[0] - grand) * (r[0] - grand) + (r[1] - grand) * (r[1] - grand);
    constant = constant && r[0] == ratings[0][0] && r[1] == ratings[0][0];
  }
  if (constant) return {1.0, rows, true};
  ss_rows *= k;
  const double ss_cols =
      n * ((col_mean[0] - grand) * (col_mean[0] - grand) +
           (col_mean[1] - grand) * (col_mean[1] - grand));
  const double ss_error = std::max(0.0, ss_total - ss_rows - ss_cols);

  const double ms_rows = ss_rows / (n - 1.0);
  const double ms_cols = ss_cols / (k - 1.0);
  const double ms_error = ss_error / ((n - 1.0) * (k - 1.0));
  const double denom = ms_rows + (k - 1.0) * ms_error + (k / n) * (ms_cols - ms_error);
  return {(ms_rows - ms_error) / denom, rows, false};
}

IccEntry icc_pairwise(std::span<const std::array<std::optional<double>, 2>> ratings) {
  IccEntry entry;
  std::vector<std::array<double, 2>> complete;
  complete.reserve(ratings.size());
  for (const auto& r : ratings) {
    if (r[0] && r[1]) complete.push_back({*r[0], *r[1]});
    else ++entry.dropped;
  }
  entry.rows = complete.size();
  if (complete.size() >= 2) {
    const IccResult result = icc_absolute(complete);
    entry.value = result.value;
    entry.zero_variance = result.zero_variance;
  }
  return entry;
}

ReliabilityMetrics metrics_from(const ConfusionMatrix& m, std::optional<double> wer_teacher,
                                std::optional<double> wer_child) {
  ReliabilityMetrics out;
  if (m.total() > 0) {
    out.f1_weighted = weighted_f1(m);
    out.accuracy = accuracy(m);
    out.kappa = cohen_kappa(m);
  }
  out.wer_teacher = wer_teacher;
  out.wer_child = wer_child;
  return out;
}

RecordingReliability assess(const AlignedCorpus& corpus, bool wearer_match) {
  RecordingReliability r;
  r.meta = corpus.meta;
  r.method = corpus.method;
  r.pairs = corpus.pairs.size();
  r.confusion = cross_classify(corpus);
  r.wer_teacher = wer_tally(corpus, SpeakerRole::Teacher, wearer_match);
  r.wer_child = wer_tally(corpus, SpeakerRole::Child, wearer_match);
  r.metrics = metrics_from(r.confusion, r.wer_teacher.mean(), r.wer_child.mean());
  return r;
}

void aggregate(ReliabilityReport& report) {
  ConfusionMatrix pooled;
  WerTally teacher, child;
  std::vector<double> minutes;
  std::array<std::vector<std::optional<double>>, 5> columns;
  for (const auto& [id, rec] : report.per_recording) {
    pooled += rec.confusion;
    teacher += rec.wer_teacher;
    child += rec.wer_child;
    minutes.push_back(rec.meta.duration_minutes);
    columns[0].push_back(rec.metrics.f1_weighted);
    columns[1].push_back(rec.metrics.accuracy);
    columns[2].push_back(rec.metrics.kappa);
    columns[3].push_back(rec.metrics.wer_teacher);
    columns[4].push_back(rec.metrics.wer_child);
  }
  report.pooled = pooled;
  report.overall = metrics_from(pooled, teacher.mean(), child.mean());

  auto weighted = [&](const std::vector<std::optional<double>>& values) -> std::optional<double> {
    double weight = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i]) weight += minutes[i];
    if (!(weight > 0.0)) return std::nullopt;
    return time_weighted_mean(values, minutes);
  };
  report.time_weighted.f1_weighted = weighted(columns[0]);
  report.time_weighted.accuracy = weighted(columns[1]);
  report.time_weighted.kappa = weighted(columns[2]);
  report.time_weighted.wer_teacher = weighted(columns[3]);
  report.time_weighted.wer_child = weighted(columns[4]);
}

}  // namespace wsw
