// src/confusion.cpp

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

#include "wsw/confusion.hpp"

#include "wsw/errors.hpp"

namespace wsw {

namespace {

void require_nonempty(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no counts");
}

std::size_t index_of(SpeakerRole role) {
  if (role == SpeakerRole::Other) {
    throw Error(ErrorCode::InvalidCounts, "Other has no confusion-matrix cell");
  }
  return role == SpeakerRole::Teacher ? 0 : 1;
}

}  // namespace

std::uint64_t& ConfusionMatrix::at(SpeakerRole expert, SpeakerRole machine) {
  return counts[index_of(expert)][index_of(machine)];
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) counts[r][c] += other.counts[r][c];
  excluded_other += other.excluded_other;
  residue_machine += other.residue_machine;
  residue_expert += other.residue_expert;
  return *this;
}

double accuracy(const ConfusionMatrix& m) {
  require_nonempty(m);
  return static_cast<double>(m.counts[0][0] + m.counts[1][1]) / static_cast<double>(m.total());
}

double weighted_f1(const ConfusionMatrix& m) {
  require_nonempty(m);
  const auto& c = m.counts;
  double sum = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double tp = static_cast<double>(c[k][k]);
    const double support = static_cast<double>(c[k][0] + c[k][1]);  // row
    const double predicted = static_cast<double>(c[0][k] + c[1][k]);  // column
    const double denom = support + predicted;  // 2TP + FN + FP
    if (denom > 0.0) sum += support * (2.0 * tp / denom);
  }
  return sum / static_cast<double>(m.total());
}

std::optional<double> cohen_kappa(const ConfusionMatrix& m) {
  require_nonempty(m);
  const auto& c = m.counts;
  const double n = static_cast<double>(m.total());
  const double observed = static_cast<double>(c[0][0] + c[1][1]) / n;
  double expected = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double row = static_cast<double>(c[k][0] + c[k][1]);
    const double col = static_cast<double>(c[0][k] + c[1][k]);
    expected += (row / n) * (col / n);
  }
  if (expected >= 1.0) return std::nullopt;
  return (observed - expected) / (1.0 - expected);
}

}  // namespace wsw
