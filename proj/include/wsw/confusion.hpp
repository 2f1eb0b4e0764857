// include/wsw/confusion.hpp

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
#include <cstdint>
#include <optional>

#include "wsw/transcript.hpp"

namespace wsw {

/// Teacher/child cross-classification. Rows are the expert (truth) label,
/// columns the machine label; index 0 = Teacher, 1 = Child.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  std::uint64_t excluded_other = 0;   // pairs where either side is Other
  std::uint64_t residue_machine = 0;  // unmatched machine utterances
  std::uint64_t residue_expert = 0;   // unmatched expert utterances

  std::uint64_t total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }
  std::uint64_t& at(SpeakerRole expert, SpeakerRole machine);

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// trace / total. Throws EmptyMatrix on a zero total.
double accuracy(const ConfusionMatrix& m);

/// Support-weighted mean of the per-class F1 scores, support being the
/// expert row total. A class with no true, predicted or actual instances
/// contributes F1 = 0 at zero weight. Throws EmptyMatrix.
double weighted_f1(const ConfusionMatrix& m);

/// Cohen's kappa (p_o - p_e) / (1 - p_e), p_e from the row and column
/// marginals. nullopt when p_e == 1 (both raters used one label only).
/// Throws EmptyMatrix.
std::optional<double> cohen_kappa(const ConfusionMatrix& m);

}  // namespace wsw
