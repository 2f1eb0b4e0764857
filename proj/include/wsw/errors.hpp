// include/wsw/errors.hpp

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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wsw {

enum class ErrorCode {
  MalformedRecord,
  InvalidTimestamps,
  UnknownSpeakerLabel,
  MissingHeader,
  NotLinked,
  ZeroDuration,
  InvalidCounts,
  BothAbsent,
  EmptySelection,
  EmptyMatrix,
  LengthMismatch,
  ZeroTotalWeight,
  TooFewRows,
  MissingFile,
  EmptyCorpus,
  DuplicateRecording,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported as a wsw::Error.
/// Parsers attach the 1-based physical line number of the offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace wsw
