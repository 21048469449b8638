// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "reprune/error.h"

namespace reprune {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kMalformedManifest:
      return "malformed_manifest";
    case ErrorCode::kSizeMismatch:
      return "size_mismatch";
    case ErrorCode::kNonFinite:
      return "non_finite";
    case ErrorCode::kConstraintViolation:
      return "constraint_violation";
    case ErrorCode::kOutOfRange:
      return "out_of_range";
    case ErrorCode::kMissingMetadata:
      return "missing_metadata";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace reprune
