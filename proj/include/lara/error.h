// Copyright 2026 The LARA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LARA_ERROR_H_
#define LARA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lara {

enum class ErrorCode {
  kInvalidArgument,
  kMalformed,
  kNotFound,
  kAlreadyExists,
  kFailedPrecondition,
  kOutOfRange,
  kPermissionDenied,
  kResourceExhausted,
  kTransport,
  kEntropy,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for contract violations. Verification failures are
// reported through return values, never through this.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lara

#endif  // LARA_ERROR_H_
