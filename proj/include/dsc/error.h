// Copyright 2026 The DSC Codec Authors
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

#ifndef DSC_ERROR_H_
#define DSC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsc {

enum class ErrorCode {
  kShapeMismatch,
  kInvalidArgument,
  kParse,             // malformed file or wire bytes
  kCodebookMismatch,  // version hash or K/D disagree
  kIndexOutOfRange,
  kDecode,            // rANS stream inconsistent or truncated
  kUndefinedCorrelation,
  kNonFinite,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; callers that
// need to distinguish failure classes switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dsc

#endif  // DSC_ERROR_H_
