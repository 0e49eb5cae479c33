// Copyright 2026 The fkbsde Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace fkbsde {

enum class ErrorCode {
  kStructural = 1,   // shape / dimension / grid alignment problems
  kInvalidArgument,  // violated precondition or model invariant
  kNumerical,        // ill-conditioned regression, Picard non-convergence
  kOverflow,         // non-finite state, Gamma or Y
  kPrecondition,     // theorem hypotheses not met (comparison check)
  kParse,            // config syntax
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

/// Library version string.
const char* version() noexcept;

}  // namespace fkbsde
