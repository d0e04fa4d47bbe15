// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace faqir {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kConflict,
  kParse,
  kIo,
  kNumerical,
  kDimensionMismatch,
  kNetwork,
  kTimeout,
  kStaleIndex,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so
// callers (HTTP layer, CLI) can map it onto a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace faqir
