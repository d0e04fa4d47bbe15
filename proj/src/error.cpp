// SPDX-License-Identifier: Apache-2.0
#include "faqir/error.hpp"

namespace faqir {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kNumerical: return "numerical_error";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNetwork: return "network_error";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kStaleIndex: return "stale_index";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace faqir
