// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace faqir {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 reader: comma separated, double-quoted fields may hold commas,
// newlines and "" escapes. CRLF and LF both end records. Blank lines are
// skipped. Throws Error(kParse) naming the line of an unterminated quote.
std::vector<CsvRecord> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);

}  // namespace faqir
