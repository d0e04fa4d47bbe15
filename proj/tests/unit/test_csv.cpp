// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "faqir/csv.hpp"
#include "faqir/error.hpp"

using faqir::parse_csv;

TEST_SUITE("csv") {
  TEST_CASE("plain records with header") {
    const auto rows = parse_csv("sentence,label\nhello there,greet\nbye,leave\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].fields[0] == "hello there");
    CHECK(rows[2].fields[1] == "leave");
    CHECK(rows[2].line == 3);
  }

  TEST_CASE("quoted fields keep commas, quotes and newlines") {
    const auto rows = parse_csv("a,b\n\"x, y\",\"say \"\"hi\"\"\"\n\"multi\nline\",z\nlast,row");
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].fields[0] == "x, y");
    CHECK(rows[1].fields[1] == "say \"hi\"");
    CHECK(rows[2].fields[0] == "multi\nline");
    CHECK(rows[3].line == 5);
    CHECK(rows[3].fields[1] == "row");
  }

  TEST_CASE("CRLF, BOM and blank lines") {
    const auto rows = parse_csv("\xEF\xBB\xBFtext,category\r\n\r\nfoo,bar\r\n\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].fields[0] == "text");
    CHECK(rows[1].fields[1] == "bar");
  }

  TEST_CASE("empty fields survive") {
    const auto rows = parse_csv("a,,c\n,,\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].fields.size() == 3);
    CHECK(rows[0].fields[1].empty());
    CHECK(rows[1].fields.size() == 3);
  }

  TEST_CASE("unterminated quote names its line") {
    try {
      parse_csv("a,b\nok,1\n\"broken,2\n");
      FAIL("expected a parse error");
    } catch (const faqir::Error& e) {
      CHECK(e.code() == faqir::ErrorCode::kParse);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  TEST_CASE("escape round-trips through the parser") {
    const std::string nasty = "he said \"no, thanks\"\nok";
    const auto rows = parse_csv(faqir::csv_escape(nasty) + "," + faqir::csv_escape("plain") + "\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fields[0] == nasty);
    CHECK(faqir::csv_escape("plain") == "plain");
  }
}
