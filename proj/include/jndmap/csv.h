// Copyright 2026 The jndmap Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal CSV reading/writing for the interchange tables. Fields may be
// quoted with '"' (RFC 4180 doubling for embedded quotes); the header row
// must match the expected schema exactly.

#ifndef JNDMAP_CSV_H_
#define JNDMAP_CSV_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace jndmap {

struct CsvRow {
  std::size_t line = 0;  // 1-based line in the source file
  std::vector<std::string> fields;
};

class CsvTable {
 public:
  // Parses `text`; `source` is used in error messages only.
  static CsvTable Parse(std::string_view text, std::string source,
                        std::span<const std::string_view> header);
  static CsvTable Read(const std::filesystem::path& path,
                       std::span<const std::string_view> header);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<CsvRow>& rows() const { return rows_; }

  // Typed field access; errors name the file, line and column.
  const std::string& Text(const CsvRow& row, std::size_t col) const;
  double Real(const CsvRow& row, std::size_t col) const;
  std::int64_t Integer(const CsvRow& row, std::size_t col) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<CsvRow> rows_;
};

// Quotes `field` only when it contains a separator, quote or newline.
std::string CsvEscape(std::string_view field);

// Writes one CSV line terminated by '\n'.
void WriteCsvLine(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace jndmap

#endif  // JNDMAP_CSV_H_
