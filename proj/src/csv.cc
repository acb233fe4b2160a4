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

#include "jndmap/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jndmap/error.h"

namespace jndmap {
namespace {

// Splits one logical record starting at `pos`. Handles quoted fields that may
// span physical lines; advances `pos` and `line` past the record.
std::vector<std::string> SplitRecord(std::string_view text, std::size_t& pos,
                                     std::size_t& line,
                                     const std::string& source) {
  std::vector<std::string> fields;
  std::string field;
  const std::size_t start_line = line;
  bool quoted = false;
  bool was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"') {
      if (!field.empty() || was_quoted) {
        throw InputError("stray quote inside unquoted field", source,
                         start_line);
      }
      quoted = true;
      was_quoted = true;
      ++pos;
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
      ++pos;
      continue;
    }
    if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
      ++pos;
      continue;
    }
    if (c == '\n') {
      ++pos;
      ++line;
      fields.push_back(std::move(field));
      return fields;
    }
    field.push_back(c);
    ++pos;
  }
  if (quoted) throw InputError("unterminated quoted field", source, start_line);
  fields.push_back(std::move(field));
  ++line;
  return fields;
}

}  // namespace

CsvTable CsvTable::Parse(std::string_view text, std::string source,
                         std::span<const std::string_view> header) {
  CsvTable table;
  table.source_ = std::move(source);
  std::size_t pos = 0;
  std::size_t line = 1;
  if (text.empty()) throw InputError("empty file, header row expected", table.source_, 1);
  table.header_ = SplitRecord(text, pos, line, table.source_);
  std::size_t i = 0;
  for (std::string_view expected : header) {
    if (i >= table.header_.size()) {
      throw InputError("missing column '" + std::string(expected) + "'",
                       table.source_, 1);
    }
    if (table.header_[i] != expected) {
      throw InputError("unexpected column '" + table.header_[i] +
                           "', expected '" + std::string(expected) + "'",
                       table.source_, 1, std::to_string(i + 1));
    }
    ++i;
  }
  if (table.header_.size() > header.size()) {
    throw InputError("unknown column '" + table.header_[header.size()] + "'",
                     table.source_, 1, std::to_string(header.size() + 1));
  }
  while (pos < text.size()) {
    const std::size_t row_line = line;
    std::vector<std::string> fields = SplitRecord(text, pos, line, table.source_);
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      throw InputError("expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       table.source_, row_line);
    }
    table.rows_.push_back(CsvRow{row_line, std::move(fields)});
  }
  return table;
}

CsvTable CsvTable::Read(const std::filesystem::path& path,
                        std::span<const std::string_view> header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file", path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path.string(), header);
}

const std::string& CsvTable::Text(const CsvRow& row, std::size_t col) const {
  const std::string& value = row.fields.at(col);
  if (value.empty()) {
    throw InputError("empty value", source_, row.line, header_.at(col));
  }
  return value;
}

double CsvTable::Real(const CsvRow& row, std::size_t col) const {
  const std::string& text = Text(row, col);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw InputError("not a finite number: '" + text + "'", source_, row.line,
                     header_.at(col));
  }
  return value;
}

std::int64_t CsvTable::Integer(const CsvRow& row, std::size_t col) const {
  const std::string& text = Text(row, col);
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InputError("not an integer: '" + text + "'", source_, row.line,
                     header_.at(col));
  }
  return value;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void WriteCsvLine(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << CsvEscape(fields[i]);
  }
  out << '\n';
}

}  // namespace jndmap
