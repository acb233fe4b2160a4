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

#include "jndmap/format.h"

#include <array>
#include <charconv>
#include <cmath>

#include "jndmap/error.h"

namespace jndmap {

InputError::InputError(const std::string& message, std::string file,
                       std::size_t line, std::string column)
    : Error([&] {
        std::string where;
        if (!file.empty()) {
          where = file;
          if (line > 0) where += ":" + std::to_string(line);
          if (!column.empty()) where += " [" + column + "]";
          where += ": ";
        }
        return where + message;
      }()),
      reason_(message),
      file_(std::move(file)),
      line_(line),
      column_(std::move(column)) {}

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string FormatFixed(double value, int digits) {
  if (!std::isfinite(value)) return FormatNumber(value);
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, digits);
  return std::string(buf.data(), end);
}

}  // namespace jndmap
