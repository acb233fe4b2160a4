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

#ifndef JNDMAP_ERROR_H_
#define JNDMAP_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jndmap {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. Carries the source location when the
// data came from a file; `line` and `column` are 1-based, 0 when unknown.
class InputError : public Error {
 public:
  explicit InputError(const std::string& message, std::string file = {},
                      std::size_t line = 0, std::string column = {});

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }
  // Message without the location prefix.
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
  std::string file_;
  std::size_t line_;
  std::string column_;
};

// Numerical fitting failed (too few points, IRLS divergence, ...).
class FitError : public Error {
 public:
  using Error::Error;
};

// A prediction could not be produced for the requested model.
class PredictError : public Error {
 public:
  using Error::Error;
};

}  // namespace jndmap

#endif  // JNDMAP_ERROR_H_
