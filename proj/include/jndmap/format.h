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

#ifndef JNDMAP_FORMAT_H_
#define JNDMAP_FORMAT_H_

#include <string>

namespace jndmap {

// Shortest decimal text that parses back to exactly `value`. Used for every
// number written to an interchange file so reloads are lossless.
std::string FormatNumber(double value);

// Fixed-point text with `digits` decimals, for human-facing tables.
std::string FormatFixed(double value, int digits);

}  // namespace jndmap

#endif  // JNDMAP_FORMAT_H_
