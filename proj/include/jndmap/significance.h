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

// Pairing of stimuli within a content and the significance test that labels
// each pair as perceptibly different (sig = 1) or similar (sig = 0).

#ifndef JNDMAP_SIGNIFICANCE_H_
#define JNDMAP_SIGNIFICANCE_H_

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jndmap/corpus.h"

namespace jndmap {

enum class TTestKind { kWelch, kStudent, kPaired };

std::string_view TTestKindName(TTestKind kind);
TTestKind ParseTTestKind(std::string_view text);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

// Two-sided p-value of Student's t distribution with `df` degrees of freedom,
// P(|T| >= |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2).
double StudentTwoSidedPValue(double t, double df);

// Unequal-variance two-sample test with Welch-Satterthwaite degrees of
// freedom. When both samples have zero variance p is 1 for equal means and 0
// otherwise. Throws InputError when either sample has fewer than 2 values.
TTestResult WelchTTest(std::span<const double> a, std::span<const double> b,
                       double alpha);
TTestResult WelchTTest(std::span<const int> a, std::span<const int> b,
                       double alpha);

// Pooled-variance two-sample test, df = na + nb - 2.
TTestResult StudentTTest(std::span<const double> a, std::span<const double> b,
                         double alpha);

// Test on the element-wise differences a[i] - b[i], df = n - 1.
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b,
                        double alpha);

struct RatedPair {
  std::string content_id;
  std::string recipe_x;  // recipe_x < recipe_y lexicographically
  std::string recipe_y;
  double delta_obj = 0.0;  // |vmaf(x) - vmaf(y)|
  bool sig = false;
  double p_value = 1.0;

  // "content_id:recipe_x:recipe_y"
  std::string Id() const;

  friend bool operator==(const RatedPair&, const RatedPair&) = default;
};

// All N(N-1)/2 unordered recipe pairs of one content, canonically ordered.
// Throws InputError for an unknown content or N < 2.
std::vector<std::pair<std::string, std::string>> FormPairs(
    const Corpus& corpus, std::string_view content_id);

struct ClassifyOptions {
  double alpha = 0.05;
  TTestKind test = TTestKind::kWelch;
  int jobs = 1;
};

// Labels every formed pair of every content. Contents are processed in
// parallel; the output order is (content, recipe_x, recipe_y) regardless of
// `jobs`. Errors carry the pair they came from.
std::vector<RatedPair> ClassifyPairs(const Corpus& corpus,
                                     const ClassifyOptions& options = {});

// pairs.csv: content_id,recipe_x,recipe_y,delta_obj,p_value,sig
inline constexpr std::string_view kPairsHeader[] = {
    "content_id", "recipe_x", "recipe_y", "delta_obj", "p_value", "sig"};
void WritePairsCsv(std::span<const RatedPair> pairs, std::ostream& out);
std::vector<RatedPair> ReadPairsCsv(const std::filesystem::path& path);

}  // namespace jndmap

#endif  // JNDMAP_SIGNIFICANCE_H_
