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

// Co-distributions of delta-VMAF for significantly-different and similar
// pairs, the per-bin probability of a significant difference (P_SD) they
// imply, and monotone mapping functions fitted to those probabilities.
//
// For a bin b of one sub-quality range:
//
//   f_dif[b] = #pairs in the range with delta in bin b and sig = 1
//   f_sim[b] = #pairs in the range with delta in bin b and sig = 0
//   P_SD(b)  = f_dif[b] / (f_dif[b] + f_sim[b])
//
// Four curve families map delta -> P_SD:
//
//   logistic5  b1 * (0.5 - 1 / (1 + exp(b2 * (d - b3)))) + b4 * d + b5
//   cubic4     b1 + b2 * d + b3 * d^2 + b4 * d^3
//   logistic2  1 / (1 + exp(-b1 * (d - b2)))
//   glm        1 / (1 + exp(-(b0 + b1 * d)))
//
// The first three minimize support-weighted squared error with
// Levenberg-Marquardt from deterministic multi-starts; glm maximizes the
// binomial likelihood by iteratively reweighted least squares.

#ifndef JNDMAP_CODIST_FIT_H_
#define JNDMAP_CODIST_FIT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jndmap/rangedecomp.h"
#include "jndmap/significance.h"
#include "json.hpp"

namespace jndmap {

enum class Family { kLogistic5, kCubic4, kLogistic2, kGlm };

inline constexpr Family kAllFamilies[] = {Family::kLogistic5, Family::kCubic4,
                                          Family::kLogistic2, Family::kGlm};

// "logistic5", "cubic4", "logistic2", "glm".
std::string_view FamilyName(Family family);
// Column labels of the evaluation tables: "5-para", "4-para", "2-para", "GLM".
std::string_view FamilyLabel(Family family);
Family ParseFamily(std::string_view text);
int ParameterCount(Family family);

// Which observations the glm family is fitted to.
enum class GlmMode { kPairwise, kPoints };

std::string_view GlmModeName(GlmMode mode);
GlmMode ParseGlmMode(std::string_view text);

struct CoDistribution {
  std::string range_id;
  std::vector<double> bin_edges;  // 0, w, 2w, ..., >= ceil(max delta)
  std::vector<std::int64_t> f_dif;
  std::vector<std::int64_t> f_sim;
};

// Histograms the pairs listed in range.pair_refs (indices into `pairs`).
// Bins are [e_i, e_{i+1}); a delta equal to the last edge lands in the last
// bin. Throws InputError for bin_width <= 0 or an empty range.
CoDistribution BuildCoDistribution(const SubQualityRange& range,
                                   std::span<const RatedPair> pairs,
                                   double bin_width);

struct PsdPoint {
  double delta_obj = 0.0;  // bin center
  double p_sd = 0.0;
  std::int64_t support = 0;  // f_dif + f_sim, always > 0
};

// One point per non-empty bin, in delta order.
std::vector<PsdPoint> PsdPoints(const CoDistribution& cd);

struct FitReport {
  double residual_norm = 0.0;  // sqrt of the weighted SSE, or glm deviance
  bool monotone = false;
  int iterations = 0;
  bool valid = false;  // accepted for prediction
  int seed_index = -1;
  double penalty_lambda = 0.0;  // 0 when no monotonicity penalty was needed
  double gradient_norm = 0.0;   // glm: norm of the deviance gradient
  bool separation = false;      // glm: perfectly separated observations
  bool slope_capped = false;    // glm: |b1| hit the cap
  bool constant_labels = false;
  std::string note;
};

struct MappingFunction {
  Family family = Family::kGlm;
  std::vector<double> params;
  double domain_lo = 0.0;
  double domain_hi = 0.0;
  FitReport report;

  // Model value without any clamping.
  double Raw(double delta) const;
  // d Raw / d delta.
  double Slope(double delta) const;
  // Clamps `delta` into the domain (setting *clamped when it had to) and the
  // result into [0, 1].
  double Evaluate(double delta, bool* clamped = nullptr) const;
};

// Builds a curve with known parameters; report.monotone and report.valid are
// set from the grid check.
MappingFunction MakeMapping(Family family, std::vector<double> params,
                            double domain_lo, double domain_hi);

// Non-decreasing on an evenly spaced grid of `grid_points` over the domain:
// mf(x[i+1]) >= mf(x[i]) - tolerance, using clamped evaluation.
bool IsMonotoneOnGrid(const MappingFunction& mf, int grid_points = 1000,
                      double tolerance = 1e-9);

struct FitOptions {
  // Defaults to [min(0, smallest delta), largest delta].
  std::optional<std::pair<double, double>> domain;
  double penalty_lambda = 1e3;
  int penalty_retries = 3;  // lambda doubles on each retry
  int max_irls_iterations = 100;
  double glm_slope_cap = 50.0;
};

// Fits one family. For glm, non-empty `glm_pairs` switches to pair-level
// binary observations (delta_obj, sig); otherwise the points are used as
// binomial proportions weighted by support. Curves that stay non-monotone
// after the penalty retries are returned with report.valid == false.
// Throws FitError when there are too few points or IRLS fails to converge.
MappingFunction FitMapping(std::span<const PsdPoint> points, Family family,
                           const FitOptions& options = {},
                           std::span<const RatedPair> glm_pairs = {});

// codist.csv rows for one co-distribution (header written separately).
inline constexpr std::string_view kCodistHeader[] = {
    "range_id", "bin_lo", "bin_hi", "f_dif", "f_sim", "p_sd"};
void WriteCodistHeader(std::ostream& out);
void WriteCodistRows(const CoDistribution& cd, std::ostream& out);

// curve_samples.csv: range_id,family,delta_obj,p_sd with `samples` evenly
// spaced points per curve.
void WriteCurveSamplesHeader(std::ostream& out);
void WriteCurveSamples(std::string_view range_id, const MappingFunction& mf,
                       std::ostream& out, int samples = 200);

nlohmann::ordered_json MappingToJson(const MappingFunction& mf);
MappingFunction MappingFromJson(Family family,
                                const nlohmann::ordered_json& json);

}  // namespace jndmap

#endif  // JNDMAP_CODIST_FIT_H_
