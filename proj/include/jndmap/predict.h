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

// Fits one mapping function per (sub-quality range, family), inverts them at
// a threshold and turns the resulting delta-VMAF into a target score for an
// anchor stimulus.

#ifndef JNDMAP_PREDICT_H_
#define JNDMAP_PREDICT_H_

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "jndmap/codist_fit.h"
#include "jndmap/corpus.h"
#include "jndmap/rangedecomp.h"
#include "jndmap/significance.h"
#include "json.hpp"

namespace jndmap {

struct ModelSetOptions {
  double bin_width = 2.0;
  GlmMode glm_mode = GlmMode::kPairwise;
  std::vector<Family> families{std::begin(kAllFamilies),
                               std::end(kAllFamilies)};
  FitOptions fit;
  int jobs = 1;
};

// Everything fitted for one decomposition. A (range, family) either has a
// model or a failure message, never both.
struct ModelSet {
  double bin_width = 2.0;
  GlmMode glm_mode = GlmMode::kPairwise;
  std::vector<CoDistribution> codists;  // one per range, in range order
  std::map<std::string, std::map<Family, MappingFunction>> models;
  std::map<std::string, std::map<Family, std::string>> failures;

  // Throws PredictError when the combination was not fitted, failed, or was
  // rejected as non-monotone.
  const MappingFunction& Get(const std::string& range_id, Family family) const;
};

// Builds the co-distribution of every range holding at least one pair and
// fits each requested family on it. Ranges without pairs get a failure
// entry for every family. Fit errors are recorded, not thrown.
ModelSet FitModels(std::span<const RatedPair> pairs,
                   const Decomposition& decomposition,
                   const ModelSetOptions& options);

// mf_params.json:
// {"bin_width":2,"glm_mode":"pairwise",
//  "ranges":{"(79,86]":{"glm":{"params":[...],"domain":[lo,hi],
//                              "fit_report":{...}},
//                       "cubic4":{"error":"..."}}}}
nlohmann::ordered_json ModelSetToJson(const ModelSet& models);
// Codists are not stored in mf_params.json and stay empty.
ModelSet ModelSetFromJson(const nlohmann::ordered_json& json);

struct RangeSelection {
  std::size_t index = 0;
  bool clamped = false;  // anchor outside coverage, nearest range used
};

RangeSelection SelectRange(const Decomposition& decomposition,
                           double anchor_vmaf);

struct Inversion {
  double delta_obj = 0.0;
  bool clamped = false;
};

// Smallest delta in the domain with mf(delta) >= threshold, by bisection.
// When the curve never reaches the threshold the domain maximum is returned
// with clamped set; when it already exceeds it at the domain minimum the
// minimum is returned with clamped set. Throws PredictError for an invalid
// curve or a threshold outside (0, 1).
Inversion InvertAtThreshold(const MappingFunction& mf, double threshold);

struct JndPrediction {
  std::string content_id;
  std::string anchor_recipe_id;
  double anchor_vmaf = 0.0;
  Direction direction = Direction::kDec;
  std::string range_id;
  Family family = Family::kGlm;
  double threshold = 0.0;
  double delta_obj_jnd = 0.0;
  double target_vmaf = 0.0;
  bool clamped = false;  // range, inversion or target clamping happened
};

// target = anchor + delta (inc) or anchor - delta (dec), clamped to [0, 100].
JndPrediction PredictJnd(const ModelSet& models,
                         const Decomposition& decomposition,
                         const Stimulus& anchor, Direction direction,
                         double threshold, Family family);

inline constexpr std::string_view kPredictionsHeader[] = {
    "content_id", "anchor_recipe_id", "direction",
    "range_id",   "family",           "threshold",
    "delta_obj_jnd", "target_vmaf",   "clamped"};

void WritePredictionsHeader(std::ostream& out);
void WritePrediction(const JndPrediction& p, std::ostream& out);

}  // namespace jndmap

#endif  // JNDMAP_PREDICT_H_
