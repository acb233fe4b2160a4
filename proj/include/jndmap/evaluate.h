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

// MAE/RMSE of predicted JNDs against ground truth over a grid of
// (threshold x family) cells, grouped by direction and JND order.

#ifndef JNDMAP_EVALUATE_H_
#define JNDMAP_EVALUATE_H_

#include <map>
#include <string>
#include <vector>

#include "jndmap/codist_fit.h"
#include "jndmap/corpus.h"
#include "jndmap/predict.h"
#include "jndmap/rangedecomp.h"
#include "json.hpp"

namespace jndmap {

// |vmaf(anchor) - vmaf(jnd)|. Sets *degenerate when anchor and JND are the
// same stimulus. Throws InputError for unknown stimuli.
double GroundTruthDelta(const Corpus& corpus, const JndTruth& truth,
                        bool* degenerate = nullptr);

// "dec" / "inc" for first-order JNDs, "dec_order2" etc. otherwise.
std::string TruthGroup(const JndTruth& truth);

struct EvalOptions {
  std::vector<double> thresholds{0.75, 0.8, 0.85, 0.9, 0.95};
  std::vector<Family> families{std::begin(kAllFamilies),
                               std::end(kAllFamilies)};
  // Order-k truths are predicted by k chained steps from the anchor, each
  // step restarting from the stimulus nearest the previous target. When
  // false every truth is a single step from its recorded anchor.
  bool chain = true;
  int jobs = 1;
};

struct EvalCell {
  double mae = 0.0;  // NaN when n == 0
  double rmse = 0.0;
  int n = 0;
  int clamped = 0;
  int failed = 0;  // truths without a usable model for this family
};

struct EvalGrid {
  std::vector<double> thresholds;
  std::vector<Family> families;
  // group -> family -> threshold index -> cell
  std::map<std::string, std::map<Family, std::vector<EvalCell>>> cells;
  // Final prediction of every (truth, family, threshold), in truth order.
  std::vector<JndPrediction> predictions;

  struct Best {
    std::string group;
    Family family = Family::kGlm;
    double threshold = 0.0;
    EvalCell cell;
  };
  // Smallest MAE over cells with n > 0, optionally within one group.
  std::optional<Best> BestCell(const std::string& group = "") const;
};

// Throws InputError when the corpus holds no truths.
EvalGrid EvaluateGrid(const Corpus& corpus, const ModelSet& models,
                      const Decomposition& decomposition,
                      const EvalOptions& options);

// MAE and RMSE of a list of signed errors.
EvalCell ErrorStats(const std::vector<double>& errors);

// {group: {family: {threshold: {mae, rmse, n, clamped, failed}}}}; empty
// cells carry null mae and rmse.
nlohmann::ordered_json EvalGridToJson(const EvalGrid& grid);

// Aligned text tables, one MAE block and one RMSE block per group with
// thresholds as rows and families as columns.
std::string RenderEvalTable(const EvalGrid& grid);

}  // namespace jndmap

#endif  // JNDMAP_EVALUATE_H_
