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

#include "jndmap/evaluate.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "jndmap/error.h"
#include "jndmap/simulate.h"
#include "test_util.h"

namespace jndmap {
namespace {

using testing::MakeStimulus;

TEST(ErrorStats, TwoPoints) {
  const EvalCell cell = ErrorStats({1.0, -2.0});
  EXPECT_DOUBLE_EQ(cell.mae, 1.5);
  EXPECT_DOUBLE_EQ(cell.rmse, std::sqrt(2.5));
  EXPECT_EQ(cell.n, 2);
  EXPECT_TRUE(std::isnan(ErrorStats({}).mae));
}

TEST(ErrorStats, MaeNeverExceedsRmse) {
  std::mt19937 gen(1);
  std::normal_distribution<double> err(0.5, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> errors(1 + trial % 17);
    for (double& e : errors) e = err(gen);
    const EvalCell cell = ErrorStats(errors);
    EXPECT_GE(cell.mae, 0.0);
    EXPECT_LE(cell.mae, cell.rmse + 1e-12);
  }
}

std::vector<Stimulus> Ladder(const std::string& content,
                             const std::vector<double>& vmafs) {
  std::vector<Stimulus> out;
  for (std::size_t i = 0; i < vmafs.size(); ++i) {
    out.push_back(MakeStimulus(content, "r" + std::to_string(i + 1), vmafs[i]));
  }
  return out;
}

// c1: 95 -> 90.2 is the first dec JND (4.8), 85.4 the second.
// c2: 95 -> 88.2 is the first dec JND (6.8).
Corpus HandCorpus(bool reversed) {
  std::vector<Stimulus> stimuli = Ladder("c1", {95, 90.2, 85.4, 80});
  for (Stimulus& s : Ladder("c2", {95, 88.2, 80})) stimuli.push_back(s);
  std::vector<JndTruth> truths{{"c1", "r1", Direction::kDec, "r2", 1},
                               {"c2", "r1", Direction::kDec, "r2", 1},
                               {"c1", "r1", Direction::kDec, "r3", 2}};
  if (reversed) std::reverse(truths.begin(), truths.end());
  return Corpus::Create(std::move(stimuli), {}, std::move(truths));
}

ModelSet StepModel(double delta) {
  ModelSet set;
  set.models["(0,100]"][Family::kLogistic2] =
      MakeMapping(Family::kLogistic2, {1, delta}, 0, 20);
  return set;
}

EvalOptions HalfThreshold() {
  EvalOptions options;
  options.thresholds = {0.5};
  options.families = {Family::kLogistic2};
  return options;
}

TEST(GroundTruth, Delta) {
  const Corpus corpus = HandCorpus(false);
  bool degenerate = true;
  EXPECT_NEAR(GroundTruthDelta(corpus, {"c1", "r1", Direction::kDec, "r2", 1},
                               &degenerate),
              4.8, 1e-12);
  EXPECT_FALSE(degenerate);
  EXPECT_EQ(TruthGroup({"c1", "r1", Direction::kDec, "r3", 2}), "dec_order2");
  EXPECT_EQ(TruthGroup({"c1", "r4", Direction::kInc, "r3", 1}), "inc");
  EXPECT_THROW(
      GroundTruthDelta(corpus, {"c1", "r1", Direction::kDec, "r9", 1}),
      InputError);
}

TEST(EvaluateGrid, KnownErrors) {
  const Decomposition d = DecomposeExplicit(std::vector<double>{0, 100});
  const EvalGrid grid =
      EvaluateGrid(HandCorpus(false), StepModel(4.8), d, HalfThreshold());
  // c1 is exact, c2 is 2 short.
  const EvalCell& dec = grid.cells.at("dec").at(Family::kLogistic2)[0];
  EXPECT_EQ(dec.n, 2);
  EXPECT_NEAR(dec.mae, 1.0, 1e-9);
  EXPECT_NEAR(dec.rmse, std::sqrt(2.0), 1e-9);
  // Two chained 4.8 steps land exactly on the second JND.
  const EvalCell& second = grid.cells.at("dec_order2").at(Family::kLogistic2)[0];
  EXPECT_EQ(second.n, 1);
  EXPECT_NEAR(second.mae, 0.0, 1e-9);
  EXPECT_EQ(grid.predictions.size(), 3u);
}

TEST(EvaluateGrid, PerfectPredictions) {
  std::vector<JndTruth> truths{{"c1", "r1", Direction::kDec, "r2", 1}};
  const Corpus corpus = Corpus::Create(Ladder("c1", {95, 90.2, 85.4}), {},
                                       std::move(truths));
  const Decomposition d = DecomposeExplicit(std::vector<double>{0, 100});
  const EvalGrid grid = EvaluateGrid(corpus, StepModel(4.8), d, HalfThreshold());
  const EvalCell& cell = grid.cells.at("dec").at(Family::kLogistic2)[0];
  EXPECT_NEAR(cell.mae, 0.0, 1e-9);
  EXPECT_NEAR(cell.rmse, 0.0, 1e-9);
  ASSERT_TRUE(grid.BestCell().has_value());
  EXPECT_EQ(grid.BestCell()->group, "dec");
}

TEST(EvaluateGrid, TruthOrderDoesNotMatter) {
  const Decomposition d = DecomposeExplicit(std::vector<double>{0, 100});
  const EvalGrid a =
      EvaluateGrid(HandCorpus(false), StepModel(5.3), d, HalfThreshold());
  const EvalGrid b =
      EvaluateGrid(HandCorpus(true), StepModel(5.3), d, HalfThreshold());
  EXPECT_EQ(EvalGridToJson(a).dump(), EvalGridToJson(b).dump());
}

TEST(EvaluateGrid, MissingModelCountsAsFailed) {
  const Decomposition d = DecomposeExplicit(std::vector<double>{0, 100});
  EvalOptions options = HalfThreshold();
  options.families = {Family::kLogistic2, Family::kGlm};
  const EvalGrid grid =
      EvaluateGrid(HandCorpus(false), StepModel(4.8), d, options);
  const EvalCell& glm = grid.cells.at("dec").at(Family::kGlm)[0];
  EXPECT_EQ(glm.n, 0);
  EXPECT_EQ(glm.failed, 2);
  const nlohmann::ordered_json json = EvalGridToJson(grid);
  EXPECT_TRUE(json["dec"]["glm"]["0.5"]["mae"].is_null());
}

TEST(EvaluateGrid, NeedsTruths) {
  const Corpus corpus = Corpus::Create(Ladder("c1", {95, 90}), {}, {});
  const Decomposition d = DecomposeExplicit(std::vector<double>{0, 100});
  EXPECT_THROW(EvaluateGrid(corpus, StepModel(4.8), d, HalfThreshold()),
               InputError);
}

TEST(RenderEvalTable, Layout) {
  const Decomposition d = DecomposeExplicit(std::vector<double>{0, 100});
  EvalOptions options;
  options.families = {std::begin(kAllFamilies), std::end(kAllFamilies)};
  ModelSet set = StepModel(4.8);
  set.models["(0,100]"][Family::kGlm] =
      MakeMapping(Family::kGlm, {-4.8, 1}, 0, 20);
  const EvalGrid grid = EvaluateGrid(HandCorpus(false), set, d, options);
  const std::string table = RenderEvalTable(grid);
  std::istringstream in(table);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_GE(lines.size(), 14u);
  EXPECT_EQ(lines[0], "dec");
  EXPECT_EQ(lines[1], "MAE      5-para   4-para   2-para      GLM");
  EXPECT_EQ(lines[2].substr(0, 6), "0.75  ");
  EXPECT_EQ(lines[6].substr(0, 6), "0.95  ");
  EXPECT_EQ(lines[7].substr(0, 4), "RMSE");
  // Unfitted families print a dash.
  EXPECT_EQ(lines[2].substr(6, 9), "        -");
}

TEST(EvaluateGrid, SimulatedBestCellBeatsTheLadderStep) {
  SimSpec spec;
  spec.n_contents = 12;
  const SimResult sim = SimulateCorpus(spec);
  const std::vector<RatedPair> pairs = ClassifyPairs(sim.corpus);
  const Decomposition d =
      AssignPairs(pairs, DecomposeBalanced(sim.corpus, 3), sim.corpus);
  const ModelSet set = FitModels(pairs, d, {});
  const EvalGrid grid = EvaluateGrid(sim.corpus, set, d, {});
  const auto best = grid.BestCell();
  ASSERT_TRUE(best.has_value());
  EXPECT_LT(best->cell.mae, spec.step_min);
  for (const auto& [group, by_family] : grid.cells) {
    for (const auto& [family, cells] : by_family) {
      for (const EvalCell& c : cells) {
        if (c.n > 0) {
          EXPECT_LE(c.mae, c.rmse + 1e-12);
        }
      }
    }
  }
}

}  // namespace
}  // namespace jndmap
