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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "config.h"
#include "jndmap/codist_fit.h"
#include "jndmap/evaluate.h"
#include "jndmap/predict.h"
#include "jndmap/rangedecomp.h"
#include "jndmap/screening.h"
#include "jndmap/significance.h"
#include "jndmap/simulate.h"
#include "oracles.h"
#include "test_util.h"

namespace jndmap {
namespace {

namespace fs = std::filesystem;

// Tolerances and budgets.
constexpr double kCodistBudgetSeconds = 1.0;
constexpr double kRecoveryParamRms = 1e-4;
constexpr double kGlmGradientNorm = 1e-8;
constexpr double kFitBudgetSeconds = 5.0;
constexpr double kMonotoneTolerance = 1e-9;
constexpr int kMonotoneGridPoints = 1000;
constexpr double kInversionTolerance = 1e-6;
constexpr double kPValueTolerance = 2e-2;
constexpr double kBestMaeLimit = 1.5;
constexpr double kRunBudgetSeconds = 60.0;
constexpr double kThresholds[] = {0.75, 0.8, 0.85, 0.9, 0.95};

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

// Shared fixture: the default simulated corpus and two full runs of it.
struct Workspace {
  testing::TempDir dir;
  RunSummary summary1;
  RunSummary summary8;
  double run_seconds = 0.0;
  std::string error;

  Workspace() {
    try {
      ArtifactWriter sim(dir / "sim");
      CmdSimulate(SimSpec{}, sim, 1);
      CorpusPaths paths{dir / "sim" / "vmaf_scores.csv",
                        dir / "sim" / "dcr_ratings.csv",
                        dir / "sim" / "jnd_truth.csv"};
      std::ostringstream log;
      const auto start = std::chrono::steady_clock::now();
      ArtifactWriter run1(dir / "run1");
      summary1 = CmdRun(RunConfig{}, paths, run1, 1, log);
      run_seconds = Seconds(start);
      ArtifactWriter run8(dir / "run8");
      summary8 = CmdRun(RunConfig{}, paths, run8, 8, log);
    } catch (const std::exception& e) {
      error = e.what();
    }
  }
};

Outcome HistogramConservation() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 gen(2026);
  std::uniform_real_distribution<double> delta(0.0, 40.0);
  std::bernoulli_distribution sig(0.45);
  std::uniform_int_distribution<int> size(1, 60);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RatedPair> pairs(size(gen));
    SubQualityRange range{0, 100, {}};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      pairs[i].content_id = "c";
      pairs[i].recipe_x = "x" + std::to_string(i);
      pairs[i].recipe_y = "y" + std::to_string(i);
      pairs[i].delta_obj = delta(gen);
      pairs[i].sig = sig(gen);
      if (i % 3 != 1) range.pair_refs.push_back(i);
    }
    if (range.pair_refs.empty()) range.pair_refs.push_back(0);
    const double width = trial % 2 ? 2.0 : 1.5;
    const CoDistribution cd = BuildCoDistribution(range, pairs, width);
    // Independent recount.
    std::vector<std::int64_t> dif(cd.f_dif.size(), 0), sim(cd.f_sim.size(), 0);
    for (std::size_t ref : range.pair_refs) {
      std::size_t b = static_cast<std::size_t>(pairs[ref].delta_obj / width);
      b = std::min(b, dif.size() - 1);
      (pairs[ref].sig ? dif : sim)[b] += 1;
    }
    o.Check(dif == cd.f_dif && sim == cd.f_sim,
            "histogram mismatch in trial " + std::to_string(trial));
    const std::int64_t total =
        std::accumulate(cd.f_dif.begin(), cd.f_dif.end(), std::int64_t{0}) +
        std::accumulate(cd.f_sim.begin(), cd.f_sim.end(), std::int64_t{0});
    o.Check(total == static_cast<std::int64_t>(range.pair_refs.size()),
            "conservation fails in trial " + std::to_string(trial));
    std::size_t next = 0;
    for (const PsdPoint& p : PsdPoints(cd)) {
      while (next < dif.size() && dif[next] + sim[next] == 0) ++next;
      const double expected = static_cast<double>(dif[next]) /
                              static_cast<double>(dif[next] + sim[next]);
      o.Check(p.p_sd == expected && p.support == dif[next] + sim[next],
              "P_SD mismatch in trial " + std::to_string(trial));
      ++next;
    }
  }
  const double seconds = Seconds(start);
  o.Check(seconds < kCodistBudgetSeconds, "took " + Fixed(seconds) + " s");
  if (o.pass) o.detail = "100 sets, " + Fixed(seconds, 3) + " s";
  return o;
}

Outcome FitRecovery() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  struct Case {
    Family family;
    std::vector<double> params;
  };
  const std::vector<Case> cases{{Family::kLogistic5, {1, 0.8, 7, 0.01, 0.45}},
                                {Family::kCubic4, {0.02, 0.03, 0.001, -3e-5}},
                                {Family::kLogistic2, {0.5, 6}},
                                {Family::kGlm, {-3, 0.5}}};
  std::string worst;
  for (const Case& c : cases) {
    const MappingFunction truth = MakeMapping(c.family, c.params, 0, 20);
    std::vector<PsdPoint> points;
    for (int i = 0; i < 21; ++i) {
      const double x = 0.5 + 0.95 * i;
      points.push_back({x, truth.Raw(x), 10});
    }
    try {
      const MappingFunction fit = FitMapping(points, c.family);
      double sum = 0.0;
      for (std::size_t i = 0; i < c.params.size(); ++i) {
        sum += std::pow(fit.params[i] - c.params[i], 2);
      }
      const double rms = std::sqrt(sum / c.params.size());
      o.Check(rms < kRecoveryParamRms, std::string(FamilyName(c.family)) +
                                           " rms " + std::to_string(rms));
      if (c.family == Family::kGlm) {
        o.Check(fit.report.gradient_norm < kGlmGradientNorm,
                "glm gradient " + std::to_string(fit.report.gradient_norm));
      }
      worst += std::string(FamilyName(c.family)) + " " +
               std::to_string(rms) + " ";
    } catch (const std::exception& e) {
      o.Check(false, std::string(FamilyName(c.family)) + ": " + e.what());
    }
  }
  // Pair-level GLM on noisy labels: stationary point of the likelihood.
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> delta(0.0, 20.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RatedPair> pairs(500);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pairs[i].recipe_x = "x" + std::to_string(i);
    pairs[i].delta_obj = delta(gen);
    pairs[i].sig = unit(gen) < 1 / (1 + std::exp(-(pairs[i].delta_obj - 7)));
  }
  const MappingFunction glm =
      FitMapping(std::vector<PsdPoint>{}, Family::kGlm, {}, pairs);
  o.Check(glm.report.gradient_norm < kGlmGradientNorm,
          "pairwise glm gradient " + std::to_string(glm.report.gradient_norm));
  const double seconds = Seconds(start);
  o.Check(seconds < kFitBudgetSeconds, "took " + Fixed(seconds) + " s");
  if (o.pass) o.detail = "param rms " + worst + "in " + Fixed(seconds, 3) + " s";
  return o;
}

Outcome MonotoneInversion(const Workspace& ws) {
  Outcome o;
  if (!ws.error.empty()) {
    o.Check(false, ws.error);
    return o;
  }
  const ModelSet models = ModelSetFromJson(
      ReadJsonFile(ws.dir / "run1" / "mf_params.json"));
  int accepted = 0;
  int clamped = 0;
  for (const auto& [range, by_family] : models.models) {
    for (const auto& [family, mf] : by_family) {
      if (!mf.report.valid) continue;
      ++accepted;
      const std::string name = range + "/" + std::string(FamilyName(family));
      o.Check(IsMonotoneOnGrid(mf, kMonotoneGridPoints, kMonotoneTolerance),
              name + " not monotone");
      for (double thr : kThresholds) {
        const Inversion inv = InvertAtThreshold(mf, thr);
        const double value = mf.Evaluate(inv.delta_obj);
        if (inv.clamped) {
          ++clamped;
          // A clamped answer sits on a domain end where the curve misses thr.
          const bool at_top = inv.delta_obj == mf.domain_hi && value < thr;
          const bool at_bottom =
              inv.delta_obj == mf.domain_lo && value > thr + kInversionTolerance;
          o.Check(at_top || at_bottom, name + " clamped off the domain end");
        } else {
          o.Check(std::fabs(value - thr) <= kInversionTolerance,
                  name + " inverts " + std::to_string(thr) + " to " +
                      std::to_string(value));
        }
      }
    }
  }
  o.Check(accepted > 0, "no accepted fits");
  // Unreachable thresholds must come back flagged.
  const Inversion flat =
      InvertAtThreshold(MakeMapping(Family::kGlm, {0, 0}, 0, 20), 0.75);
  o.Check(flat.clamped, "flat curve inversion not flagged");
  if (o.pass) {
    o.detail = std::to_string(accepted) + " accepted fits, " +
               std::to_string(clamped) + " clamped inversions flagged";
  }
  return o;
}

Outcome StatisticsOracle() {
  Outcome o;
  double worst_reference = 0.0;
  double worst_permutation = 0.0;
  for (const testing::WelchFixture& f : testing::WelchFixtures()) {
    const TTestResult r = WelchTTest(f.a, f.b, 0.05);
    worst_reference = std::max(worst_reference, std::fabs(r.p_value - f.p));
    worst_permutation = std::max(
        worst_permutation,
        std::fabs(r.p_value - testing::PermutationPValue(f.a, f.b)));
  }
  o.Check(worst_reference <= kPValueTolerance,
          "reference p off by " + std::to_string(worst_reference));
  o.Check(worst_permutation <= kPValueTolerance,
          "permutation p off by " + std::to_string(worst_permutation));

  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 3, 4, 5, 6};
  const TTestResult hand = WelchTTest(a, b, 0.05);
  o.Check(hand.t == -1.0 && hand.df == 8.0,
          "hand example t=" + std::to_string(hand.t) +
              " df=" + std::to_string(hand.df));
  o.Check(!hand.significant, "hand example significant");

  const Corpus corpus = testing::InvertedObserverCorpus("o07");
  const ScreeningReport report = ScreenBt500(corpus);
  o.Check(report.removed == std::set<std::string>{"o07"},
          "screening removed " + std::to_string(report.removed.size()) +
              " observer(s)");
  if (o.pass) {
    o.detail = "max |dp| reference " + std::to_string(worst_reference) +
               ", permutation " + Fixed(worst_permutation) +
               "; t=-1 df=8; removed {o07}";
  }
  return o;
}

Outcome SyntheticRecovery(const Workspace& ws) {
  Outcome o;
  if (!ws.error.empty() || !ws.summary1.grid) {
    o.Check(false, ws.error.empty() ? "no evaluation grid" : ws.error);
    return o;
  }
  const auto best = ws.summary1.grid->BestCell();
  o.Check(best.has_value(), "no populated cell");
  if (!best) return o;
  o.Check(best->cell.mae <= kBestMaeLimit, "best MAE " + Fixed(best->cell.mae));
  o.Check(ws.run_seconds < kRunBudgetSeconds,
          "run took " + Fixed(ws.run_seconds) + " s");
  if (o.pass) {
    o.detail = "best " + best->group + " " +
               std::string(FamilyName(best->family)) + " thr " +
               Fixed(best->threshold, 2) + ": MAE " + Fixed(best->cell.mae) +
               " RMSE " + Fixed(best->cell.rmse) + " (n=" +
               std::to_string(best->cell.n) + ", run " +
               Fixed(ws.run_seconds, 2) + " s)";
  }
  return o;
}

Outcome PaperShape(const Workspace& ws) {
  Outcome o;
  const std::vector<double> bounds{30, 79, 86, 90, 95, 100};
  std::string ids;
  for (const SubQualityRange& r : DecomposeExplicit(bounds).ranges) {
    ids += (ids.empty() ? "" : ", ") + r.Id();
  }
  o.Check(ids == "(30,79], (79,86], (86,90], (90,95], (95,100]",
          "ranges " + ids);

  if (ws.summary1.grid) {
    std::istringstream table(RenderEvalTable(*ws.summary1.grid));
    std::vector<std::string> lines;
    for (std::string line; std::getline(table, line);) lines.push_back(line);
    const bool layout =
        lines.size() >= 13 && lines[1] == "MAE      5-para   4-para   2-para      GLM" &&
        lines[2].rfind("0.75", 0) == 0 && lines[6].rfind("0.95", 0) == 0 &&
        lines[7].rfind("RMSE", 0) == 0 && lines[12].rfind("0.95", 0) == 0;
    o.Check(layout, "evaluation table layout differs");
  } else {
    o.Check(false, "no evaluation grid");
  }

  const std::string readme =
      testing::ReadText(fs::path(JNDMAP_SOURCE_DIR) / "README.md");
  for (const char* cell : {"3.4963", "4.8471", "3.2493", "3.0491", "4.1053"}) {
    o.Check(readme.find(cell) != std::string::npos,
            std::string("README lacks ") + cell);
  }
  if (o.pass) o.detail = ids + "; 5x4 grid; reference cells documented";
  return o;
}

Outcome Determinism(const Workspace& ws) {
  Outcome o;
  if (!ws.error.empty()) {
    o.Check(false, ws.error);
    return o;
  }
  for (const char* name : {"metrics.json", "mf_params.json"}) {
    const std::string one = testing::ReadText(ws.dir / "run1" / name);
    const std::string eight = testing::ReadText(ws.dir / "run8" / name);
    o.Check(!one.empty() && one == eight, std::string(name) + " differs");
  }
  if (o.pass) o.detail = "metrics.json and mf_params.json identical, jobs 1 vs 8";
  return o;
}

}  // namespace
}  // namespace jndmap

int main() {
  using jndmap::Outcome;
  const jndmap::Workspace ws;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 histogram conservation", jndmap::HistogramConservation},
      {"AC2 fit recovery", jndmap::FitRecovery},
      {"AC3 monotonicity and inversion",
       [&] { return jndmap::MonotoneInversion(ws); }},
      {"AC4 statistics oracle", jndmap::StatisticsOracle},
      {"AC5 synthetic recovery", [&] { return jndmap::SyntheticRecovery(ws); }},
      {"AC6 table shape", [&] { return jndmap::PaperShape(ws); }},
      {"AC7 determinism", [&] { return jndmap::Determinism(ws); }},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.Check(false, e.what());
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
