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

#include "jndmap/codist_fit.h"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "jndmap/error.h"

namespace jndmap {
namespace {

RatedPair MakePair(int i, double delta, bool sig) {
  RatedPair p;
  p.content_id = "c";
  p.recipe_x = "x" + std::to_string(i);
  p.recipe_y = "y" + std::to_string(i);
  p.delta_obj = delta;
  p.sig = sig;
  p.p_value = sig ? 0.01 : 0.5;
  return p;
}

SubQualityRange AllOf(std::size_t n) {
  SubQualityRange r{80, 90, {}};
  r.pair_refs.resize(n);
  std::iota(r.pair_refs.begin(), r.pair_refs.end(), 0);
  return r;
}

std::vector<PsdPoint> Sample(const MappingFunction& truth, int n, double lo,
                             double hi, std::int64_t support = 10) {
  std::vector<PsdPoint> points;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    points.push_back({x, truth.Raw(x), support});
  }
  return points;
}

double ParamRms(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum / a.size());
}

TEST(CoDistribution, Tally) {
  const std::vector<RatedPair> pairs{MakePair(0, 1, false),
                                     MakePair(1, 1, false),
                                     MakePair(2, 7, true)};
  const CoDistribution cd = BuildCoDistribution(AllOf(3), pairs, 2.0);
  EXPECT_EQ(cd.range_id, "(80,90]");
  EXPECT_EQ(cd.bin_edges, (std::vector<double>{0, 2, 4, 6, 8}));
  EXPECT_EQ(cd.f_sim, (std::vector<std::int64_t>{2, 0, 0, 0}));
  EXPECT_EQ(cd.f_dif, (std::vector<std::int64_t>{0, 0, 0, 1}));
  const std::vector<PsdPoint> points = PsdPoints(cd);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_DOUBLE_EQ(points[0].delta_obj, 1.0);
  EXPECT_DOUBLE_EQ(points[0].p_sd, 0.0);
  EXPECT_EQ(points[0].support, 2);
  EXPECT_DOUBLE_EQ(points[1].delta_obj, 7.0);
  EXPECT_DOUBLE_EQ(points[1].p_sd, 1.0);
}

TEST(CoDistribution, AllSignificant) {
  const std::vector<RatedPair> pairs{MakePair(0, 0.5, true),
                                     MakePair(1, 3, true)};
  const CoDistribution cd = BuildCoDistribution(AllOf(2), pairs, 2.0);
  for (std::int64_t f : cd.f_sim) EXPECT_EQ(f, 0);
}

TEST(CoDistribution, ProportionArithmetic) {
  std::vector<RatedPair> pairs;
  int i = 0;
  auto add = [&](double delta, int dif, int sim) {
    for (int k = 0; k < dif; ++k) pairs.push_back(MakePair(i++, delta, true));
    for (int k = 0; k < sim; ++k) pairs.push_back(MakePair(i++, delta, false));
  };
  add(1, 3, 1);
  add(3, 0, 5);
  add(5, 2, 2);
  const std::vector<PsdPoint> points =
      PsdPoints(BuildCoDistribution(AllOf(pairs.size()), pairs, 2.0));
  ASSERT_EQ(points.size(), 3u);
  EXPECT_DOUBLE_EQ(points[0].p_sd, 0.75);
  EXPECT_DOUBLE_EQ(points[1].p_sd, 0.0);
  EXPECT_DOUBLE_EQ(points[2].p_sd, 0.5);
}

TEST(CoDistribution, ConservationOnRandomSets) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> delta(0.0, 30.0);
  std::bernoulli_distribution sig(0.4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RatedPair> pairs;
    const int n = 1 + trial % 37;
    for (int i = 0; i < n; ++i) pairs.push_back(MakePair(i, delta(gen), sig(gen)));
    // Every other pair, so the range holds a strict subset.
    SubQualityRange range{0, 100, {}};
    for (int i = 0; i < n; i += 2) range.pair_refs.push_back(i);
    const CoDistribution cd = BuildCoDistribution(range, pairs, 2.0);
    std::int64_t total = 0;
    for (std::size_t b = 0; b < cd.f_dif.size(); ++b) {
      total += cd.f_dif[b] + cd.f_sim[b];
    }
    EXPECT_EQ(total, static_cast<std::int64_t>(range.pair_refs.size()));
    for (const PsdPoint& p : PsdPoints(cd)) {
      EXPECT_GT(p.support, 0);
      EXPECT_GE(p.p_sd, 0.0);
      EXPECT_LE(p.p_sd, 1.0);
    }
  }
}

TEST(CoDistribution, RejectsBadInput) {
  const std::vector<RatedPair> pairs{MakePair(0, 1, false)};
  EXPECT_THROW(BuildCoDistribution(AllOf(1), pairs, 0.0), InputError);
  EXPECT_THROW(BuildCoDistribution(AllOf(0), pairs, 2.0), InputError);
}

TEST(MappingFunction, Values) {
  const MappingFunction l2 = MakeMapping(Family::kLogistic2, {0.5, 6}, 0, 20);
  EXPECT_DOUBLE_EQ(l2.Evaluate(6), 0.5);
  const MappingFunction glm = MakeMapping(Family::kGlm, {-3, 0.5}, 0, 20);
  EXPECT_DOUBLE_EQ(glm.Evaluate(6), 0.5);
  EXPECT_TRUE(glm.report.monotone);
  EXPECT_LE(glm.Evaluate(0), glm.Evaluate(20));
  bool clamped = false;
  EXPECT_DOUBLE_EQ(glm.Evaluate(25, &clamped), glm.Evaluate(20));
  EXPECT_TRUE(clamped);
  const MappingFunction cubic =
      MakeMapping(Family::kCubic4, {-0.5, 0.2, 0, 0}, 0, 20);
  EXPECT_EQ(cubic.Evaluate(0), 0.0);
  EXPECT_EQ(cubic.Evaluate(20), 1.0);
  const MappingFunction l5 =
      MakeMapping(Family::kLogistic5, {1, 0.8, 7, 0.01, 0.45}, 0, 20);
  EXPECT_NEAR(l5.Raw(7), 0.52, 1e-15);
}

TEST(MappingFunction, SlopeMatchesFiniteDifference) {
  const std::vector<MappingFunction> curves{
      MakeMapping(Family::kLogistic5, {1, 0.8, 7, 0.01, 0.45}, 0, 20),
      MakeMapping(Family::kCubic4, {0.02, 0.03, 0.001, -3e-5}, 0, 20),
      MakeMapping(Family::kLogistic2, {0.5, 6}, 0, 20),
      MakeMapping(Family::kGlm, {-3, 0.5}, 0, 20)};
  for (const MappingFunction& mf : curves) {
    for (double x : {1.0, 5.5, 13.0}) {
      const double h = 1e-5;
      EXPECT_NEAR(mf.Slope(x), (mf.Raw(x + h) - mf.Raw(x - h)) / (2 * h), 1e-8)
          << FamilyName(mf.family);
    }
  }
}

struct RecoveryCase {
  Family family;
  std::vector<double> params;
  double tolerance;
};

class Recovery : public ::testing::TestWithParam<RecoveryCase> {};

TEST_P(Recovery, RefitsNoiselessSamples) {
  const RecoveryCase& c = GetParam();
  const MappingFunction truth = MakeMapping(c.family, c.params, 0, 20);
  ASSERT_TRUE(truth.report.valid);
  const std::vector<PsdPoint> points = Sample(truth, 21, 0.5, 19.5);
  const MappingFunction fit = FitMapping(points, c.family);
  EXPECT_TRUE(fit.report.valid) << fit.report.note;
  EXPECT_TRUE(IsMonotoneOnGrid(fit));
  EXPECT_LT(ParamRms(fit.params, c.params), c.tolerance)
      << FamilyName(c.family);
  if (c.family == Family::kGlm) {
    EXPECT_LT(fit.report.gradient_norm, 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Families, Recovery,
    ::testing::Values(
        RecoveryCase{Family::kLogistic5, {1, 0.8, 7, 0.01, 0.45}, 1e-4},
        RecoveryCase{Family::kCubic4, {0.02, 0.03, 0.001, -3e-5}, 1e-4},
        RecoveryCase{Family::kLogistic2, {0.5, 6}, 1e-6},
        RecoveryCase{Family::kGlm, {-3, 0.5}, 1e-6}));

TEST(Glm, IndependentLabelsGiveFlatCurve) {
  std::vector<PsdPoint> points;
  for (int i = 0; i < 8; ++i) points.push_back({1.0 + 2 * i, 0.5, 10});
  const MappingFunction fit = FitMapping(points, Family::kGlm);
  EXPECT_NEAR(fit.params[1], 0.0, 1e-9);
  EXPECT_NEAR(fit.Evaluate(3), 0.5, 1e-9);
  EXPECT_NEAR(fit.Evaluate(14), 0.5, 1e-9);
  EXPECT_TRUE(fit.report.monotone);
}

double Deviance(double b0, double b1, const std::vector<RatedPair>& pairs) {
  double dev = 0.0;
  for (const RatedPair& p : pairs) {
    const double mu = 1.0 / (1.0 + std::exp(-(b0 + b1 * p.delta_obj)));
    dev -= 2.0 * std::log(p.sig ? mu : 1.0 - mu);
  }
  return dev;
}

TEST(Glm, PairwiseStationaryPoint) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> delta(0.0, 20.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RatedPair> pairs;
  for (int i = 0; i < 400; ++i) {
    const double d = delta(gen);
    pairs.push_back(MakePair(i, d, unit(gen) < 1 / (1 + std::exp(-(d - 8)))));
  }
  const std::vector<PsdPoint> points =
      PsdPoints(BuildCoDistribution(AllOf(pairs.size()), pairs, 2.0));
  const MappingFunction fit = FitMapping(points, Family::kGlm, {}, pairs);
  EXPECT_LT(fit.report.gradient_norm, 1e-8);
  EXPECT_TRUE(fit.report.valid);
  EXPECT_GT(fit.params[1], 0.0);

  int ones = 0;
  for (const RatedPair& p : pairs) ones += p.sig;
  const double ybar = static_cast<double>(ones) / pairs.size();
  const double null_dev = Deviance(std::log(ybar / (1 - ybar)), 0.0, pairs);
  const double dev = Deviance(fit.params[0], fit.params[1], pairs);
  EXPECT_LE(dev, null_dev);
  EXPECT_NEAR(fit.report.residual_norm, std::sqrt(dev), 1e-6);
  // A nudge in any direction does not lower the deviance.
  for (double e0 : {-1e-4, 0.0, 1e-4}) {
    for (double e1 : {-1e-5, 0.0, 1e-5}) {
      EXPECT_GE(Deviance(fit.params[0] + e0, fit.params[1] + e1, pairs),
                dev - 1e-9);
    }
  }
}

TEST(Glm, SeparatedLabelsAreCapped) {
  std::vector<RatedPair> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back(MakePair(i, i, i >= 5));
  const MappingFunction fit =
      FitMapping(std::vector<PsdPoint>{}, Family::kGlm, {}, pairs);
  EXPECT_TRUE(fit.report.separation);
  EXPECT_TRUE(fit.report.slope_capped);
  EXPECT_LE(std::fabs(fit.params[1]), 50.0);
  EXPECT_TRUE(fit.report.monotone);
}

TEST(Cubic, DecreasingPointsAreRejected) {
  std::vector<PsdPoint> points;
  for (int i = 0; i < 10; ++i) points.push_back({1.0 + 2 * i, 0.9 - 0.04 * i, 10});
  const MappingFunction fit = FitMapping(points, Family::kCubic4);
  EXPECT_FALSE(fit.report.monotone);
  EXPECT_FALSE(fit.report.valid);
}

TEST(FitMapping, TooFewPoints) {
  const std::vector<PsdPoint> points{{1, 0.1, 3}, {3, 0.5, 3}, {5, 0.9, 3}};
  EXPECT_THROW(FitMapping(points, Family::kLogistic2), FitError);
  EXPECT_THROW(FitMapping(points, Family::kGlm), FitError);
}

TEST(FitMapping, AcceptedFitsAreMonotone) {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> noise(-0.08, 0.08);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<PsdPoint> points;
    for (int i = 0; i < 10; ++i) {
      const double x = 1.0 + 2 * i;
      const double p = 1 / (1 + std::exp(-(x - 8) * 0.4)) + noise(gen);
      points.push_back({x, std::clamp(p, 0.0, 1.0), 12});
    }
    for (Family family : kAllFamilies) {
      const MappingFunction fit = FitMapping(points, family);
      if (fit.report.valid) {
        EXPECT_TRUE(IsMonotoneOnGrid(fit, 1000, 1e-9)) << FamilyName(family);
      }
    }
  }
}

TEST(MappingJson, RoundTrip) {
  const MappingFunction truth =
      MakeMapping(Family::kLogistic2, {0.5, 6}, 0, 20);
  const MappingFunction fit =
      FitMapping(Sample(truth, 10, 1, 19), Family::kLogistic2);
  const MappingFunction back =
      MappingFromJson(Family::kLogistic2, MappingToJson(fit));
  EXPECT_EQ(back.params, fit.params);
  EXPECT_EQ(back.domain_lo, fit.domain_lo);
  EXPECT_EQ(back.domain_hi, fit.domain_hi);
  EXPECT_EQ(back.report.valid, fit.report.valid);
}

TEST(Writers, CodistRows) {
  const std::vector<RatedPair> pairs{MakePair(0, 1, false),
                                     MakePair(1, 7, true)};
  std::ostringstream out;
  WriteCodistHeader(out);
  WriteCodistRows(BuildCoDistribution(AllOf(2), pairs, 2.0), out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "range_id,bin_lo,bin_hi,f_dif,f_sim,p_sd");
  EXPECT_NE(text.find("\"(80,90]\",0,2,0,1,0"), std::string::npos) << text;
}

TEST(Names, ParseAndPrint) {
  for (Family f : kAllFamilies) EXPECT_EQ(ParseFamily(FamilyName(f)), f);
  EXPECT_EQ(FamilyLabel(Family::kCubic4), "4-para");
  EXPECT_EQ(ParameterCount(Family::kLogistic5), 5);
  EXPECT_THROW(ParseFamily("spline"), InputError);
  EXPECT_EQ(ParseGlmMode("points"), GlmMode::kPoints);
}

}  // namespace
}  // namespace jndmap
