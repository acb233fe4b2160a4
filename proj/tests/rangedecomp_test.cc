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

#include "jndmap/rangedecomp.h"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "jndmap/error.h"
#include "test_util.h"

namespace jndmap {
namespace {

using testing::MakeStimulus;

constexpr double kHdBounds[] = {30, 79, 86, 90, 95, 100};

Corpus FromVmafs(const std::vector<std::vector<double>>& per_content) {
  std::vector<Stimulus> stimuli;
  for (std::size_t c = 0; c < per_content.size(); ++c) {
    for (std::size_t s = 0; s < per_content[c].size(); ++s) {
      stimuli.push_back(MakeStimulus("c" + std::to_string(c),
                                     "r" + std::to_string(100 + s),
                                     per_content[c][s]));
    }
  }
  return Corpus::Create(std::move(stimuli), {}, {});
}

RatedPair Pair(const std::string& x, const std::string& y) {
  RatedPair p;
  p.content_id = "c0";
  p.recipe_x = x;
  p.recipe_y = y;
  return p;
}

TEST(Explicit, RangeIds) {
  const Decomposition d = DecomposeExplicit(kHdBounds);
  std::vector<std::string> ids;
  for (const SubQualityRange& r : d.ranges) ids.push_back(r.Id());
  EXPECT_EQ(ids, (std::vector<std::string>{"(30,79]", "(79,86]", "(86,90]",
                                           "(90,95]", "(95,100]"}));
}

TEST(Explicit, Lookup) {
  const Decomposition d = DecomposeExplicit(kHdBounds);
  EXPECT_EQ(d.ranges[*d.Find(92)].Id(), "(90,95]");
  EXPECT_EQ(d.ranges[*d.Find(79)].Id(), "(30,79]");
  EXPECT_EQ(d.ranges[*d.Find(100)].Id(), "(95,100]");
  EXPECT_FALSE(d.Find(30).has_value());
  EXPECT_EQ(*d.FindById("(86,90]"), 2u);
}

TEST(Explicit, RejectsBadBounds) {
  EXPECT_THROW(DecomposeExplicit(std::vector<double>{50}), InputError);
  EXPECT_THROW(DecomposeExplicit(std::vector<double>{10, 10, 20}), InputError);
  EXPECT_THROW(DecomposeExplicit(std::vector<double>{30, 20}), InputError);
}

TEST(Fixed, WidthFive) {
  const Decomposition d = DecomposeFixed(5);
  ASSERT_EQ(d.ranges.size(), 20u);
  EXPECT_EQ(d.ranges.front().Id(), "(0,5]");
  EXPECT_EQ(d.ranges.back().Id(), "(95,100]");
  EXPECT_EQ(DecomposeFixed(30).ranges.back().Id(), "(90,100]");
  EXPECT_THROW(DecomposeFixed(0), InputError);
}

TEST(AssignPairs, StraddlingPairJoinsBothRanges) {
  const Corpus corpus = FromVmafs({{85, 92, 93}});
  const std::vector<RatedPair> pairs{Pair("r100", "r101"),
                                     Pair("r101", "r102")};
  const Decomposition d =
      AssignPairs(pairs, DecomposeExplicit(kHdBounds), corpus);
  EXPECT_EQ(d.ranges[1].pair_refs, (std::vector<std::size_t>{0}));
  EXPECT_EQ(d.ranges[3].pair_refs, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(d.ranges[0].pair_refs.empty());
  EXPECT_EQ(EmptyRanges(d, corpus),
            (std::vector<std::string>{"(30,79]", "(86,90]", "(95,100]"}));
}

TEST(AssignPairs, OutsideEveryRange) {
  const Corpus corpus = FromVmafs({{20, 92}});
  const std::vector<RatedPair> pairs{Pair("r100", "r101")};
  EXPECT_THROW(AssignPairs(pairs, DecomposeExplicit(kHdBounds), corpus),
               InputError);
}

TEST(Balanced, TenValuesTwoBins) {
  const Corpus corpus = FromVmafs({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}});
  const Decomposition d = DecomposeBalanced(corpus, 2);
  ASSERT_EQ(d.ranges.size(), 2u);
  EXPECT_DOUBLE_EQ(d.ranges[0].hi, 5.0);
  EXPECT_DOUBLE_EQ(d.ranges[1].hi, 100.0);
  EXPECT_LT(d.ranges[0].lo, 1.0);
  EXPECT_GT(d.ranges[0].lo, 1.0 - 1e-6);
  int low = 0;
  for (const Stimulus& s : corpus.stimuli()) low += d.ranges[0].Contains(s.vmaf);
  EXPECT_EQ(low, 5);
}

TEST(Balanced, OneValuePerBin) {
  const Corpus corpus = FromVmafs({{10, 20, 30, 40}});
  const Decomposition d = DecomposeBalanced(corpus, 4);
  ASSERT_EQ(d.ranges.size(), 4u);
  for (const Stimulus& s : corpus.stimuli()) EXPECT_TRUE(d.Find(s.vmaf));
  EXPECT_THROW(DecomposeBalanced(corpus, 5), InputError);
  EXPECT_THROW(DecomposeBalanced(corpus, 1), InputError);
}

TEST(Balanced, CountsDifferByAtMostOne) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> vmaf(20.0, 99.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> table(3);
    for (auto& ladder : table) {
      for (int s = 0; s < 12; ++s) ladder.push_back(vmaf(gen));
    }
    const Corpus corpus = FromVmafs(table);
    const int k = 2 + trial % 6;
    const Decomposition d = DecomposeBalanced(corpus, k);
    std::vector<int> counts(d.ranges.size(), 0);
    for (const Stimulus& s : corpus.stimuli()) {
      auto idx = d.Find(s.vmaf);
      ASSERT_TRUE(idx.has_value());
      ++counts[*idx];
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    EXPECT_LE(*hi - *lo, 1) << "trial " << trial;
  }
}

TEST(Balanced, PairMultiplicityAndIdempotence) {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> vmaf(30.0, 99.0);
  std::vector<std::vector<double>> table(1);
  for (int s = 0; s < 12; ++s) table[0].push_back(vmaf(gen));
  const Corpus corpus = FromVmafs(table);
  std::vector<RatedPair> pairs;
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) {
      pairs.push_back(Pair("r" + std::to_string(100 + i),
                           "r" + std::to_string(100 + j)));
    }
  }
  const Decomposition once =
      AssignPairs(pairs, DecomposeBalanced(corpus, 5), corpus);
  std::size_t total = 0;
  for (const SubQualityRange& r : once.ranges) total += r.pair_refs.size();
  EXPECT_GE(total, pairs.size());
  EXPECT_LE(total, 2 * pairs.size());
  const Decomposition twice = AssignPairs(pairs, once, corpus);
  for (std::size_t i = 0; i < once.ranges.size(); ++i) {
    EXPECT_EQ(once.ranges[i].pair_refs, twice.ranges[i].pair_refs);
  }
}

TEST(Json, RoundTrip) {
  const Corpus corpus = FromVmafs({{85, 92, 93}});
  const std::vector<RatedPair> pairs{Pair("r100", "r101")};
  const Decomposition d =
      AssignPairs(pairs, DecomposeExplicit(kHdBounds), corpus);
  const nlohmann::ordered_json json = DecompositionToJson(d, pairs);
  EXPECT_EQ(json["assignments"]["(90,95]"][0], "c0:r100:r101");
  const Decomposition back = DecompositionFromJson(json);
  EXPECT_EQ(back.Bounds(), d.Bounds());
  EXPECT_EQ(back.strategy, DecompositionStrategy::kExplicit);
}

}  // namespace
}  // namespace jndmap
