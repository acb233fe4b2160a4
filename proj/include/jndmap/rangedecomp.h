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

// Splits the VMAF axis into contiguous half-open ranges (lo, hi] and assigns
// every rated pair to the range(s) holding either of its two stimuli.

#ifndef JNDMAP_RANGEDECOMP_H_
#define JNDMAP_RANGEDECOMP_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jndmap/corpus.h"
#include "jndmap/significance.h"
#include "json.hpp"

namespace jndmap {

enum class DecompositionStrategy { kBalanced, kFixedWidth, kExplicit };

std::string_view StrategyName(DecompositionStrategy strategy);
DecompositionStrategy ParseStrategy(std::string_view text);

// What the balanced strategy equalizes across bins.
enum class BalanceBy { kStimuli, kPairs };

std::string_view BalanceByName(BalanceBy by);
BalanceBy ParseBalanceBy(std::string_view text);

// Offset below the smallest VMAF used as the lowest exclusive bound of a
// balanced decomposition, so the minimum stimulus is covered.
inline constexpr double kLowerBoundEpsilon = 1e-9;

struct SubQualityRange {
  double lo = 0.0;  // exclusive
  double hi = 0.0;  // inclusive
  std::vector<std::size_t> pair_refs;  // indices into the classified pairs

  bool Contains(double vmaf) const { return vmaf > lo && vmaf <= hi; }
  // "(lo,hi]" with shortest round-trip numbers, e.g. "(79,86]".
  std::string Id() const;
};

struct Decomposition {
  DecompositionStrategy strategy = DecompositionStrategy::kExplicit;
  std::vector<SubQualityRange> ranges;

  // Index of the unique range containing `vmaf`, if any.
  std::optional<std::size_t> Find(double vmaf) const;
  // ranges[0].lo, ranges[0].hi, ranges[1].hi, ...
  std::vector<double> Bounds() const;
  // Index of the range with this Id().
  std::optional<std::size_t> FindById(std::string_view id) const;
};

// Equal-count bins over the stimulus VMAF values: bin i receives floor(n/k)
// or ceil(n/k) stimuli when values are distinct; equal values always share
// the lower bin. The top bound is forced to 100. With BalanceBy::kPairs each
// stimulus is weighted by the number of pairs it takes part in.
// Throws InputError when k < 2 or fewer than k distinct values exist.
Decomposition DecomposeBalanced(const Corpus& corpus, int k,
                                BalanceBy by = BalanceBy::kStimuli);

// (0,w], (w,2w], ... up to 100; the last bin is truncated at 100.
Decomposition DecomposeFixed(double width);

// Ranges (b0,b1], (b1,b2], ...; bounds must be strictly increasing.
Decomposition DecomposeExplicit(std::span<const double> bounds);

// Fills pair_refs: pair {x, y} joins every range containing vmaf(x) or
// vmaf(y). Existing assignments are replaced. Throws InputError when a
// stimulus falls outside every range.
Decomposition AssignPairs(std::span<const RatedPair> pairs,
                          Decomposition decomposition, const Corpus& corpus);

// Ids of ranges holding no stimulus of the corpus.
std::vector<std::string> EmptyRanges(const Decomposition& decomposition,
                                     const Corpus& corpus);

// {"strategy":..., "bounds":[...], "assignments":{"(79,86]":[pair ids]}}
nlohmann::ordered_json DecompositionToJson(const Decomposition& decomposition,
                                           std::span<const RatedPair> pairs);
// Restores strategy and bounds; assignments are not read back (recompute
// them with AssignPairs).
Decomposition DecompositionFromJson(const nlohmann::ordered_json& json);

}  // namespace jndmap

#endif  // JNDMAP_RANGEDECOMP_H_
