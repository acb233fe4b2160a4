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
#include <cmath>
#include <map>
#include <utility>

#include "jndmap/error.h"
#include "jndmap/format.h"

namespace jndmap {

std::string_view StrategyName(DecompositionStrategy strategy) {
  switch (strategy) {
    case DecompositionStrategy::kBalanced:
      return "balanced";
    case DecompositionStrategy::kFixedWidth:
      return "fixed_width";
    case DecompositionStrategy::kExplicit:
      return "explicit";
  }
  return "explicit";
}

DecompositionStrategy ParseStrategy(std::string_view text) {
  if (text == "balanced") return DecompositionStrategy::kBalanced;
  if (text == "fixed_width") return DecompositionStrategy::kFixedWidth;
  if (text == "explicit") return DecompositionStrategy::kExplicit;
  throw InputError("unknown decomposition strategy '" + std::string(text) +
                   "' (expected balanced|fixed_width|explicit)");
}

std::string_view BalanceByName(BalanceBy by) {
  return by == BalanceBy::kStimuli ? "stimuli" : "pairs";
}

BalanceBy ParseBalanceBy(std::string_view text) {
  if (text == "stimuli") return BalanceBy::kStimuli;
  if (text == "pairs") return BalanceBy::kPairs;
  throw InputError("unknown balance_by '" + std::string(text) +
                   "' (expected stimuli|pairs)");
}

std::string SubQualityRange::Id() const {
  return "(" + FormatNumber(lo) + "," + FormatNumber(hi) + "]";
}

std::optional<std::size_t> Decomposition::Find(double vmaf) const {
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].Contains(vmaf)) return i;
  }
  return std::nullopt;
}

std::vector<double> Decomposition::Bounds() const {
  std::vector<double> bounds;
  if (ranges.empty()) return bounds;
  bounds.push_back(ranges.front().lo);
  for (const SubQualityRange& r : ranges) bounds.push_back(r.hi);
  return bounds;
}

std::optional<std::size_t> Decomposition::FindById(std::string_view id) const {
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].Id() == id) return i;
  }
  return std::nullopt;
}

Decomposition DecomposeExplicit(std::span<const double> bounds) {
  if (bounds.size() < 2) {
    throw InputError("explicit decomposition needs at least 2 bounds");
  }
  Decomposition d;
  d.strategy = DecompositionStrategy::kExplicit;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!std::isfinite(bounds[i])) {
      throw InputError("decomposition bound is not finite");
    }
    if (i > 0 && !(bounds[i] > bounds[i - 1])) {
      throw InputError("decomposition bounds must be strictly increasing (" +
                       FormatNumber(bounds[i - 1]) + " then " +
                       FormatNumber(bounds[i]) + ")");
    }
  }
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    d.ranges.push_back(SubQualityRange{bounds[i - 1], bounds[i], {}});
  }
  return d;
}

Decomposition DecomposeFixed(double width) {
  if (!std::isfinite(width) || width <= 0.0) {
    throw InputError("fixed decomposition width must be > 0");
  }
  std::vector<double> bounds{0.0};
  for (int i = 1;; ++i) {
    const double b = i * width;
    if (b >= 100.0 - 1e-9) {
      bounds.push_back(100.0);
      break;
    }
    bounds.push_back(b);
  }
  Decomposition d = DecomposeExplicit(bounds);
  d.strategy = DecompositionStrategy::kFixedWidth;
  return d;
}

Decomposition DecomposeBalanced(const Corpus& corpus, int k, BalanceBy by) {
  if (k < 2) throw InputError("balanced decomposition needs k >= 2");

  // Distinct VMAF values with their accumulated weight.
  std::map<double, double> weight_of;
  for (const std::string& content : corpus.ContentIds()) {
    std::span<const Stimulus> stimuli = corpus.StimuliOf(content);
    const double w = by == BalanceBy::kStimuli
                         ? 1.0
                         : static_cast<double>(stimuli.size() - 1);
    for (const Stimulus& s : stimuli) weight_of[s.vmaf] += w;
  }
  const std::size_t m = weight_of.size();
  if (m < static_cast<std::size_t>(k)) {
    throw InputError("balanced decomposition needs at least " +
                     std::to_string(k) + " distinct VMAF values, found " +
                     std::to_string(m));
  }
  std::vector<double> values;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& [v, w] : weight_of) {
    total += w;
    values.push_back(v);
    cumulative.push_back(total);
  }
  if (total <= 0.0) {
    throw InputError("balanced decomposition has zero total weight");
  }

  std::vector<double> bounds{values.front() - kLowerBoundEpsilon};
  std::size_t prev = 0;
  for (int i = 1; i < k; ++i) {
    const double target = total * i / k;
    std::size_t d = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(),
                         target - 1e-9 * total) -
        cumulative.begin());
    // Every bin needs at least one distinct value on each side.
    const std::size_t min_d = i == 1 ? 0 : prev + 1;
    const std::size_t max_d = m - 1 - static_cast<std::size_t>(k - i);
    d = std::clamp(d, min_d, max_d);
    bounds.push_back(values[d]);
    prev = d;
  }
  bounds.push_back(100.0);
  Decomposition out = DecomposeExplicit(bounds);
  out.strategy = DecompositionStrategy::kBalanced;
  return out;
}

Decomposition AssignPairs(std::span<const RatedPair> pairs,
                          Decomposition decomposition, const Corpus& corpus) {
  for (SubQualityRange& r : decomposition.ranges) r.pair_refs.clear();
  auto locate = [&](const std::string& content, const std::string& recipe) {
    const Stimulus& s = corpus.GetStimulus(content, recipe);
    const std::optional<std::size_t> idx = decomposition.Find(s.vmaf);
    if (!idx.has_value()) {
      throw InputError("stimulus (" + content + ", " + recipe + ") vmaf " +
                       FormatNumber(s.vmaf) + " lies outside every range");
    }
    return *idx;
  };
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const std::size_t rx = locate(pairs[p].content_id, pairs[p].recipe_x);
    const std::size_t ry = locate(pairs[p].content_id, pairs[p].recipe_y);
    decomposition.ranges[rx].pair_refs.push_back(p);
    if (ry != rx) decomposition.ranges[ry].pair_refs.push_back(p);
  }
  return decomposition;
}

std::vector<std::string> EmptyRanges(const Decomposition& decomposition,
                                     const Corpus& corpus) {
  std::vector<int> counts(decomposition.ranges.size(), 0);
  for (const Stimulus& s : corpus.stimuli()) {
    if (auto idx = decomposition.Find(s.vmaf)) ++counts[*idx];
  }
  std::vector<std::string> empty;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) empty.push_back(decomposition.ranges[i].Id());
  }
  return empty;
}

nlohmann::ordered_json DecompositionToJson(const Decomposition& decomposition,
                                           std::span<const RatedPair> pairs) {
  nlohmann::ordered_json json;
  json["strategy"] = StrategyName(decomposition.strategy);
  json["bounds"] = decomposition.Bounds();
  nlohmann::ordered_json assignments = nlohmann::ordered_json::object();
  for (const SubQualityRange& r : decomposition.ranges) {
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (std::size_t p : r.pair_refs) {
      if (p < pairs.size()) ids.push_back(pairs[p].Id());
    }
    assignments[r.Id()] = std::move(ids);
  }
  json["assignments"] = std::move(assignments);
  return json;
}

Decomposition DecompositionFromJson(const nlohmann::ordered_json& json) {
  try {
    const std::vector<double> bounds =
        json.at("bounds").get<std::vector<double>>();
    Decomposition d = DecomposeExplicit(bounds);
    d.strategy = ParseStrategy(json.value("strategy", "explicit"));
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed ranges.json: ") + e.what());
  }
}

}  // namespace jndmap
