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

#ifndef JNDMAP_SCREENING_H_
#define JNDMAP_SCREENING_H_

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "jndmap/corpus.h"
#include "json.hpp"

namespace jndmap {

// Observer screening procedure. Only kBt500 does any work; the other two are
// accepted in configuration and return an empty removal set.
enum class ScreeningMethod { kBt500, kVqegHdtv, kBt1788, kNone };

std::string_view ScreeningMethodName(ScreeningMethod method);
ScreeningMethod ParseScreeningMethod(std::string_view text);

struct ObserverStats {
  int p_count = 0;    // scores strictly above the upper bound
  int q_count = 0;    // scores strictly below the lower bound
  int judgments = 0;  // ratings given by the observer
  double ratio1 = 0;  // (P + Q) / judgments
  double ratio2 = 0;  // |P - Q| / (P + Q), 0 when P + Q == 0

  friend bool operator==(const ObserverStats&, const ObserverStats&) = default;
};

struct ScreeningReport {
  ScreeningMethod method = ScreeningMethod::kBt500;
  std::set<std::string> removed;
  std::map<std::string, ObserverStats> stats;

  friend bool operator==(const ScreeningReport&,
                         const ScreeningReport&) = default;
};

// ITU-R BT.500 Annex 2 observer rejection:
//   per stimulus: mean, sample standard deviation S and kurtosis
//   b2 = m4 / m2^2; bounds are mean +/- 2S when 2 <= b2 <= 4, otherwise
//   mean +/- sqrt(20) S. An observer is rejected when
//   (P + Q) / N > 0.05 and |P - Q| / (P + Q) < 0.3.
// A zero-variance stimulus collapses both bounds onto the mean. Throws
// InputError when a rated stimulus has fewer than two ratings.
ScreeningReport ScreenBt500(const Corpus& corpus);

ScreeningReport Screen(const Corpus& corpus, ScreeningMethod method);

// Drops every rating by a removed observer; stimuli and truths unchanged.
Corpus ApplyScreening(const Corpus& corpus, const ScreeningReport& report);

// {"method":..., "removed":[...], "stats":{observer:{p,q,n,ratio1,ratio2}}}
nlohmann::ordered_json ScreeningReportToJson(const ScreeningReport& report);
ScreeningReport ScreeningReportFromJson(const nlohmann::ordered_json& json);

}  // namespace jndmap

#endif  // JNDMAP_SCREENING_H_
