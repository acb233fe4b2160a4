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

// Run configuration shared by the jndmap subcommands.
//
// Precedence, lowest first: built-in defaults, the --config JSON file, the
// JNDMAP_SEED environment variable, command-line flags.

#ifndef JNDMAP_TOOLS_CONFIG_H_
#define JNDMAP_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "jndmap/codist_fit.h"
#include "jndmap/rangedecomp.h"
#include "jndmap/screening.h"
#include "jndmap/significance.h"
#include "json.hpp"

namespace jndmap {

struct DecompositionConfig {
  DecompositionStrategy strategy = DecompositionStrategy::kBalanced;
  int k = 5;
  BalanceBy balance_by = BalanceBy::kStimuli;
  double width = 10.0;
  std::vector<double> bounds;

  friend bool operator==(const DecompositionConfig&,
                         const DecompositionConfig&) = default;
};

struct RunConfig {
  double alpha = 0.05;
  TTestKind test = TTestKind::kWelch;
  ScreeningMethod screening = ScreeningMethod::kBt500;
  DecompositionConfig decomposition;
  double bin_width = 2.0;
  std::vector<Family> families{std::begin(kAllFamilies),
                               std::end(kAllFamilies)};
  std::vector<double> thresholds{0.75, 0.8, 0.85, 0.9, 0.95};
  GlmMode glm_mode = GlmMode::kPairwise;
  bool chain = true;
  std::uint64_t seed = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws InputError for out-of-range values.
void ValidateConfig(const RunConfig& config);

nlohmann::ordered_json ConfigToJson(const RunConfig& config);
// Starts from `base` and overrides the keys present in `json`; unknown keys
// are rejected.
RunConfig ConfigFromJson(const nlohmann::ordered_json& json,
                         RunConfig base = {});

nlohmann::ordered_json ReadJsonFile(const std::filesystem::path& path);

// Decomposition described by the config; the balanced strategy needs the
// corpus.
Decomposition MakeDecomposition(const DecompositionConfig& config,
                                const Corpus& corpus);

}  // namespace jndmap

#endif  // JNDMAP_TOOLS_CONFIG_H_
