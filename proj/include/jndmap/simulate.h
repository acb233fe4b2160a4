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

// Synthetic DCR/JND studies with known ground truth.
//
// Every content gets a ladder of stimuli with strictly decreasing VMAF.
// Observer o rates stimulus s as
//
//   clamp(round(5 - min(0.08 * (100 - vmaf_s), 4) + N(0, rating_noise_sd)), 1, 5)
//
// and one virtual expert per (content, direction) runs a bisection JND
// search over the ladder, detecting a difference of delta VMAF with
// probability 1 / (1 + exp(-detection_slope * (delta - jnd))), where jnd is
// jnd_scale plus N(0, jnd_jitter_sd) drawn once per expert.

#ifndef JNDMAP_SIMULATE_H_
#define JNDMAP_SIMULATE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jndmap/corpus.h"
#include "json.hpp"

namespace jndmap {

inline constexpr double kImpairmentSlope = 0.08;
inline constexpr double kImpairmentCap = 4.0;

struct LadderStep {
  std::string recipe_id;
  double vmaf = 0.0;

  friend bool operator==(const LadderStep&, const LadderStep&) = default;
};

struct SimSpec {
  int n_contents = 30;
  // Shared ladder for every content. When empty, each content draws its own
  // ladder of ladder_size steps from the generator parameters below.
  std::vector<LadderStep> ladder;
  int ladder_size = 12;
  double top_vmaf_min = 96.0;
  double top_vmaf_max = 99.0;
  double step_min = 2.0;
  double step_max = 3.0;
  double step_growth = 0.0;  // step i is step * (1 + step_growth * i)
  int observer_count = 24;
  double jnd_scale = 6.0;
  double detection_slope = 2.0;
  double jnd_jitter_sd = 0.5;
  double rating_noise_sd = 0.55;
  std::uint64_t seed = 20260101;

  friend bool operator==(const SimSpec&, const SimSpec&) = default;
};

// Throws InputError for non-positive counts or scales, a ladder shorter
// than 3, or explicit ladders that are not strictly decreasing in [0, 100].
void ValidateSimSpec(const SimSpec& spec);

// Unknown keys are rejected; missing keys keep their defaults.
SimSpec SimSpecFromJson(const nlohmann::ordered_json& json);
nlohmann::ordered_json SimSpecToJson(const SimSpec& spec);

struct BisectionResult {
  std::optional<int> jnd_index;  // nullopt: never detected within the ladder
  int queries = 0;
};

// Ladder index 0 is the best quality. A dec search anchors at index 0 and
// moves toward ladder_size - 1; an inc search anchors at ladder_size - 1 and
// moves toward 0. The bracket starts at [anchor, one past the far end] and
// halves until it is one step wide; the far end is returned as the first
// detected index.
BisectionResult BisectionSearch(int ladder_size, int anchor_index,
                                Direction direction,
                                const std::function<bool(int)>& detector);

struct SimJnd {
  std::string content_id;
  Direction direction = Direction::kDec;
  double latent_jnd = 0.0;  // the expert's own 50% detection point
  std::optional<int> jnd_index;
  double truth_delta = 0.0;  // |vmaf(anchor) - vmaf(jnd)|, NaN if beyond
  int queries = 0;
};

struct SimResult {
  Corpus corpus;
  std::vector<std::vector<LadderStep>> ladders;  // per content
  std::vector<SimJnd> jnds;  // (content, dec) then (content, inc)
};

SimResult SimulateCorpus(const SimSpec& spec, int jobs = 1);

// sim_truth.json: the spec, every ladder and every expert's latent JND.
nlohmann::ordered_json SimTruthJson(const SimSpec& spec,
                                    const SimResult& result);

}  // namespace jndmap

#endif  // JNDMAP_SIMULATE_H_
