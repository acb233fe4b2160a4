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

#include "jndmap/simulate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "jndmap/error.h"
#include "jndmap/format.h"
#include "jndmap/parallel.h"
#include "jndmap/rng.h"

namespace jndmap {
namespace {

enum StreamKind : std::uint64_t {
  kLadderStream = 0,
  kRatingStream = 1,
  kExpertStream = 2,
  kDetectStream = 3,
};

std::string Label(char prefix, int i, int count) {
  const int width = std::max(2, static_cast<int>(std::to_string(count - 1).size()));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, i);
  return buf;
}

std::vector<LadderStep> DrawLadder(const SimSpec& spec, int content) {
  Rng rng = Rng::Derive(spec.seed, {static_cast<std::uint64_t>(content),
                                    kLadderStream});
  const double top = rng.Uniform(spec.top_vmaf_min, spec.top_vmaf_max);
  const double step = rng.Uniform(spec.step_min, spec.step_max);
  std::vector<LadderStep> ladder;
  double vmaf = top;
  for (int i = 0; i < spec.ladder_size; ++i) {
    ladder.push_back({Label('r', i, spec.ladder_size), std::max(vmaf, 0.0)});
    vmaf -= step * (1.0 + spec.step_growth * i);
  }
  return ladder;
}

int RateStimulus(double vmaf, double noise) {
  const double impairment =
      std::min(kImpairmentSlope * (100.0 - vmaf), kImpairmentCap);
  const double score = std::round(5.0 - impairment + noise);
  return static_cast<int>(std::clamp(score, 1.0, 5.0));
}

void RequirePositive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string("simulation parameter ") + name +
                     " must be positive");
  }
}

}  // namespace

void ValidateSimSpec(const SimSpec& spec) {
  RequirePositive(spec.n_contents, "n_contents");
  RequirePositive(spec.observer_count, "observer_count");
  RequirePositive(spec.jnd_scale, "jnd_scale");
  RequirePositive(spec.detection_slope, "detection_slope");
  if (spec.rating_noise_sd < 0.0 || spec.jnd_jitter_sd < 0.0) {
    throw InputError("simulation noise levels must be >= 0");
  }
  if (spec.observer_count < 2) {
    throw InputError("simulation needs at least 2 observers");
  }
  if (!spec.ladder.empty()) {
    if (spec.ladder.size() < 3) {
      throw InputError("ladder needs at least 3 steps for a bisection search");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < spec.ladder.size(); ++i) {
      const LadderStep& s = spec.ladder[i];
      if (!(s.vmaf >= 0.0 && s.vmaf <= 100.0)) {
        throw InputError("ladder vmaf out of range [0,100]");
      }
      if (i > 0 && !(s.vmaf < spec.ladder[i - 1].vmaf)) {
        throw InputError("ladder vmaf must be strictly decreasing");
      }
      if (!ids.insert(s.recipe_id).second) {
        throw InputError("duplicate ladder recipe_id '" + s.recipe_id + "'");
      }
    }
    return;
  }
  if (spec.ladder_size < 3) {
    throw InputError("ladder needs at least 3 steps for a bisection search");
  }
  RequirePositive(spec.step_min, "step_min");
  if (spec.step_max < spec.step_min || spec.step_growth < 0.0 ||
      !(spec.top_vmaf_min <= spec.top_vmaf_max) || spec.top_vmaf_min < 0.0 ||
      spec.top_vmaf_max > 100.0) {
    throw InputError("inconsistent ladder generator parameters");
  }
  double worst = spec.top_vmaf_min;
  for (int i = 0; i + 1 < spec.ladder_size; ++i) {
    worst -= spec.step_max * (1.0 + spec.step_growth * i);
  }
  if (worst <= 0.0) {
    throw InputError("generated ladders would fall below VMAF 0; reduce "
                     "ladder_size, step_max or step_growth");
  }
}

SimSpec SimSpecFromJson(const nlohmann::ordered_json& json) {
  if (!json.is_object()) throw InputError("simulation spec must be an object");
  SimSpec spec;
  try {
    for (const auto& [key, value] : json.items()) {
      if (key == "n_contents") {
        spec.n_contents = value.get<int>();
      } else if (key == "ladder") {
        spec.ladder.clear();
        for (const auto& step : value) {
          spec.ladder.push_back({step.at("recipe_id").get<std::string>(),
                                 step.at("vmaf").get<double>()});
        }
      } else if (key == "ladder_size") {
        spec.ladder_size = value.get<int>();
      } else if (key == "top_vmaf_min") {
        spec.top_vmaf_min = value.get<double>();
      } else if (key == "top_vmaf_max") {
        spec.top_vmaf_max = value.get<double>();
      } else if (key == "step_min") {
        spec.step_min = value.get<double>();
      } else if (key == "step_max") {
        spec.step_max = value.get<double>();
      } else if (key == "step_growth") {
        spec.step_growth = value.get<double>();
      } else if (key == "observer_count") {
        spec.observer_count = value.get<int>();
      } else if (key == "jnd_scale") {
        spec.jnd_scale = value.get<double>();
      } else if (key == "detection_slope") {
        spec.detection_slope = value.get<double>();
      } else if (key == "jnd_jitter_sd") {
        spec.jnd_jitter_sd = value.get<double>();
      } else if (key == "rating_noise_sd") {
        spec.rating_noise_sd = value.get<double>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else {
        throw InputError("unknown simulation spec key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed simulation spec: ") + e.what());
  }
  ValidateSimSpec(spec);
  return spec;
}

nlohmann::ordered_json SimSpecToJson(const SimSpec& spec) {
  nlohmann::ordered_json json;
  json["n_contents"] = spec.n_contents;
  if (!spec.ladder.empty()) {
    nlohmann::ordered_json ladder = nlohmann::ordered_json::array();
    for (const LadderStep& s : spec.ladder) {
      ladder.push_back({{"recipe_id", s.recipe_id}, {"vmaf", s.vmaf}});
    }
    json["ladder"] = std::move(ladder);
  }
  json["ladder_size"] = spec.ladder_size;
  json["top_vmaf_min"] = spec.top_vmaf_min;
  json["top_vmaf_max"] = spec.top_vmaf_max;
  json["step_min"] = spec.step_min;
  json["step_max"] = spec.step_max;
  json["step_growth"] = spec.step_growth;
  json["observer_count"] = spec.observer_count;
  json["jnd_scale"] = spec.jnd_scale;
  json["detection_slope"] = spec.detection_slope;
  json["jnd_jitter_sd"] = spec.jnd_jitter_sd;
  json["rating_noise_sd"] = spec.rating_noise_sd;
  json["seed"] = spec.seed;
  return json;
}

BisectionResult BisectionSearch(int ladder_size, int anchor_index,
                                Direction direction,
                                const std::function<bool(int)>& detector) {
  if (ladder_size < 3) {
    throw InputError("bisection needs a ladder of at least 3 steps");
  }
  const int expected = direction == Direction::kDec ? 0 : ladder_size - 1;
  if (anchor_index != expected) {
    throw InputError("bisection anchor must sit at the ladder extreme for " +
                     std::string(DirectionName(direction)));
  }
  // Work in steps away from the anchor: 0 is the anchor, ladder_size is a
  // virtual level past the end that always counts as detected.
  auto to_index = [&](int k) {
    return direction == Direction::kDec ? anchor_index + k : anchor_index - k;
  };
  BisectionResult result;
  int lo = 0;
  int hi = ladder_size;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    ++result.queries;
    if (detector(to_index(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi < ladder_size) result.jnd_index = to_index(hi);
  return result;
}

SimResult SimulateCorpus(const SimSpec& spec, int jobs) {
  ValidateSimSpec(spec);
  struct ContentOut {
    std::vector<LadderStep> ladder;
    std::vector<Stimulus> stimuli;
    std::vector<DcrRating> ratings;
    std::vector<JndTruth> truths;
    std::vector<SimJnd> jnds;
  };
  std::vector<ContentOut> out(spec.n_contents);
  std::vector<std::string> observers;
  for (int o = 0; o < spec.observer_count; ++o) {
    observers.push_back(Label('o', o, spec.observer_count));
  }

  ParallelFor(out.size(), jobs, [&](std::size_t c) {
    ContentOut& co = out[c];
    const std::string content = Label('c', static_cast<int>(c), spec.n_contents);
    const std::uint64_t key = c;
    co.ladder = spec.ladder.empty() ? DrawLadder(spec, static_cast<int>(c))
                                    : spec.ladder;
    const int n = static_cast<int>(co.ladder.size());
    for (int i = 0; i < n; ++i) {
      co.stimuli.push_back(Stimulus{
          content, Recipe{co.ladder[i].recipe_id, Resolution::Parse("1080p"), i},
          co.ladder[i].vmaf});
    }
    Rng ratings = Rng::Derive(spec.seed, {key, kRatingStream});
    for (int i = 0; i < n; ++i) {
      for (const std::string& obs : observers) {
        const double noise = spec.rating_noise_sd * ratings.Normal();
        co.ratings.push_back(DcrRating{content, co.ladder[i].recipe_id, obs,
                                       RateStimulus(co.ladder[i].vmaf, noise)});
      }
    }
    for (Direction dir : {Direction::kDec, Direction::kInc}) {
      const std::uint64_t d = dir == Direction::kDec ? 0 : 1;
      Rng expert = Rng::Derive(spec.seed, {key, kExpertStream, d});
      SimJnd jnd;
      jnd.content_id = content;
      jnd.direction = dir;
      jnd.latent_jnd = spec.jnd_scale + spec.jnd_jitter_sd * expert.Normal();
      const int anchor = dir == Direction::kDec ? 0 : n - 1;
      auto detector = [&](int index) {
        const double delta =
            std::fabs(co.ladder[anchor].vmaf - co.ladder[index].vmaf);
        const double p =
            1.0 / (1.0 + std::exp(-spec.detection_slope * (delta - jnd.latent_jnd)));
        Rng u = Rng::Derive(spec.seed, {key, kDetectStream, d,
                                        static_cast<std::uint64_t>(index)});
        return u.Uniform() < p;
      };
      const BisectionResult r = BisectionSearch(n, anchor, dir, detector);
      jnd.jnd_index = r.jnd_index;
      jnd.queries = r.queries;
      jnd.truth_delta = std::nan("");
      if (r.jnd_index.has_value()) {
        jnd.truth_delta =
            std::fabs(co.ladder[anchor].vmaf - co.ladder[*r.jnd_index].vmaf);
        co.truths.push_back(JndTruth{content, co.ladder[anchor].recipe_id, dir,
                                     co.ladder[*r.jnd_index].recipe_id, 1});
      }
      co.jnds.push_back(std::move(jnd));
    }
  });

  SimResult result;
  std::vector<Stimulus> stimuli;
  std::vector<DcrRating> ratings;
  std::vector<JndTruth> truths;
  std::vector<SimJnd> inc;
  for (ContentOut& co : out) {
    result.ladders.push_back(std::move(co.ladder));
    std::move(co.stimuli.begin(), co.stimuli.end(), std::back_inserter(stimuli));
    std::move(co.ratings.begin(), co.ratings.end(), std::back_inserter(ratings));
    std::move(co.truths.begin(), co.truths.end(), std::back_inserter(truths));
    result.jnds.push_back(std::move(co.jnds[0]));
    inc.push_back(std::move(co.jnds[1]));
  }
  std::move(inc.begin(), inc.end(), std::back_inserter(result.jnds));
  result.corpus =
      Corpus::Create(std::move(stimuli), std::move(ratings), std::move(truths));
  return result;
}

nlohmann::ordered_json SimTruthJson(const SimSpec& spec,
                                    const SimResult& result) {
  nlohmann::ordered_json json;
  json["spec"] = SimSpecToJson(spec);
  json["impairment"] = {{"slope", kImpairmentSlope}, {"cap", kImpairmentCap}};
  nlohmann::ordered_json contents = nlohmann::ordered_json::object();
  const std::vector<std::string> ids = result.corpus.ContentIds();
  for (std::size_t c = 0; c < result.ladders.size(); ++c) {
    nlohmann::ordered_json ladder = nlohmann::ordered_json::array();
    for (const LadderStep& s : result.ladders[c]) {
      ladder.push_back({{"recipe_id", s.recipe_id}, {"vmaf", s.vmaf}});
    }
    contents[ids[c]]["ladder"] = std::move(ladder);
  }
  for (const SimJnd& j : result.jnds) {
    nlohmann::ordered_json e;
    e["latent_jnd"] = j.latent_jnd;
    if (j.jnd_index.has_value()) {
      e["jnd_index"] = *j.jnd_index;
      e["truth_delta"] = j.truth_delta;
    } else {
      e["jnd_index"] = nullptr;
      e["truth_delta"] = nullptr;
    }
    e["queries"] = j.queries;
    contents[j.content_id][std::string(DirectionName(j.direction))] = std::move(e);
  }
  json["contents"] = std::move(contents);
  return json;
}

}  // namespace jndmap
