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

#include "config.h"

#include <cmath>
#include <fstream>

#include "jndmap/error.h"
#include "jndmap/format.h"

namespace jndmap {
namespace {

DecompositionConfig DecompositionFromJson(const nlohmann::ordered_json& json,
                                          DecompositionConfig d) {
  if (!json.is_object()) throw InputError("decomposition must be an object");
  for (const auto& [key, value] : json.items()) {
    if (key == "strategy") {
      d.strategy = ParseStrategy(value.get<std::string>());
    } else if (key == "k") {
      d.k = value.get<int>();
    } else if (key == "balance_by") {
      d.balance_by = ParseBalanceBy(value.get<std::string>());
    } else if (key == "width") {
      d.width = value.get<double>();
    } else if (key == "bounds") {
      d.bounds = value.get<std::vector<double>>();
    } else {
      throw InputError("unknown config key 'decomposition." + key + "'");
    }
  }
  return d;
}

}  // namespace

void ValidateConfig(const RunConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
    throw InputError("alpha must lie in (0,1)");
  }
  if (!(c.bin_width > 0.0) || !std::isfinite(c.bin_width)) {
    throw InputError("bin_width must be > 0");
  }
  if (c.families.empty()) throw InputError("families must not be empty");
  if (c.thresholds.empty()) throw InputError("thresholds must not be empty");
  for (double t : c.thresholds) {
    if (!(t > 0.0 && t < 1.0)) {
      throw InputError("threshold must lie in (0,1), got " + FormatNumber(t));
    }
  }
  const DecompositionConfig& d = c.decomposition;
  switch (d.strategy) {
    case DecompositionStrategy::kBalanced:
      if (d.k < 2) throw InputError("decomposition.k must be >= 2");
      break;
    case DecompositionStrategy::kFixedWidth:
      if (!(d.width > 0.0)) throw InputError("decomposition.width must be > 0");
      break;
    case DecompositionStrategy::kExplicit:
      DecomposeExplicit(d.bounds);
      break;
  }
}

nlohmann::ordered_json ConfigToJson(const RunConfig& c) {
  nlohmann::ordered_json json;
  json["alpha"] = c.alpha;
  json["test"] = TTestKindName(c.test);
  json["screening"] = ScreeningMethodName(c.screening);
  json["decomposition"] = {
      {"strategy", StrategyName(c.decomposition.strategy)},
      {"k", c.decomposition.k},
      {"balance_by", BalanceByName(c.decomposition.balance_by)},
      {"width", c.decomposition.width},
      {"bounds", c.decomposition.bounds}};
  json["bin_width"] = c.bin_width;
  nlohmann::ordered_json families = nlohmann::ordered_json::array();
  for (Family f : c.families) families.push_back(FamilyName(f));
  json["families"] = std::move(families);
  json["thresholds"] = c.thresholds;
  json["glm_mode"] = GlmModeName(c.glm_mode);
  json["chain"] = c.chain;
  json["seed"] = c.seed;
  return json;
}

RunConfig ConfigFromJson(const nlohmann::ordered_json& json, RunConfig c) {
  if (!json.is_object()) throw InputError("config must be a JSON object");
  try {
    for (const auto& [key, value] : json.items()) {
      if (key == "alpha") {
        c.alpha = value.get<double>();
      } else if (key == "test") {
        c.test = ParseTTestKind(value.get<std::string>());
      } else if (key == "screening") {
        c.screening = ParseScreeningMethod(value.get<std::string>());
      } else if (key == "decomposition") {
        c.decomposition = DecompositionFromJson(value, c.decomposition);
      } else if (key == "bin_width") {
        c.bin_width = value.get<double>();
      } else if (key == "families") {
        c.families.clear();
        for (const auto& f : value) {
          c.families.push_back(ParseFamily(f.get<std::string>()));
        }
      } else if (key == "thresholds") {
        c.thresholds = value.get<std::vector<double>>();
      } else if (key == "glm_mode") {
        c.glm_mode = ParseGlmMode(value.get<std::string>());
      } else if (key == "chain") {
        c.chain = value.get<bool>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else {
        throw InputError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
  ValidateConfig(c);
  return c;
}

nlohmann::ordered_json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file", path.string());
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what(), path.string());
  }
}

Decomposition MakeDecomposition(const DecompositionConfig& config,
                                const Corpus& corpus) {
  switch (config.strategy) {
    case DecompositionStrategy::kBalanced:
      return DecomposeBalanced(corpus, config.k, config.balance_by);
    case DecompositionStrategy::kFixedWidth:
      return DecomposeFixed(config.width);
    case DecompositionStrategy::kExplicit:
      break;
  }
  return DecomposeExplicit(config.bounds);
}

}  // namespace jndmap
