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

#include "jndmap/predict.h"

#include <algorithm>
#include <cmath>

#include "jndmap/csv.h"
#include "jndmap/error.h"
#include "jndmap/format.h"
#include "jndmap/parallel.h"

namespace jndmap {

const MappingFunction& ModelSet::Get(const std::string& range_id,
                                     Family family) const {
  const std::string what =
      std::string(FamilyName(family)) + " for range " + range_id;
  if (auto r = failures.find(range_id); r != failures.end()) {
    if (auto f = r->second.find(family); f != r->second.end()) {
      throw PredictError("no model " + what + ": " + f->second);
    }
  }
  auto r = models.find(range_id);
  if (r == models.end()) throw PredictError("no model " + what);
  auto f = r->second.find(family);
  if (f == r->second.end()) throw PredictError("no model " + what);
  if (!f->second.report.valid) {
    throw PredictError("model " + what + " is invalid: " + f->second.report.note);
  }
  return f->second;
}

ModelSet FitModels(std::span<const RatedPair> pairs,
                   const Decomposition& decomposition,
                   const ModelSetOptions& options) {
  ModelSet set;
  set.bin_width = options.bin_width;
  set.glm_mode = options.glm_mode;

  struct Job {
    std::size_t range;
    Family family;
  };
  std::vector<Job> jobs;
  std::vector<std::optional<CoDistribution>> codists(decomposition.ranges.size());
  for (std::size_t r = 0; r < decomposition.ranges.size(); ++r) {
    const SubQualityRange& range = decomposition.ranges[r];
    if (range.pair_refs.empty()) {
      for (Family f : options.families) {
        set.failures[range.Id()][f] = "range has no assigned pairs";
      }
      continue;
    }
    codists[r] = BuildCoDistribution(range, pairs, options.bin_width);
    for (Family f : options.families) jobs.push_back({r, f});
  }

  struct Outcome {
    std::optional<MappingFunction> mf;
    std::string error;
  };
  std::vector<Outcome> outcomes(jobs.size());
  ParallelFor(jobs.size(), options.jobs, [&](std::size_t j) {
    const SubQualityRange& range = decomposition.ranges[jobs[j].range];
    const CoDistribution& cd = *codists[jobs[j].range];
    FitOptions fit = options.fit;
    fit.domain = std::make_pair(cd.bin_edges.front(), cd.bin_edges.back());
    std::vector<RatedPair> glm_pairs;
    if (jobs[j].family == Family::kGlm &&
        options.glm_mode == GlmMode::kPairwise) {
      for (std::size_t p : range.pair_refs) glm_pairs.push_back(pairs[p]);
    }
    try {
      outcomes[j].mf =
          FitMapping(PsdPoints(cd), jobs[j].family, fit, glm_pairs);
    } catch (const FitError& e) {
      outcomes[j].error = e.what();
    }
  });

  for (auto& cd : codists) {
    if (cd.has_value()) set.codists.push_back(std::move(*cd));
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const std::string id = decomposition.ranges[jobs[j].range].Id();
    if (outcomes[j].mf.has_value()) {
      set.models[id][jobs[j].family] = std::move(*outcomes[j].mf);
    } else {
      set.failures[id][jobs[j].family] = outcomes[j].error;
    }
  }
  return set;
}

nlohmann::ordered_json ModelSetToJson(const ModelSet& models) {
  // Ranges keep their numeric order, which map<string> would not.
  std::vector<std::string> ids;
  for (const auto& [id, unused] : models.models) ids.push_back(id);
  for (const auto& [id, unused] : models.failures) ids.push_back(id);
  auto lower = [](const std::string& id) {
    return std::strtod(id.c_str() + 1, nullptr);
  };
  std::sort(ids.begin(), ids.end(), [&](const auto& a, const auto& b) {
    return lower(a) != lower(b) ? lower(a) < lower(b) : a < b;
  });
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  nlohmann::ordered_json ranges = nlohmann::ordered_json::object();
  for (const std::string& id : ids) {
    nlohmann::ordered_json entry = nlohmann::ordered_json::object();
    for (Family f : kAllFamilies) {
      const std::string name(FamilyName(f));
      if (auto r = models.models.find(id); r != models.models.end()) {
        if (auto m = r->second.find(f); m != r->second.end()) {
          entry[name] = MappingToJson(m->second);
          continue;
        }
      }
      if (auto r = models.failures.find(id); r != models.failures.end()) {
        if (auto m = r->second.find(f); m != r->second.end()) {
          entry[name] = {{"error", m->second}};
        }
      }
    }
    ranges[id] = std::move(entry);
  }
  nlohmann::ordered_json json;
  json["bin_width"] = models.bin_width;
  json["glm_mode"] = GlmModeName(models.glm_mode);
  json["ranges"] = std::move(ranges);
  return json;
}

ModelSet ModelSetFromJson(const nlohmann::ordered_json& json) {
  try {
    ModelSet set;
    set.bin_width = json.at("bin_width").get<double>();
    set.glm_mode = ParseGlmMode(json.at("glm_mode").get<std::string>());
    for (const auto& [id, entry] : json.at("ranges").items()) {
      for (const auto& [name, value] : entry.items()) {
        const Family f = ParseFamily(name);
        if (value.contains("error")) {
          set.failures[id][f] = value.at("error").get<std::string>();
        } else {
          set.models[id][f] = MappingFromJson(f, value);
        }
      }
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed mf_params.json: ") + e.what());
  }
}

RangeSelection SelectRange(const Decomposition& decomposition,
                           double anchor_vmaf) {
  if (decomposition.ranges.empty()) {
    throw PredictError("decomposition has no ranges");
  }
  if (auto idx = decomposition.Find(anchor_vmaf)) return {*idx, false};
  if (anchor_vmaf <= decomposition.ranges.front().lo) return {0, true};
  return {decomposition.ranges.size() - 1, true};
}

Inversion InvertAtThreshold(const MappingFunction& mf, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw PredictError("threshold must lie in (0,1), got " +
                       FormatNumber(threshold));
  }
  if (!mf.report.valid) {
    throw PredictError(std::string(FamilyName(mf.family)) +
                       " curve is not a valid monotone fit");
  }
  double lo = mf.domain_lo;
  double hi = mf.domain_hi;
  if (mf.Evaluate(hi) < threshold) return {hi, true};
  if (mf.Evaluate(lo) >= threshold) {
    return {lo, mf.Evaluate(lo) > threshold + 1e-6};
  }
  // Invariant: mf(lo) < threshold <= mf(hi).
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mf.Evaluate(mid) >= threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, false};
}

JndPrediction PredictJnd(const ModelSet& models,
                         const Decomposition& decomposition,
                         const Stimulus& anchor, Direction direction,
                         double threshold, Family family) {
  const RangeSelection sel = SelectRange(decomposition, anchor.vmaf);
  JndPrediction p;
  p.content_id = anchor.content_id;
  p.anchor_recipe_id = anchor.recipe.id;
  p.anchor_vmaf = anchor.vmaf;
  p.direction = direction;
  p.range_id = decomposition.ranges[sel.index].Id();
  p.family = family;
  p.threshold = threshold;
  const Inversion inv =
      InvertAtThreshold(models.Get(p.range_id, family), threshold);
  p.delta_obj_jnd = inv.delta_obj;
  const double raw = direction == Direction::kInc ? anchor.vmaf + inv.delta_obj
                                                  : anchor.vmaf - inv.delta_obj;
  p.target_vmaf = std::clamp(raw, 0.0, 100.0);
  p.clamped = sel.clamped || inv.clamped || p.target_vmaf != raw;
  return p;
}

void WritePredictionsHeader(std::ostream& out) {
  std::vector<std::string> header(std::begin(kPredictionsHeader),
                                  std::end(kPredictionsHeader));
  WriteCsvLine(out, header);
}

void WritePrediction(const JndPrediction& p, std::ostream& out) {
  WriteCsvLine(out, {p.content_id, p.anchor_recipe_id,
                     std::string(DirectionName(p.direction)), p.range_id,
                     std::string(FamilyName(p.family)),
                     FormatNumber(p.threshold), FormatNumber(p.delta_obj_jnd),
                     FormatNumber(p.target_vmaf), p.clamped ? "1" : "0"});
}

}  // namespace jndmap
