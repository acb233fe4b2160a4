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

#include "jndmap/evaluate.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "jndmap/error.h"
#include "jndmap/format.h"
#include "jndmap/parallel.h"

namespace jndmap {
namespace {

const Stimulus& Nearest(const Corpus& corpus, const std::string& content,
                        double vmaf) {
  std::span<const Stimulus> stimuli = corpus.StimuliOf(content);
  const Stimulus* best = &stimuli.front();
  for (const Stimulus& s : stimuli) {
    if (std::fabs(s.vmaf - vmaf) < std::fabs(best->vmaf - vmaf)) best = &s;
  }
  return *best;
}

struct TruthOutcome {
  std::optional<JndPrediction> prediction;  // final step
  double error = 0.0;
  bool clamped = false;
};

TruthOutcome PredictTruth(const Corpus& corpus, const ModelSet& models,
                          const Decomposition& decomposition,
                          const JndTruth& truth, Family family,
                          double threshold, bool chain) {
  const Stimulus& anchor =
      corpus.GetStimulus(truth.content_id, truth.anchor_recipe_id);
  const int steps = chain ? truth.order : 1;
  TruthOutcome out;
  const Stimulus* current = &anchor;
  JndPrediction p;
  for (int step = 0; step < steps; ++step) {
    try {
      p = PredictJnd(models, decomposition, *current, truth.direction,
                     threshold, family);
    } catch (const PredictError&) {
      return out;
    }
    out.clamped = out.clamped || p.clamped;
    if (step + 1 < steps) {
      current = &Nearest(corpus, truth.content_id, p.target_vmaf);
    }
  }
  // Report the chain as one prediction measured from the recorded anchor.
  p.anchor_recipe_id = anchor.recipe.id;
  p.anchor_vmaf = anchor.vmaf;
  p.delta_obj_jnd = std::fabs(anchor.vmaf - p.target_vmaf);
  p.clamped = out.clamped;
  out.error = p.delta_obj_jnd - GroundTruthDelta(corpus, truth);
  out.prediction = p;
  return out;
}

}  // namespace

double GroundTruthDelta(const Corpus& corpus, const JndTruth& truth,
                        bool* degenerate) {
  const Stimulus& a = corpus.GetStimulus(truth.content_id, truth.anchor_recipe_id);
  const Stimulus& j = corpus.GetStimulus(truth.content_id, truth.jnd_recipe_id);
  if (degenerate != nullptr) *degenerate = &a == &j;
  return std::fabs(a.vmaf - j.vmaf);
}

std::string TruthGroup(const JndTruth& truth) {
  std::string group(DirectionName(truth.direction));
  if (truth.order != 1) group += "_order" + std::to_string(truth.order);
  return group;
}

EvalCell ErrorStats(const std::vector<double>& errors) {
  EvalCell cell;
  cell.n = static_cast<int>(errors.size());
  if (errors.empty()) {
    cell.mae = cell.rmse = std::numeric_limits<double>::quiet_NaN();
    return cell;
  }
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (double e : errors) {
    abs_sum += std::fabs(e);
    sq_sum += e * e;
  }
  cell.mae = abs_sum / cell.n;
  cell.rmse = std::sqrt(sq_sum / cell.n);
  return cell;
}

std::optional<EvalGrid::Best> EvalGrid::BestCell(const std::string& group) const {
  std::optional<Best> best;
  for (const auto& [g, by_family] : cells) {
    if (!group.empty() && g != group) continue;
    for (const auto& [family, column] : by_family) {
      for (std::size_t t = 0; t < column.size(); ++t) {
        if (column[t].n == 0) continue;
        if (!best.has_value() || column[t].mae < best->cell.mae) {
          best = Best{g, family, thresholds[t], column[t]};
        }
      }
    }
  }
  return best;
}

EvalGrid EvaluateGrid(const Corpus& corpus, const ModelSet& models,
                      const Decomposition& decomposition,
                      const EvalOptions& options) {
  const std::vector<JndTruth>& truths = corpus.truths();
  if (truths.empty()) throw InputError("no JND truth records to evaluate");
  for (double thr : options.thresholds) {
    if (!(thr > 0.0 && thr < 1.0)) {
      throw InputError("threshold must lie in (0,1), got " + FormatNumber(thr));
    }
  }
  EvalGrid grid;
  grid.thresholds = options.thresholds;
  grid.families = options.families;

  const std::size_t n_thr = options.thresholds.size();
  const std::size_t n_cells = options.families.size() * n_thr;
  std::vector<std::vector<TruthOutcome>> outcomes(n_cells);
  ParallelFor(n_cells, options.jobs, [&](std::size_t c) {
    const Family family = options.families[c / n_thr];
    const double thr = options.thresholds[c % n_thr];
    outcomes[c].reserve(truths.size());
    for (const JndTruth& truth : truths) {
      outcomes[c].push_back(PredictTruth(corpus, models, decomposition, truth,
                                         family, thr, options.chain));
    }
  });

  for (std::size_t c = 0; c < n_cells; ++c) {
    const Family family = options.families[c / n_thr];
    std::map<std::string, std::vector<double>> errors;
    std::map<std::string, EvalCell> counts;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      const std::string group = TruthGroup(truths[t]);
      errors[group];
      const TruthOutcome& o = outcomes[c][t];
      if (!o.prediction.has_value()) {
        ++counts[group].failed;
        continue;
      }
      errors[group].push_back(o.error);
      if (o.clamped) ++counts[group].clamped;
    }
    for (auto& [group, e] : errors) {
      EvalCell cell = ErrorStats(e);
      cell.clamped = counts[group].clamped;
      cell.failed = counts[group].failed;
      auto& column = grid.cells[group][family];
      column.resize(n_thr);
      column[c % n_thr] = cell;
    }
  }
  for (std::size_t t = 0; t < truths.size(); ++t) {
    for (std::size_t c = 0; c < n_cells; ++c) {
      if (outcomes[c][t].prediction.has_value()) {
        grid.predictions.push_back(*outcomes[c][t].prediction);
      }
    }
  }
  return grid;
}

nlohmann::ordered_json EvalGridToJson(const EvalGrid& grid) {
  nlohmann::ordered_json json = nlohmann::ordered_json::object();
  auto number = [](double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
  };
  for (const auto& [group, by_family] : grid.cells) {
    nlohmann::ordered_json g = nlohmann::ordered_json::object();
    for (Family family : grid.families) {
      auto it = by_family.find(family);
      if (it == by_family.end()) continue;
      nlohmann::ordered_json f = nlohmann::ordered_json::object();
      for (std::size_t t = 0; t < grid.thresholds.size(); ++t) {
        const EvalCell& cell = it->second[t];
        f[FormatNumber(grid.thresholds[t])] = {{"mae", number(cell.mae)},
                                               {"rmse", number(cell.rmse)},
                                               {"n", cell.n},
                                               {"clamped", cell.clamped},
                                               {"failed", cell.failed}};
      }
      g[std::string(FamilyName(family))] = std::move(f);
    }
    json[group] = std::move(g);
  }
  return json;
}

std::string RenderEvalTable(const EvalGrid& grid) {
  constexpr int kWidth = 9;
  std::ostringstream out;
  for (const auto& [group, by_family] : grid.cells) {
    out << group << '\n';
    for (int metric = 0; metric < 2; ++metric) {
      out << std::left << std::setw(6) << (metric == 0 ? "MAE" : "RMSE")
          << std::right;
      for (Family family : grid.families) {
        out << std::setw(kWidth) << FamilyLabel(family);
      }
      out << '\n';
      for (std::size_t t = 0; t < grid.thresholds.size(); ++t) {
        out << std::left << std::setw(6) << FormatFixed(grid.thresholds[t], 2)
            << std::right;
        for (Family family : grid.families) {
          auto it = by_family.find(family);
          const double v = it == by_family.end()
                               ? std::nan("")
                               : (metric == 0 ? it->second[t].mae
                                              : it->second[t].rmse);
          out << std::setw(kWidth) << (std::isfinite(v) ? FormatFixed(v, 4) : "-");
        }
        out << '\n';
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace jndmap
