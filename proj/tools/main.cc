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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.h"
#include "config.h"
#include "jndmap/error.h"
#include "jndmap/format.h"

namespace {

using jndmap::ArtifactWriter;
using jndmap::CorpusPaths;
using jndmap::RunConfig;

struct ConfigFlags {
  std::optional<std::string> config_file;
  std::optional<double> alpha;
  std::optional<std::string> test;
  std::optional<std::string> screening;
  std::optional<std::string> strategy;
  std::optional<int> k;
  std::optional<std::string> balance_by;
  std::optional<double> width;
  std::vector<double> bounds;
  std::optional<double> bin_width;
  std::vector<std::string> families;
  std::vector<double> thresholds;
  std::optional<std::string> glm_mode;
  std::optional<bool> chain;
  std::optional<std::uint64_t> seed;

  void Register(CLI::App* app) {
    app->add_option("--config", config_file, "JSON run configuration");
    app->add_option("--alpha", alpha, "significance level");
    app->add_option("--test", test, "welch|student|paired");
    app->add_option("--screening", screening, "bt500|vqeg_hdtv|bt1788|none");
    app->add_option("--strategy", strategy, "balanced|fixed_width|explicit");
    app->add_option("--k", k, "number of balanced ranges");
    app->add_option("--balance-by", balance_by, "stimuli|pairs");
    app->add_option("--width", width, "fixed range width");
    app->add_option("--bounds", bounds, "explicit range bounds")
        ->delimiter(',');
    app->add_option("--bin-width", bin_width, "delta-VMAF histogram bin width");
    app->add_option("--families", families, "logistic5,cubic4,logistic2,glm")
        ->delimiter(',');
    app->add_option("--thresholds", thresholds, "evaluation thresholds")
        ->delimiter(',');
    app->add_option("--glm-mode", glm_mode, "pairwise|points");
    app->add_option("--chain", chain, "chain higher-order JND predictions");
    app->add_option("--seed", seed, "seed (overrides JNDMAP_SEED)");
  }

  RunConfig Resolve() const {
    RunConfig c;
    if (config_file.has_value()) {
      c = jndmap::ConfigFromJson(jndmap::ReadJsonFile(*config_file));
    }
    nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
    if (const char* env = std::getenv("JNDMAP_SEED")) {
      try {
        overrides["seed"] = std::stoull(env);
      } catch (const std::exception&) {
        throw jndmap::InputError("JNDMAP_SEED is not an unsigned integer");
      }
    }
    if (alpha) overrides["alpha"] = *alpha;
    if (test) overrides["test"] = *test;
    if (screening) overrides["screening"] = *screening;
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    if (strategy) d["strategy"] = *strategy;
    if (k) d["k"] = *k;
    if (balance_by) d["balance_by"] = *balance_by;
    if (width) d["width"] = *width;
    if (!bounds.empty()) {
      d["bounds"] = bounds;
      if (!strategy) d["strategy"] = "explicit";
    }
    if (!d.empty()) overrides["decomposition"] = d;
    if (bin_width) overrides["bin_width"] = *bin_width;
    if (!families.empty()) overrides["families"] = families;
    if (!thresholds.empty()) overrides["thresholds"] = thresholds;
    if (glm_mode) overrides["glm_mode"] = *glm_mode;
    if (chain) overrides["chain"] = *chain;
    if (seed) overrides["seed"] = *seed;
    return jndmap::ConfigFromJson(overrides, c);
  }
};

struct PathFlags {
  std::string vmaf;
  std::optional<std::string> ratings;
  std::optional<std::string> truth;

  void Register(CLI::App* app, bool need_ratings, bool need_truth) {
    app->add_option("--vmaf", vmaf, "vmaf_scores.csv")->required();
    auto* r = app->add_option("--ratings", ratings, "dcr_ratings.csv");
    if (need_ratings) r->required();
    auto* t = app->add_option("--truth", truth, "jnd_truth.csv");
    if (need_truth) t->required();
  }

  CorpusPaths Get() const {
    CorpusPaths p;
    p.vmaf = vmaf;
    if (ratings) p.ratings = *ratings;
    if (truth) p.truth = *truth;
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map delta-VMAF to JND probability and predict JND thresholds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", JNDMAP_VERSION);
  int jobs = 1;
  std::string out_dir = "out";
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  ConfigFlags config_flags;
  PathFlags path_flags;

  auto* run = app.add_subcommand("run", "full pipeline from corpus to metrics");
  path_flags.Register(run, true, false);
  config_flags.Register(run);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::optional<std::string> spec_file;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic corpus");
  simulate->add_option("--spec", spec_file, "simulation spec JSON");
  simulate->add_option("--seed", sim_seed, "seed (overrides JNDMAP_SEED)");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--jobs", jobs, "worker threads")
      ->check(CLI::PositiveNumber);

  std::string method = "bt500";
  auto* screen = app.add_subcommand("screen", "observer screening");
  path_flags.Register(screen, true, false);
  screen->add_option("--method", method, "bt500|vqeg_hdtv|bt1788|none");
  screen->add_option("--out", out_dir, "output directory");

  std::optional<std::string> screening_json;
  auto* classify = app.add_subcommand("classify", "t-test every pair");
  path_flags.Register(classify, true, false);
  config_flags.Register(classify);
  classify->add_option("--screening-report", screening_json,
                       "screening.json from the screen command");
  classify->add_option("--out", out_dir, "output directory");
  classify->add_option("--jobs", jobs, "worker threads")
      ->check(CLI::PositiveNumber);

  std::string pairs_csv;
  auto* decompose = app.add_subcommand("decompose", "sub-quality ranges");
  path_flags.Register(decompose, false, false);
  config_flags.Register(decompose);
  decompose->add_option("--pairs", pairs_csv, "pairs.csv")->required();
  decompose->add_option("--out", out_dir, "output directory");

  std::string ranges_json;
  auto* fit = app.add_subcommand("fit", "co-distributions and mapping functions");
  path_flags.Register(fit, false, false);
  config_flags.Register(fit);
  fit->add_option("--pairs", pairs_csv, "pairs.csv")->required();
  fit->add_option("--ranges", ranges_json, "ranges.json")->required();
  fit->add_option("--out", out_dir, "output directory");
  fit->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string models_json;
  double anchor_vmaf = 0.0;
  std::string anchor_content = "anchor";
  std::string anchor_recipe = "anchor";
  std::string direction = "dec";
  double threshold = 0.95;
  std::string family = "glm";
  auto* predict = app.add_subcommand("predict", "predict one JND");
  predict->add_option("--models", models_json, "mf_params.json")->required();
  predict->add_option("--ranges", ranges_json, "ranges.json")->required();
  predict->add_option("--anchor-vmaf", anchor_vmaf, "anchor VMAF")->required();
  predict->add_option("--content", anchor_content, "anchor content id");
  predict->add_option("--recipe", anchor_recipe, "anchor recipe id");
  predict->add_option("--direction", direction, "inc|dec");
  predict->add_option("--thr", threshold, "threshold in (0,1)");
  predict->add_option("--family", family, "logistic5|cubic4|logistic2|glm");
  predict->add_option("--out", out_dir, "output directory");

  auto* evaluate = app.add_subcommand("evaluate", "MAE/RMSE grid");
  path_flags.Register(evaluate, false, true);
  config_flags.Register(evaluate);
  evaluate->add_option("--models", models_json, "mf_params.json")->required();
  evaluate->add_option("--ranges", ranges_json, "ranges.json")->required();
  evaluate->add_option("--out", out_dir, "output directory");
  evaluate->add_option("--jobs", jobs, "worker threads")
      ->check(CLI::PositiveNumber);

  std::string samples_csv;
  std::optional<std::string> codist_csv;
  std::string svg_path = "curves.svg";
  auto* render = app.add_subcommand("render", "SVG plot of fitted curves");
  render->add_option("--samples", samples_csv, "curve_samples.csv")->required();
  render->add_option("--codist", codist_csv, "codist.csv");
  render->add_option("--svg", svg_path, "output SVG file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<ArtifactWriter> out;
  try {
    if (command != "render") out.emplace(out_dir);
    if (command == "run") {
      jndmap::CmdRun(config_flags.Resolve(), path_flags.Get(), *out, jobs,
                     std::cout);
    } else if (command == "simulate") {
      nlohmann::ordered_json spec_json = nlohmann::ordered_json::object();
      if (spec_file) spec_json = jndmap::ReadJsonFile(*spec_file);
      jndmap::SimSpec spec = jndmap::SimSpecFromJson(spec_json);
      if (const char* env = std::getenv("JNDMAP_SEED")) {
        try {
          spec.seed = std::stoull(env);
        } catch (const std::exception&) {
          throw jndmap::InputError("JNDMAP_SEED is not an unsigned integer");
        }
      }
      if (sim_seed) spec.seed = *sim_seed;
      const jndmap::SimResult r = jndmap::CmdSimulate(spec, *out, jobs);
      std::cout << "simulated " << r.corpus.stimuli().size() << " stimuli, "
                << r.corpus.ratings().size() << " ratings, "
                << r.corpus.truths().size() << " truths into " << out_dir
                << "\n";
    } else if (command == "screen") {
      const jndmap::ScreeningReport r = jndmap::CmdScreen(
          path_flags.Get(), jndmap::ParseScreeningMethod(method), *out);
      std::cout << "removed " << r.removed.size() << " observer(s)\n";
    } else if (command == "classify") {
      std::optional<std::filesystem::path> report;
      if (screening_json) report = *screening_json;
      const auto pairs = jndmap::CmdClassify(config_flags.Resolve(),
                                             path_flags.Get(), report, *out, jobs);
      std::cout << pairs.size() << " pairs classified\n";
    } else if (command == "decompose") {
      const jndmap::Decomposition d = jndmap::CmdDecompose(
          config_flags.Resolve(), path_flags.Get(), pairs_csv, *out);
      for (const auto& r : d.ranges) {
        std::cout << r.Id() << " " << r.pair_refs.size() << " pairs\n";
      }
    } else if (command == "fit") {
      const jndmap::ModelSet m =
          jndmap::CmdFit(config_flags.Resolve(), path_flags.Get(), pairs_csv,
                         ranges_json, *out, jobs);
      std::cout << m.codists.size() << " ranges fitted\n";
    } else if (command == "predict") {
      jndmap::Stimulus anchor;
      anchor.content_id = anchor_content;
      anchor.recipe.id = anchor_recipe;
      anchor.vmaf = anchor_vmaf;
      const jndmap::JndPrediction p = jndmap::CmdPredict(
          models_json, ranges_json, anchor, jndmap::ParseDirection(direction),
          threshold, jndmap::ParseFamily(family), *out);
      std::cout << jndmap::DirectionName(p.direction) << " anchor "
                << jndmap::FormatNumber(p.anchor_vmaf) << " range "
                << p.range_id << " " << jndmap::FamilyName(p.family)
                << " thr " << jndmap::FormatNumber(p.threshold)
                << ": delta_obj_jnd " << jndmap::FormatFixed(p.delta_obj_jnd, 4)
                << " target_vmaf " << jndmap::FormatFixed(p.target_vmaf, 4)
                << (p.clamped ? " (clamped)" : "") << "\n";
    } else if (command == "evaluate") {
      const jndmap::EvalGrid grid =
          jndmap::CmdEvaluate(config_flags.Resolve(), path_flags.Get(),
                              models_json, ranges_json, *out, jobs);
      std::cout << jndmap::RenderEvalTable(grid);
    } else if (command == "render") {
      std::optional<std::filesystem::path> codist;
      if (codist_csv) codist = *codist_csv;
      const std::filesystem::path svg(svg_path);
      ArtifactWriter writer(svg.has_parent_path() ? svg.parent_path() : ".");
      writer.Write(svg.filename().string(), jndmap::RenderSvg(samples_csv, codist));
    }
  } catch (const std::exception& e) {
    const nlohmann::ordered_json record =
        jndmap::ErrorRecord(command, e, out ? &*out : nullptr);
    std::cerr << record.dump() << "\n";
    if (out) {
      try {
        out->WriteJson("error.json", record);
      } catch (const std::exception&) {
        // The stderr record is enough when the directory is unwritable.
      }
    }
    return jndmap::ExitCodeFor(e);
  }
  return 0;
}
