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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "jndmap/csv.h"
#include "jndmap/error.h"
#include "jndmap/format.h"
#include "jndmap/screening.h"
#include "jndmap/significance.h"

#ifndef JNDMAP_VERSION
#define JNDMAP_VERSION "unknown"
#endif

namespace jndmap {
namespace {

constexpr std::string_view kCurveSamplesHeader[] = {"range_id", "family",
                                                    "delta_obj", "p_sd"};

std::string CompilerId() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return std::string("gcc ") + __VERSION__;
#else
  return "unknown";
#endif
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file", path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Decomposition LoadRanges(const std::filesystem::path& ranges_json) {
  return DecompositionFromJson(ReadJsonFile(ranges_json));
}

ModelSet LoadModels(const std::filesystem::path& models_json) {
  return ModelSetFromJson(ReadJsonFile(models_json));
}

ModelSetOptions FitOptionsFor(const RunConfig& config, int jobs) {
  ModelSetOptions options;
  options.bin_width = config.bin_width;
  options.glm_mode = config.glm_mode;
  options.families = config.families;
  options.jobs = jobs;
  return options;
}

void WriteFitArtifacts(const ModelSet& models, ArtifactWriter& out) {
  std::ostringstream codist;
  WriteCodistHeader(codist);
  for (const CoDistribution& cd : models.codists) WriteCodistRows(cd, codist);
  out.Write("codist.csv", codist.str());
  out.WriteJson("mf_params.json", ModelSetToJson(models));
  std::ostringstream samples;
  WriteCurveSamplesHeader(samples);
  for (const CoDistribution& cd : models.codists) {
    auto it = models.models.find(cd.range_id);
    if (it == models.models.end()) continue;
    for (Family f : kAllFamilies) {
      auto m = it->second.find(f);
      if (m == it->second.end() || !m->second.report.valid) continue;
      WriteCurveSamples(cd.range_id, m->second, samples);
    }
  }
  out.Write("curve_samples.csv", samples.str());
}

void WriteEvalArtifacts(const EvalGrid& grid, ArtifactWriter& out) {
  std::ostringstream predictions;
  WritePredictionsHeader(predictions);
  for (const JndPrediction& p : grid.predictions) WritePrediction(p, predictions);
  out.Write("predictions.csv", predictions.str());
  out.WriteJson("metrics.json", EvalGridToJson(grid));
}

nlohmann::ordered_json InputRecord(const std::filesystem::path& path) {
  return {{"path", path.string()}, {"sha256", Sha256File(path)}};
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &size, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < size; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 15]);
  }
  return hex;
}

std::string Sha256File(const std::filesystem::path& path) {
  return Sha256Hex(ReadFile(path));
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

void ArtifactWriter::Write(const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw InputError("cannot create output directory: " + ec.message(),
                           dir_.string());
  const std::filesystem::path path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw Error("failed to write " + path.string());
  const std::string hash = Sha256Hex(content);
  auto it = std::find_if(written_.begin(), written_.end(),
                         [&](const auto& w) { return w.first == name; });
  if (it != written_.end()) {
    it->second = hash;
  } else {
    written_.emplace_back(name, hash);
  }
}

void ArtifactWriter::WriteJson(const std::string& name,
                               const nlohmann::ordered_json& json) {
  Write(name, json.dump(2) + "\n");
}

Corpus LoadCorpusFrom(const CorpusPaths& paths) {
  return LoadCorpus(paths.vmaf, paths.ratings, paths.truth);
}

RunSummary CmdRun(const RunConfig& config, const CorpusPaths& paths,
                  ArtifactWriter& out, int jobs, std::ostream& log) {
  ValidateConfig(config);
  if (!paths.ratings.has_value()) {
    throw InputError("run needs a DCR ratings table");
  }
  RunSummary summary;
  std::vector<std::string> stages;
  const Corpus corpus = LoadCorpusFrom(paths);
  log << "corpus: " << corpus.stimuli().size() << " stimuli, "
      << corpus.ratings().size() << " ratings, " << corpus.truths().size()
      << " truths\n";

  summary.screening = Screen(corpus, config.screening);
  out.WriteJson("screening.json", ScreeningReportToJson(summary.screening));
  const Corpus screened = ApplyScreening(corpus, summary.screening);
  stages.push_back("screen");
  log << "screening (" << ScreeningMethodName(config.screening)
      << "): removed " << summary.screening.removed.size() << " observer(s)\n";

  ClassifyOptions classify;
  classify.alpha = config.alpha;
  classify.test = config.test;
  classify.jobs = jobs;
  const std::vector<RatedPair> pairs = ClassifyPairs(screened, classify);
  std::ostringstream pairs_csv;
  WritePairsCsv(pairs, pairs_csv);
  out.Write("pairs.csv", pairs_csv.str());
  summary.pairs = pairs.size();
  summary.significant_pairs = static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](auto& p) { return p.sig; }));
  stages.push_back("classify");
  log << "pairs: " << summary.pairs << " (" << summary.significant_pairs
      << " significantly different)\n";

  const Decomposition decomposition = AssignPairs(
      pairs, MakeDecomposition(config.decomposition, screened), screened);
  out.WriteJson("ranges.json", DecompositionToJson(decomposition, pairs));
  stages.push_back("decompose");
  for (const std::string& id : EmptyRanges(decomposition, screened)) {
    log << "warning: range " << id << " holds no stimuli\n";
  }

  const ModelSet models =
      FitModels(pairs, decomposition, FitOptionsFor(config, jobs));
  WriteFitArtifacts(models, out);
  stages.push_back("codist");
  stages.push_back("fit");
  for (const auto& [range, failures] : models.failures) {
    for (const auto& [family, message] : failures) {
      log << "warning: " << FamilyName(family) << " on " << range << ": "
          << message << "\n";
    }
  }
  for (const auto& [range, fitted] : models.models) {
    for (const auto& [family, mf] : fitted) {
      if (!mf.report.valid) {
        log << "warning: " << FamilyName(family) << " on " << range
            << " rejected: " << mf.report.note << "\n";
      }
    }
  }

  if (!corpus.truths().empty()) {
    EvalOptions eval;
    eval.thresholds = config.thresholds;
    eval.families = config.families;
    eval.chain = config.chain;
    eval.jobs = jobs;
    summary.grid = EvaluateGrid(screened, models, decomposition, eval);
    WriteEvalArtifacts(*summary.grid, out);
    stages.push_back("predict");
    stages.push_back("evaluate");
    log << RenderEvalTable(*summary.grid);
    if (auto best = summary.grid->BestCell()) {
      log << "best cell: " << best->group << " " << FamilyName(best->family)
          << " thr " << FormatNumber(best->threshold) << " MAE "
          << FormatFixed(best->cell.mae, 4) << " RMSE "
          << FormatFixed(best->cell.rmse, 4) << "\n";
    }
  } else {
    log << "no truth table: predict and evaluate skipped\n";
  }

  nlohmann::ordered_json manifest;
  manifest["tool"] = "jndmap";
  manifest["version"] = JNDMAP_VERSION;
  manifest["compiler"] = CompilerId();
  manifest["command"] = "run";
  const nlohmann::ordered_json config_json = ConfigToJson(config);
  manifest["config"] = config_json;
  manifest["config_sha256"] = Sha256Hex(config_json.dump());
  nlohmann::ordered_json inputs;
  inputs["vmaf"] = InputRecord(paths.vmaf);
  inputs["ratings"] = InputRecord(*paths.ratings);
  if (paths.truth.has_value()) inputs["truth"] = InputRecord(*paths.truth);
  manifest["inputs"] = std::move(inputs);
  manifest["stages"] = stages;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : out.written()) artifacts[name] = hash;
  manifest["artifacts"] = std::move(artifacts);
  out.WriteJson("run_manifest.json", manifest);
  return summary;
}

SimResult CmdSimulate(const SimSpec& spec, ArtifactWriter& out, int jobs) {
  SimResult result = SimulateCorpus(spec, jobs);
  std::ostringstream vmaf, ratings, truth;
  WriteVmafCsv(result.corpus, vmaf);
  WriteRatingsCsv(result.corpus, ratings);
  WriteTruthCsv(result.corpus, truth);
  out.Write("vmaf_scores.csv", vmaf.str());
  out.Write("dcr_ratings.csv", ratings.str());
  out.Write("jnd_truth.csv", truth.str());
  out.WriteJson("sim_truth.json", SimTruthJson(spec, result));
  return result;
}

ScreeningReport CmdScreen(const CorpusPaths& paths, ScreeningMethod method,
                          ArtifactWriter& out) {
  const ScreeningReport report = Screen(LoadCorpusFrom(paths), method);
  out.WriteJson("screening.json", ScreeningReportToJson(report));
  return report;
}

std::vector<RatedPair> CmdClassify(
    const RunConfig& config, const CorpusPaths& paths,
    const std::optional<std::filesystem::path>& screening_json,
    ArtifactWriter& out, int jobs) {
  const Corpus corpus = LoadCorpusFrom(paths);
  const ScreeningReport report =
      screening_json.has_value()
          ? ScreeningReportFromJson(ReadJsonFile(*screening_json))
          : Screen(corpus, config.screening);
  ClassifyOptions options;
  options.alpha = config.alpha;
  options.test = config.test;
  options.jobs = jobs;
  std::vector<RatedPair> pairs =
      ClassifyPairs(ApplyScreening(corpus, report), options);
  std::ostringstream csv;
  WritePairsCsv(pairs, csv);
  out.Write("pairs.csv", csv.str());
  return pairs;
}

Decomposition CmdDecompose(const RunConfig& config, const CorpusPaths& paths,
                           const std::filesystem::path& pairs_csv,
                           ArtifactWriter& out) {
  const Corpus corpus = LoadCorpusFrom(paths);
  const std::vector<RatedPair> pairs = ReadPairsCsv(pairs_csv);
  Decomposition d = AssignPairs(
      pairs, MakeDecomposition(config.decomposition, corpus), corpus);
  out.WriteJson("ranges.json", DecompositionToJson(d, pairs));
  return d;
}

ModelSet CmdFit(const RunConfig& config, const CorpusPaths& paths,
                const std::filesystem::path& pairs_csv,
                const std::filesystem::path& ranges_json, ArtifactWriter& out,
                int jobs) {
  const Corpus corpus = LoadCorpusFrom(paths);
  const std::vector<RatedPair> pairs = ReadPairsCsv(pairs_csv);
  const Decomposition d = AssignPairs(pairs, LoadRanges(ranges_json), corpus);
  ModelSet models = FitModels(pairs, d, FitOptionsFor(config, jobs));
  WriteFitArtifacts(models, out);
  return models;
}

JndPrediction CmdPredict(const std::filesystem::path& models_json,
                         const std::filesystem::path& ranges_json,
                         const Stimulus& anchor, Direction direction,
                         double threshold, Family family, ArtifactWriter& out) {
  if (!(anchor.vmaf >= 0.0 && anchor.vmaf <= 100.0)) {
    throw InputError("anchor vmaf out of range [0,100]");
  }
  const JndPrediction p =
      PredictJnd(LoadModels(models_json), LoadRanges(ranges_json), anchor,
                 direction, threshold, family);
  std::ostringstream csv;
  WritePredictionsHeader(csv);
  WritePrediction(p, csv);
  out.Write("predictions.csv", csv.str());
  return p;
}

EvalGrid CmdEvaluate(const RunConfig& config, const CorpusPaths& paths,
                     const std::filesystem::path& models_json,
                     const std::filesystem::path& ranges_json,
                     ArtifactWriter& out, int jobs) {
  if (!paths.truth.has_value()) throw InputError("evaluate needs a truth table");
  const Corpus corpus = LoadCorpusFrom(paths);
  EvalOptions options;
  options.thresholds = config.thresholds;
  options.families = config.families;
  options.chain = config.chain;
  options.jobs = jobs;
  EvalGrid grid = EvaluateGrid(corpus, LoadModels(models_json),
                               LoadRanges(ranges_json), options);
  WriteEvalArtifacts(grid, out);
  return grid;
}

std::string RenderSvg(const std::filesystem::path& curve_samples,
                      const std::optional<std::filesystem::path>& codist) {
  struct Panel {
    std::map<Family, std::vector<std::pair<double, double>>> curves;
    std::vector<std::pair<double, double>> points;
    double x_max = 1.0;
  };
  std::vector<std::string> order;
  std::map<std::string, Panel> panels;
  auto panel = [&](const std::string& id) -> Panel& {
    if (!panels.contains(id)) order.push_back(id);
    return panels[id];
  };
  const CsvTable samples = CsvTable::Read(curve_samples, kCurveSamplesHeader);
  for (const CsvRow& row : samples.rows()) {
    Panel& p = panel(samples.Text(row, 0));
    Family f;
    try {
      f = ParseFamily(samples.Text(row, 1));
    } catch (const InputError& e) {
      throw InputError(e.reason(), samples.source(), row.line, "family");
    }
    const double x = samples.Real(row, 2);
    p.curves[f].emplace_back(x, samples.Real(row, 3));
    p.x_max = std::max(p.x_max, x);
  }
  if (codist.has_value()) {
    const CsvTable t = CsvTable::Read(*codist, kCodistHeader);
    for (const CsvRow& row : t.rows()) {
      if (row.fields.at(5).empty()) continue;
      Panel& p = panel(t.Text(row, 0));
      const double x = 0.5 * (t.Real(row, 1) + t.Real(row, 2));
      p.points.emplace_back(x, t.Real(row, 5));
      p.x_max = std::max(p.x_max, t.Real(row, 2));
    }
  }
  if (order.empty()) throw InputError("nothing to render", curve_samples.string());

  constexpr double kW = 480, kH = 240, kLeft = 50, kTop = 30, kPlotW = 400,
                   kPlotH = 170;
  static const std::map<Family, const char*> kColor = {
      {Family::kLogistic5, "#1f77b4"},
      {Family::kCubic4, "#ff7f0e"},
      {Family::kLogistic2, "#2ca02c"},
      {Family::kGlm, "#d62728"}};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH * order.size() << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Panel& p = panels[order[i]];
    const double y0 = kH * i;
    auto sx = [&](double x) { return kLeft + kPlotW * x / p.x_max; };
    auto sy = [&](double y) { return y0 + kTop + kPlotH * (1.0 - y); };
    svg << "<text x=\"" << kLeft << "\" y=\"" << y0 + 18 << "\">range "
        << order[i] << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << y0 + kTop << "\" width=\""
        << kPlotW << "\" height=\"" << kPlotH
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << kLeft - 20 << "\" y=\"" << sy(1.0) + 4
        << "\">1</text><text x=\"" << kLeft - 20 << "\" y=\"" << sy(0.0) + 4
        << "\">0</text>\n";
    svg << "<text x=\"" << kLeft + kPlotW - 30 << "\" y=\"" << sy(0.0) + 16
        << "\">" << FormatFixed(p.x_max, 1) << "</text>\n";
    for (const auto& [x, y] : p.points) {
      svg << "<circle cx=\"" << FormatFixed(sx(x), 2) << "\" cy=\""
          << FormatFixed(sy(y), 2) << "\" r=\"2.5\" fill=\"#444\"/>\n";
    }
    double legend_y = y0 + kTop + 12;
    for (const auto& [family, curve] : p.curves) {
      svg << "<polyline fill=\"none\" stroke=\"" << kColor.at(family)
          << "\" points=\"";
      for (const auto& [x, y] : curve) {
        svg << FormatFixed(sx(x), 2) << "," << FormatFixed(sy(y), 2) << " ";
      }
      svg << "\"/>\n";
      svg << "<text x=\"" << kLeft + 8 << "\" y=\"" << legend_y << "\" fill=\""
          << kColor.at(family) << "\">" << FamilyLabel(family) << "</text>\n";
      legend_y += 13;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

nlohmann::ordered_json ErrorRecord(const std::string& command,
                                   const std::exception& error,
                                   const ArtifactWriter* out) {
  nlohmann::ordered_json record;
  record["command"] = command;
  std::string kind = "internal";
  if (dynamic_cast<const InputError*>(&error) != nullptr) {
    kind = "input";
  } else if (dynamic_cast<const FitError*>(&error) != nullptr) {
    kind = "fit";
  } else if (dynamic_cast<const PredictError*>(&error) != nullptr) {
    kind = "predict";
  }
  record["kind"] = kind;
  record["exit_code"] = ExitCodeFor(error);
  if (const auto* input = dynamic_cast<const InputError*>(&error)) {
    record["message"] = input->reason();
    if (!input->file().empty()) record["file"] = input->file();
    if (input->line() > 0) record["line"] = input->line();
    if (!input->column().empty()) record["column"] = input->column();
  } else {
    record["message"] = error.what();
  }
  nlohmann::ordered_json partial = nlohmann::ordered_json::array();
  if (out != nullptr) {
    for (const auto& [name, hash] : out->written()) partial.push_back(name);
  }
  record["partial_artifacts"] = std::move(partial);
  return {{"error", record}};
}

int ExitCodeFor(const std::exception& error) {
  if (dynamic_cast<const InputError*>(&error) != nullptr) return 2;
  if (dynamic_cast<const FitError*>(&error) != nullptr ||
      dynamic_cast<const PredictError*>(&error) != nullptr) {
    return 3;
  }
  return 1;
}

}  // namespace jndmap
