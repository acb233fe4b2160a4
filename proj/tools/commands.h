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

// Subcommand implementations behind the jndmap executable. Each command
// reads interchange files, writes its artifacts through an ArtifactWriter
// and throws jndmap::Error subclasses on failure.

#ifndef JNDMAP_TOOLS_COMMANDS_H_
#define JNDMAP_TOOLS_COMMANDS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.h"
#include "jndmap/corpus.h"
#include "jndmap/evaluate.h"
#include "jndmap/predict.h"
#include "jndmap/simulate.h"
#include "json.hpp"

namespace jndmap {

// Hex SHA-256 of a byte string / of a file's contents.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::filesystem::path& path);

// Writes files into one output directory and remembers what it wrote, so a
// failing command can report which artifacts are partial.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path Path(const std::string& name) const { return dir_ / name; }
  void Write(const std::string& name, const std::string& content);
  void WriteJson(const std::string& name, const nlohmann::ordered_json& json);
  // name -> sha256, in write order.
  const std::vector<std::pair<std::string, std::string>>& written() const {
    return written_;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> written_;
};

struct CorpusPaths {
  std::filesystem::path vmaf;
  std::optional<std::filesystem::path> ratings;
  std::optional<std::filesystem::path> truth;
};

Corpus LoadCorpusFrom(const CorpusPaths& paths);

struct RunSummary {
  ScreeningReport screening;
  std::size_t pairs = 0;
  std::size_t significant_pairs = 0;
  std::optional<EvalGrid> grid;  // absent without truth records
};

// screen -> classify -> decompose -> codist -> fit -> predict -> evaluate.
// Writes screening.json, pairs.csv, ranges.json, codist.csv, mf_params.json,
// curve_samples.csv and, when truths exist, predictions.csv and
// metrics.json; run_manifest.json last. Progress goes to `log`.
RunSummary CmdRun(const RunConfig& config, const CorpusPaths& paths,
                  ArtifactWriter& out, int jobs, std::ostream& log);

// vmaf_scores.csv, dcr_ratings.csv, jnd_truth.csv, sim_truth.json.
SimResult CmdSimulate(const SimSpec& spec, ArtifactWriter& out, int jobs);

ScreeningReport CmdScreen(const CorpusPaths& paths, ScreeningMethod method,
                          ArtifactWriter& out);

// pairs.csv. A screening.json from `screen` may be supplied; otherwise the
// configured method runs first.
std::vector<RatedPair> CmdClassify(
    const RunConfig& config, const CorpusPaths& paths,
    const std::optional<std::filesystem::path>& screening_json,
    ArtifactWriter& out, int jobs);

// ranges.json.
Decomposition CmdDecompose(const RunConfig& config, const CorpusPaths& paths,
                           const std::filesystem::path& pairs_csv,
                           ArtifactWriter& out);

// codist.csv, mf_params.json, curve_samples.csv.
ModelSet CmdFit(const RunConfig& config, const CorpusPaths& paths,
                const std::filesystem::path& pairs_csv,
                const std::filesystem::path& ranges_json, ArtifactWriter& out,
                int jobs);

// One prediction; predictions.csv with a single row.
JndPrediction CmdPredict(const std::filesystem::path& models_json,
                         const std::filesystem::path& ranges_json,
                         const Stimulus& anchor, Direction direction,
                         double threshold, Family family, ArtifactWriter& out);

// metrics.json and predictions.csv from fitted models and a truth table.
EvalGrid CmdEvaluate(const RunConfig& config, const CorpusPaths& paths,
                     const std::filesystem::path& models_json,
                     const std::filesystem::path& ranges_json,
                     ArtifactWriter& out, int jobs);

// SVG with one panel per range: fitted curves from curve_samples.csv and,
// when given, the P_SD points of codist.csv.
std::string RenderSvg(const std::filesystem::path& curve_samples,
                      const std::optional<std::filesystem::path>& codist);

// Machine-readable failure record written to error.json and stderr.
nlohmann::ordered_json ErrorRecord(const std::string& command,
                                   const std::exception& error,
                                   const ArtifactWriter* out);

// 2 for input errors, 3 for fit/prediction failures, 1 otherwise.
int ExitCodeFor(const std::exception& error);

}  // namespace jndmap

#endif  // JNDMAP_TOOLS_COMMANDS_H_
