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

// Data model for a DCR/JND study: encoded stimuli with their VMAF scores,
// per-observer DCR ratings and JND ground truth, plus CSV ingestion.
//
// A Corpus is immutable once built and keeps every table in canonical
// (sorted) order, so two loads of the same bytes serialize identically no
// matter how the input rows were ordered.

#ifndef JNDMAP_CORPUS_H_
#define JNDMAP_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jndmap {

enum class Direction { kInc, kDec };

std::string_view DirectionName(Direction direction);
Direction ParseDirection(std::string_view text);

class Resolution {
 public:
  enum class Kind { k540p, k720p, k1080p, k2160p, kOther };

  Resolution() = default;
  static Resolution Parse(std::string_view text);

  Kind kind() const { return kind_; }
  // "540p", "720p", "1080p", "2160p" or the free-form label for kOther.
  const std::string& label() const { return label_; }

  friend bool operator==(const Resolution&, const Resolution&) = default;

 private:
  Kind kind_ = Kind::k1080p;
  std::string label_ = "1080p";
};

struct Recipe {
  std::string id;
  Resolution resolution;
  // Codec-side distortion index (QP/CRF). Informational only: nothing in the
  // pipeline reads it, which keeps the model codec-agnostic.
  std::int64_t level = 0;

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

struct Stimulus {
  std::string content_id;
  Recipe recipe;
  double vmaf = 0.0;  // finite, in [0, 100]

  friend bool operator==(const Stimulus&, const Stimulus&) = default;
};

struct DcrRating {
  std::string content_id;
  std::string recipe_id;
  std::string observer_id;
  int score = 0;  // five-level DCR scale, 1..5

  friend bool operator==(const DcrRating&, const DcrRating&) = default;
};

struct JndTruth {
  std::string content_id;
  std::string anchor_recipe_id;
  Direction direction = Direction::kDec;
  std::string jnd_recipe_id;
  int order = 1;  // 1st, 2nd, 3rd JND ...

  friend bool operator==(const JndTruth&, const JndTruth&) = default;
};

// Where each row of a table came from; lets validation errors point at the
// offending file line. Indices align with the vectors passed to Create.
struct SourceMap {
  std::string vmaf_file;
  std::string ratings_file;
  std::string truth_file;
  std::vector<std::size_t> vmaf_lines;
  std::vector<std::size_t> rating_lines;
  std::vector<std::size_t> truth_lines;
};

class Corpus {
 public:
  Corpus() = default;

  // Validates every invariant (ranges, uniqueness, referential integrity,
  // truth direction vs. VMAF ordering) and sorts the tables canonically.
  // Throws InputError.
  static Corpus Create(std::vector<Stimulus> stimuli,
                       std::vector<DcrRating> ratings,
                       std::vector<JndTruth> truths,
                       const SourceMap* source = nullptr);

  // Sorted by (content_id, recipe_id).
  const std::vector<Stimulus>& stimuli() const { return stimuli_; }
  // Sorted by (content_id, recipe_id, observer_id).
  const std::vector<DcrRating>& ratings() const { return ratings_; }
  // Sorted by (content_id, direction, order, anchor, jnd).
  const std::vector<JndTruth>& truths() const { return truths_; }

  const Stimulus* FindStimulus(std::string_view content_id,
                               std::string_view recipe_id) const;
  // Throws InputError for unknown stimuli.
  const Stimulus& GetStimulus(std::string_view content_id,
                              std::string_view recipe_id) const;

  std::vector<std::string> ContentIds() const;
  // Stimuli of one content in recipe_id order.
  std::span<const Stimulus> StimuliOf(std::string_view content_id) const;
  // Ratings of one stimulus in observer_id order (possibly empty).
  std::span<const DcrRating> RatingsOf(std::string_view content_id,
                                       std::string_view recipe_id) const;
  std::set<std::string> Observers() const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.stimuli_ == b.stimuli_ && a.ratings_ == b.ratings_ &&
           a.truths_ == b.truths_;
  }

 private:
  void BuildIndex();

  std::vector<Stimulus> stimuli_;
  std::vector<DcrRating> ratings_;
  std::vector<JndTruth> truths_;
  // (content, recipe) -> stimulus index.
  std::map<std::pair<std::string, std::string>, std::size_t, std::less<>>
      stimulus_index_;
  // stimulus index -> [begin, end) into ratings_.
  std::vector<std::pair<std::size_t, std::size_t>> rating_spans_;
};

struct LoadStats {
  std::size_t stimuli = 0;
  std::size_t ratings = 0;
  std::size_t truths = 0;
};

inline constexpr std::string_view kVmafHeader[] = {
    "content_id", "recipe_id", "resolution", "level", "vmaf"};
inline constexpr std::string_view kRatingsHeader[] = {
    "content_id", "recipe_id", "observer_id", "score"};
inline constexpr std::string_view kTruthHeader[] = {
    "content_id", "anchor_recipe_id", "direction", "jnd_recipe_id", "order"};

// Reads vmaf_scores.csv and, when given, dcr_ratings.csv and jnd_truth.csv.
// Throws InputError naming file, line and column on any violation.
Corpus LoadCorpus(const std::filesystem::path& vmaf_table,
                  const std::optional<std::filesystem::path>& ratings_table,
                  const std::optional<std::filesystem::path>& truth_table,
                  LoadStats* stats = nullptr);

// Scores for one stimulus ordered by observer_id. Throws InputError when the
// stimulus is unknown or has no ratings.
std::vector<int> RatingsVector(const Corpus& corpus,
                               std::string_view content_id,
                               std::string_view recipe_id);

void WriteVmafCsv(const Corpus& corpus, std::ostream& out);
void WriteRatingsCsv(const Corpus& corpus, std::ostream& out);
void WriteTruthCsv(const Corpus& corpus, std::ostream& out);

// All three tables concatenated; equal corpora give equal strings.
std::string SerializeCorpus(const Corpus& corpus);

}  // namespace jndmap

#endif  // JNDMAP_CORPUS_H_
