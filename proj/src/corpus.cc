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

#include "jndmap/corpus.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include "jndmap/csv.h"
#include "jndmap/error.h"
#include "jndmap/format.h"

namespace jndmap {
namespace {

// Locates row `index` of a table for error messages.
struct Locator {
  const std::string* file = nullptr;
  const std::vector<std::size_t>* lines = nullptr;

  InputError Fail(std::size_t index, const std::string& message,
                  std::string column = {}) const {
    if (file == nullptr) return InputError(message);
    std::size_t line = 0;
    if (lines != nullptr && index < lines->size()) line = (*lines)[index];
    return InputError(message, *file, line, std::move(column));
  }
};

// Sorts `items` by `key` and applies the same permutation to `lines`.
template <typename T, typename Key>
void SortWithLines(std::vector<T>& items, std::vector<std::size_t>& lines,
                   Key key) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return key(items[a]) < key(items[b]);
  });
  std::vector<T> sorted;
  sorted.reserve(items.size());
  std::vector<std::size_t> sorted_lines;
  for (std::size_t i : order) {
    sorted.push_back(std::move(items[i]));
    sorted_lines.push_back(i < lines.size() ? lines[i] : 0);
  }
  items = std::move(sorted);
  lines = std::move(sorted_lines);
}

}  // namespace

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kInc ? "inc" : "dec";
}

Direction ParseDirection(std::string_view text) {
  if (text == "inc") return Direction::kInc;
  if (text == "dec") return Direction::kDec;
  throw InputError("direction must be 'inc' or 'dec', got '" +
                   std::string(text) + "'");
}

Resolution Resolution::Parse(std::string_view text) {
  Resolution r;
  r.label_ = std::string(text);
  if (text == "540p") {
    r.kind_ = Kind::k540p;
  } else if (text == "720p") {
    r.kind_ = Kind::k720p;
  } else if (text == "1080p") {
    r.kind_ = Kind::k1080p;
  } else if (text == "2160p") {
    r.kind_ = Kind::k2160p;
  } else {
    r.kind_ = Kind::kOther;
  }
  return r;
}

Corpus Corpus::Create(std::vector<Stimulus> stimuli,
                      std::vector<DcrRating> ratings,
                      std::vector<JndTruth> truths, const SourceMap* source) {
  SourceMap lines;
  if (source != nullptr) lines = *source;
  const Locator at_vmaf{source ? &lines.vmaf_file : nullptr, &lines.vmaf_lines};
  const Locator at_rating{source ? &lines.ratings_file : nullptr,
                          &lines.rating_lines};
  const Locator at_truth{source ? &lines.truth_file : nullptr,
                         &lines.truth_lines};

  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    const Stimulus& s = stimuli[i];
    if (s.content_id.empty() || s.recipe.id.empty()) {
      throw at_vmaf.Fail(i, "empty content_id or recipe_id");
    }
    if (!std::isfinite(s.vmaf) || s.vmaf < 0.0 || s.vmaf > 100.0) {
      throw at_vmaf.Fail(i, "vmaf out of range [0,100]: " + FormatNumber(s.vmaf),
                         "vmaf");
    }
  }
  SortWithLines(stimuli, lines.vmaf_lines, [](const Stimulus& s) {
    return std::tie(s.content_id, s.recipe.id);
  });
  for (std::size_t i = 1; i < stimuli.size(); ++i) {
    if (stimuli[i].content_id == stimuli[i - 1].content_id &&
        stimuli[i].recipe.id == stimuli[i - 1].recipe.id) {
      throw at_vmaf.Fail(i, "duplicate stimulus (" + stimuli[i].content_id +
                                ", " + stimuli[i].recipe.id + ")");
    }
  }

  Corpus corpus;
  corpus.stimuli_ = std::move(stimuli);
  for (std::size_t i = 0; i < corpus.stimuli_.size(); ++i) {
    const Stimulus& s = corpus.stimuli_[i];
    corpus.stimulus_index_.emplace(std::make_pair(s.content_id, s.recipe.id), i);
  }

  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const DcrRating& r = ratings[i];
    if (r.score < 1 || r.score > 5) {
      throw at_rating.Fail(i, "score must be an integer in 1..5, got " +
                                  std::to_string(r.score),
                           "score");
    }
    if (r.observer_id.empty()) throw at_rating.Fail(i, "empty observer_id");
    if (corpus.FindStimulus(r.content_id, r.recipe_id) == nullptr) {
      throw at_rating.Fail(i, "rating references unknown stimulus (" +
                                  r.content_id + ", " + r.recipe_id + ")");
    }
  }
  SortWithLines(ratings, lines.rating_lines, [](const DcrRating& r) {
    return std::tie(r.content_id, r.recipe_id, r.observer_id);
  });
  for (std::size_t i = 1; i < ratings.size(); ++i) {
    const DcrRating& a = ratings[i - 1];
    const DcrRating& b = ratings[i];
    if (a.content_id == b.content_id && a.recipe_id == b.recipe_id &&
        a.observer_id == b.observer_id) {
      throw at_rating.Fail(i, "duplicate rating (" + b.content_id + ", " +
                                  b.recipe_id + ", " + b.observer_id + ")");
    }
  }
  corpus.ratings_ = std::move(ratings);

  for (std::size_t i = 0; i < truths.size(); ++i) {
    const JndTruth& t = truths[i];
    const Stimulus* anchor = corpus.FindStimulus(t.content_id, t.anchor_recipe_id);
    const Stimulus* jnd = corpus.FindStimulus(t.content_id, t.jnd_recipe_id);
    if (anchor == nullptr) {
      throw at_truth.Fail(i, "unknown anchor stimulus (" + t.content_id + ", " +
                                 t.anchor_recipe_id + ")",
                          "anchor_recipe_id");
    }
    if (jnd == nullptr) {
      throw at_truth.Fail(i, "unknown JND stimulus (" + t.content_id + ", " +
                                 t.jnd_recipe_id + ")",
                          "jnd_recipe_id");
    }
    if (t.order < 1) throw at_truth.Fail(i, "order must be >= 1", "order");
    if (t.direction == Direction::kDec && jnd->vmaf > anchor->vmaf) {
      throw at_truth.Fail(i, "dec JND has higher vmaf than its anchor");
    }
    if (t.direction == Direction::kInc && jnd->vmaf < anchor->vmaf) {
      throw at_truth.Fail(i, "inc JND has lower vmaf than its anchor");
    }
  }
  SortWithLines(truths, lines.truth_lines, [](const JndTruth& t) {
    return std::tie(t.content_id, t.direction, t.order, t.anchor_recipe_id,
                    t.jnd_recipe_id);
  });
  for (std::size_t i = 1; i < truths.size(); ++i) {
    if (truths[i] == truths[i - 1]) {
      throw at_truth.Fail(i, "duplicate truth record");
    }
  }
  corpus.truths_ = std::move(truths);
  corpus.BuildIndex();
  return corpus;
}

void Corpus::BuildIndex() {
  rating_spans_.assign(stimuli_.size(), {0, 0});
  std::size_t r = 0;
  for (std::size_t s = 0; s < stimuli_.size(); ++s) {
    // Both tables are sorted by (content, recipe).
    while (r < ratings_.size() &&
           std::tie(ratings_[r].content_id, ratings_[r].recipe_id) <
               std::tie(stimuli_[s].content_id, stimuli_[s].recipe.id)) {
      ++r;
    }
    const std::size_t begin = r;
    while (r < ratings_.size() &&
           ratings_[r].content_id == stimuli_[s].content_id &&
           ratings_[r].recipe_id == stimuli_[s].recipe.id) {
      ++r;
    }
    rating_spans_[s] = {begin, r};
  }
}

const Stimulus* Corpus::FindStimulus(std::string_view content_id,
                                     std::string_view recipe_id) const {
  auto it = stimulus_index_.find(
      std::make_pair(std::string(content_id), std::string(recipe_id)));
  return it == stimulus_index_.end() ? nullptr : &stimuli_[it->second];
}

const Stimulus& Corpus::GetStimulus(std::string_view content_id,
                                    std::string_view recipe_id) const {
  const Stimulus* s = FindStimulus(content_id, recipe_id);
  if (s == nullptr) {
    throw InputError("unknown stimulus (" + std::string(content_id) + ", " +
                     std::string(recipe_id) + ")");
  }
  return *s;
}

std::vector<std::string> Corpus::ContentIds() const {
  std::vector<std::string> ids;
  for (const Stimulus& s : stimuli_) {
    if (ids.empty() || ids.back() != s.content_id) ids.push_back(s.content_id);
  }
  return ids;
}

std::span<const Stimulus> Corpus::StimuliOf(std::string_view content_id) const {
  auto lo = std::lower_bound(
      stimuli_.begin(), stimuli_.end(), content_id,
      [](const Stimulus& s, std::string_view id) { return s.content_id < id; });
  auto hi = std::upper_bound(
      lo, stimuli_.end(), content_id,
      [](std::string_view id, const Stimulus& s) { return id < s.content_id; });
  return {lo, hi};
}

std::span<const DcrRating> Corpus::RatingsOf(std::string_view content_id,
                                             std::string_view recipe_id) const {
  const Stimulus* s = FindStimulus(content_id, recipe_id);
  if (s == nullptr) return {};
  const auto [begin, end] =
      rating_spans_[static_cast<std::size_t>(s - stimuli_.data())];
  return std::span<const DcrRating>(ratings_).subspan(begin, end - begin);
}

std::set<std::string> Corpus::Observers() const {
  std::set<std::string> out;
  for (const DcrRating& r : ratings_) out.insert(r.observer_id);
  return out;
}

Corpus LoadCorpus(const std::filesystem::path& vmaf_table,
                  const std::optional<std::filesystem::path>& ratings_table,
                  const std::optional<std::filesystem::path>& truth_table,
                  LoadStats* stats) {
  SourceMap source;
  std::vector<Stimulus> stimuli;
  {
    const CsvTable t = CsvTable::Read(vmaf_table, kVmafHeader);
    source.vmaf_file = t.source();
    for (const CsvRow& row : t.rows()) {
      Stimulus s;
      s.content_id = t.Text(row, 0);
      s.recipe.id = t.Text(row, 1);
      s.recipe.resolution = Resolution::Parse(t.Text(row, 2));
      s.recipe.level = t.Integer(row, 3);
      s.vmaf = t.Real(row, 4);
      if (s.vmaf < 0.0 || s.vmaf > 100.0) {
        throw InputError("vmaf out of range [0,100]: " + t.Text(row, 4),
                         t.source(), row.line, "vmaf");
      }
      stimuli.push_back(std::move(s));
      source.vmaf_lines.push_back(row.line);
    }
  }
  std::vector<DcrRating> ratings;
  if (ratings_table.has_value()) {
    const CsvTable t = CsvTable::Read(*ratings_table, kRatingsHeader);
    source.ratings_file = t.source();
    for (const CsvRow& row : t.rows()) {
      DcrRating r;
      r.content_id = t.Text(row, 0);
      r.recipe_id = t.Text(row, 1);
      r.observer_id = t.Text(row, 2);
      const std::int64_t score = t.Integer(row, 3);
      if (score < 1 || score > 5) {
        throw InputError("score must be an integer in 1..5, got " +
                             t.Text(row, 3),
                         t.source(), row.line, "score");
      }
      r.score = static_cast<int>(score);
      ratings.push_back(std::move(r));
      source.rating_lines.push_back(row.line);
    }
  }
  std::vector<JndTruth> truths;
  if (truth_table.has_value()) {
    const CsvTable t = CsvTable::Read(*truth_table, kTruthHeader);
    source.truth_file = t.source();
    for (const CsvRow& row : t.rows()) {
      JndTruth truth;
      truth.content_id = t.Text(row, 0);
      truth.anchor_recipe_id = t.Text(row, 1);
      try {
        truth.direction = ParseDirection(t.Text(row, 2));
      } catch (const InputError& e) {
        throw InputError(e.reason(), t.source(), row.line, "direction");
      }
      truth.jnd_recipe_id = t.Text(row, 3);
      const std::int64_t order = t.Integer(row, 4);
      if (order < 1 || order > 1000) {
        throw InputError("order must be a positive integer", t.source(),
                         row.line, "order");
      }
      truth.order = static_cast<int>(order);
      truths.push_back(std::move(truth));
      source.truth_lines.push_back(row.line);
    }
  }
  if (stats != nullptr) {
    stats->stimuli = stimuli.size();
    stats->ratings = ratings.size();
    stats->truths = truths.size();
  }
  return Corpus::Create(std::move(stimuli), std::move(ratings),
                        std::move(truths), &source);
}

std::vector<int> RatingsVector(const Corpus& corpus,
                               std::string_view content_id,
                               std::string_view recipe_id) {
  corpus.GetStimulus(content_id, recipe_id);
  std::span<const DcrRating> ratings = corpus.RatingsOf(content_id, recipe_id);
  if (ratings.empty()) {
    throw InputError("no ratings for stimulus (" + std::string(content_id) +
                     ", " + std::string(recipe_id) + ")");
  }
  std::vector<int> scores;
  scores.reserve(ratings.size());
  for (const DcrRating& r : ratings) scores.push_back(r.score);
  return scores;
}

void WriteVmafCsv(const Corpus& corpus, std::ostream& out) {
  WriteCsvLine(out, {"content_id", "recipe_id", "resolution", "level", "vmaf"});
  for (const Stimulus& s : corpus.stimuli()) {
    WriteCsvLine(out, {s.content_id, s.recipe.id, s.recipe.resolution.label(),
                       std::to_string(s.recipe.level), FormatNumber(s.vmaf)});
  }
}

void WriteRatingsCsv(const Corpus& corpus, std::ostream& out) {
  WriteCsvLine(out, {"content_id", "recipe_id", "observer_id", "score"});
  for (const DcrRating& r : corpus.ratings()) {
    WriteCsvLine(out, {r.content_id, r.recipe_id, r.observer_id,
                       std::to_string(r.score)});
  }
}

void WriteTruthCsv(const Corpus& corpus, std::ostream& out) {
  WriteCsvLine(out, {"content_id", "anchor_recipe_id", "direction",
                     "jnd_recipe_id", "order"});
  for (const JndTruth& t : corpus.truths()) {
    WriteCsvLine(out, {t.content_id, t.anchor_recipe_id,
                       std::string(DirectionName(t.direction)), t.jnd_recipe_id,
                       std::to_string(t.order)});
  }
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::ostringstream out;
  WriteVmafCsv(corpus, out);
  WriteRatingsCsv(corpus, out);
  WriteTruthCsv(corpus, out);
  return out.str();
}

}  // namespace jndmap
