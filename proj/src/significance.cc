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

#include "jndmap/significance.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/beta.hpp>

#include "jndmap/csv.h"
#include "jndmap/error.h"
#include "jndmap/format.h"
#include "jndmap/parallel.h"

namespace jndmap {
namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

Moments SampleMoments(std::span<const double> x) {
  Moments m;
  m.n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= m.n;
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= (m.n - 1.0);
  return m;
}

void RequireTwo(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InputError("t-test needs at least 2 values per sample (got " +
                     std::to_string(a.size()) + " and " +
                     std::to_string(b.size()) + ")");
  }
}

// Zero standard error: the statistic is undefined, the decision is not.
TTestResult Degenerate(double mean_diff, double df, double alpha) {
  TTestResult r;
  r.df = df;
  if (mean_diff == 0.0) {
    r.t = 0.0;
    r.p_value = 1.0;
  } else {
    r.t = mean_diff > 0 ? HUGE_VAL : -HUGE_VAL;
    r.p_value = 0.0;
  }
  r.significant = r.p_value < alpha;
  return r;
}

TTestResult Finish(double t, double df, double alpha) {
  TTestResult r;
  r.t = t;
  r.df = df;
  r.p_value = StudentTwoSidedPValue(t, df);
  r.significant = r.p_value < alpha;
  return r;
}

std::vector<double> ToReal(std::span<const int> x) {
  return std::vector<double>(x.begin(), x.end());
}

}  // namespace

std::string_view TTestKindName(TTestKind kind) {
  switch (kind) {
    case TTestKind::kWelch:
      return "welch";
    case TTestKind::kStudent:
      return "student";
    case TTestKind::kPaired:
      return "paired";
  }
  return "welch";
}

TTestKind ParseTTestKind(std::string_view text) {
  if (text == "welch") return TTestKind::kWelch;
  if (text == "student") return TTestKind::kStudent;
  if (text == "paired") return TTestKind::kPaired;
  throw InputError("unknown test '" + std::string(text) +
                   "' (expected welch|student|paired)");
}

double StudentTwoSidedPValue(double t, double df) {
  if (std::isnan(t) || !(df > 0.0)) return std::nan("");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return std::clamp(boost::math::ibeta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TTestResult WelchTTest(std::span<const double> a, std::span<const double> b,
                       double alpha) {
  RequireTwo(a, b);
  const Moments ma = SampleMoments(a);
  const Moments mb = SampleMoments(b);
  const double sa = ma.var / ma.n;
  const double sb = mb.var / mb.n;
  const double se2 = sa + sb;
  const double diff = ma.mean - mb.mean;
  if (se2 == 0.0) return Degenerate(diff, ma.n + mb.n - 2.0, alpha);
  const double df =
      se2 * se2 / (sa * sa / (ma.n - 1.0) + sb * sb / (mb.n - 1.0));
  return Finish(diff / std::sqrt(se2), df, alpha);
}

TTestResult WelchTTest(std::span<const int> a, std::span<const int> b,
                       double alpha) {
  const std::vector<double> ra = ToReal(a);
  const std::vector<double> rb = ToReal(b);
  return WelchTTest(std::span<const double>(ra), std::span<const double>(rb),
                    alpha);
}

TTestResult StudentTTest(std::span<const double> a, std::span<const double> b,
                         double alpha) {
  RequireTwo(a, b);
  const Moments ma = SampleMoments(a);
  const Moments mb = SampleMoments(b);
  const double df = ma.n + mb.n - 2.0;
  const double pooled = ((ma.n - 1.0) * ma.var + (mb.n - 1.0) * mb.var) / df;
  const double se2 = pooled * (1.0 / ma.n + 1.0 / mb.n);
  const double diff = ma.mean - mb.mean;
  if (se2 == 0.0) return Degenerate(diff, df, alpha);
  return Finish(diff / std::sqrt(se2), df, alpha);
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b,
                        double alpha) {
  if (a.size() != b.size()) {
    throw InputError("paired t-test needs equal-length samples");
  }
  if (a.size() < 2) {
    throw InputError("paired t-test needs at least 2 pairs");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const Moments m = SampleMoments(d);
  const double se2 = m.var / m.n;
  if (se2 == 0.0) return Degenerate(m.mean, m.n - 1.0, alpha);
  return Finish(m.mean / std::sqrt(se2), m.n - 1.0, alpha);
}

std::string RatedPair::Id() const {
  return content_id + ":" + recipe_x + ":" + recipe_y;
}

std::vector<std::pair<std::string, std::string>> FormPairs(
    const Corpus& corpus, std::string_view content_id) {
  std::span<const Stimulus> stimuli = corpus.StimuliOf(content_id);
  if (stimuli.empty()) {
    throw InputError("unknown content '" + std::string(content_id) + "'");
  }
  if (stimuli.size() < 2) {
    throw InputError("content '" + std::string(content_id) +
                     "' has fewer than 2 stimuli; no pairs can be formed");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(stimuli.size() * (stimuli.size() - 1) / 2);
  // Stimuli are sorted by recipe id, so (i, j > i) is already canonical.
  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    for (std::size_t j = i + 1; j < stimuli.size(); ++j) {
      pairs.emplace_back(stimuli[i].recipe.id, stimuli[j].recipe.id);
    }
  }
  return pairs;
}

std::vector<RatedPair> ClassifyPairs(const Corpus& corpus,
                                     const ClassifyOptions& options) {
  const std::vector<std::string> contents = corpus.ContentIds();
  std::vector<std::vector<RatedPair>> per_content(contents.size());

  ParallelFor(contents.size(), options.jobs, [&](std::size_t c) {
    const std::string& content = contents[c];
    for (const auto& [rx, ry] : FormPairs(corpus, content)) {
      RatedPair pair;
      pair.content_id = content;
      pair.recipe_x = rx;
      pair.recipe_y = ry;
      const Stimulus& sx = corpus.GetStimulus(content, rx);
      const Stimulus& sy = corpus.GetStimulus(content, ry);
      pair.delta_obj = std::fabs(sx.vmaf - sy.vmaf);
      try {
        TTestResult result;
        if (options.test == TTestKind::kPaired) {
          std::map<std::string_view, int> by_observer;
          for (const DcrRating& r : corpus.RatingsOf(content, rx)) {
            by_observer[r.observer_id] = r.score;
          }
          std::vector<double> a;
          std::vector<double> b;
          for (const DcrRating& r : corpus.RatingsOf(content, ry)) {
            auto it = by_observer.find(r.observer_id);
            if (it == by_observer.end()) continue;
            a.push_back(it->second);
            b.push_back(r.score);
          }
          result = PairedTTest(a, b, options.alpha);
        } else {
          const std::vector<int> ix = RatingsVector(corpus, content, rx);
          const std::vector<int> iy = RatingsVector(corpus, content, ry);
          const std::vector<double> a(ix.begin(), ix.end());
          const std::vector<double> b(iy.begin(), iy.end());
          result = options.test == TTestKind::kWelch
                       ? WelchTTest(a, b, options.alpha)
                       : StudentTTest(a, b, options.alpha);
        }
        pair.p_value = result.p_value;
        pair.sig = result.significant;
      } catch (const InputError& e) {
        throw InputError("pair " + pair.Id() + ": " + e.what());
      }
      per_content[c].push_back(std::move(pair));
    }
  });

  std::vector<RatedPair> out;
  for (auto& v : per_content) {
    std::move(v.begin(), v.end(), std::back_inserter(out));
  }
  return out;
}

void WritePairsCsv(std::span<const RatedPair> pairs, std::ostream& out) {
  WriteCsvLine(out, {"content_id", "recipe_x", "recipe_y", "delta_obj",
                     "p_value", "sig"});
  for (const RatedPair& p : pairs) {
    WriteCsvLine(out, {p.content_id, p.recipe_x, p.recipe_y,
                       FormatNumber(p.delta_obj), FormatNumber(p.p_value),
                       p.sig ? "1" : "0"});
  }
}

std::vector<RatedPair> ReadPairsCsv(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::Read(path, kPairsHeader);
  std::vector<RatedPair> pairs;
  for (const CsvRow& row : t.rows()) {
    RatedPair p;
    p.content_id = t.Text(row, 0);
    p.recipe_x = t.Text(row, 1);
    p.recipe_y = t.Text(row, 2);
    p.delta_obj = t.Real(row, 3);
    p.p_value = t.Real(row, 4);
    const std::int64_t sig = t.Integer(row, 5);
    if (sig != 0 && sig != 1) {
      throw InputError("sig must be 0 or 1", t.source(), row.line, "sig");
    }
    if (p.delta_obj < 0.0) {
      throw InputError("delta_obj must be >= 0", t.source(), row.line,
                       "delta_obj");
    }
    if (p.p_value < 0.0 || p.p_value > 1.0) {
      throw InputError("p_value outside [0,1]", t.source(), row.line, "p_value");
    }
    if (!(p.recipe_x < p.recipe_y)) {
      throw InputError("pair not in canonical order (recipe_x < recipe_y)",
                       t.source(), row.line);
    }
    p.sig = sig == 1;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace jndmap
