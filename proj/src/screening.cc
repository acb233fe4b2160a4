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

#include "jndmap/screening.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "jndmap/error.h"

namespace jndmap {
namespace {

constexpr double kRejectRatio1 = 0.05;
constexpr double kRejectRatio2 = 0.3;

}  // namespace

std::string_view ScreeningMethodName(ScreeningMethod method) {
  switch (method) {
    case ScreeningMethod::kBt500:
      return "bt500";
    case ScreeningMethod::kVqegHdtv:
      return "vqeg_hdtv";
    case ScreeningMethod::kBt1788:
      return "bt1788";
    case ScreeningMethod::kNone:
      return "none";
  }
  return "bt500";
}

ScreeningMethod ParseScreeningMethod(std::string_view text) {
  if (text == "bt500") return ScreeningMethod::kBt500;
  if (text == "vqeg_hdtv") return ScreeningMethod::kVqegHdtv;
  if (text == "bt1788") return ScreeningMethod::kBt1788;
  if (text == "none") return ScreeningMethod::kNone;
  throw InputError("unknown screening method '" + std::string(text) + "'");
}

ScreeningReport ScreenBt500(const Corpus& corpus) {
  ScreeningReport report;
  report.method = ScreeningMethod::kBt500;
  for (const std::string& obs : corpus.Observers()) report.stats[obs] = {};

  for (const Stimulus& s : corpus.stimuli()) {
    std::span<const DcrRating> ratings =
        corpus.RatingsOf(s.content_id, s.recipe.id);
    if (ratings.empty()) continue;
    if (ratings.size() < 2) {
      throw InputError("stimulus (" + s.content_id + ", " + s.recipe.id +
                       ") has fewer than 2 ratings; cannot screen");
    }
    const double n = static_cast<double>(ratings.size());
    double mean = 0.0;
    for (const DcrRating& r : ratings) mean += r.score;
    mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (const DcrRating& r : ratings) {
      const double d = r.score - mean;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    const double sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m4 /= n;
    double width = 0.0;
    if (m2 > 0.0) {
      const double beta2 = m4 / (m2 * m2);
      width = (beta2 >= 2.0 && beta2 <= 4.0) ? 2.0 * sd : std::sqrt(20.0) * sd;
    }
    const double upper = mean + width;
    const double lower = mean - width;
    for (const DcrRating& r : ratings) {
      ObserverStats& st = report.stats[r.observer_id];
      ++st.judgments;
      if (r.score > upper) ++st.p_count;
      if (r.score < lower) ++st.q_count;
    }
  }

  for (auto& [obs, st] : report.stats) {
    const int pq = st.p_count + st.q_count;
    st.ratio1 = st.judgments > 0 ? static_cast<double>(pq) / st.judgments : 0.0;
    st.ratio2 =
        pq > 0 ? static_cast<double>(std::abs(st.p_count - st.q_count)) / pq
               : 0.0;
    if (pq > 0 && st.ratio1 > kRejectRatio1 && st.ratio2 < kRejectRatio2) {
      report.removed.insert(obs);
    }
  }
  return report;
}

ScreeningReport Screen(const Corpus& corpus, ScreeningMethod method) {
  if (method == ScreeningMethod::kBt500) return ScreenBt500(corpus);
  // TODO: implement the VQEG HDTV Annex I and BT.1788 procedures.
  ScreeningReport report;
  report.method = method;
  return report;
}

Corpus ApplyScreening(const Corpus& corpus, const ScreeningReport& report) {
  if (report.removed.empty()) return corpus;
  std::vector<DcrRating> kept;
  kept.reserve(corpus.ratings().size());
  for (const DcrRating& r : corpus.ratings()) {
    if (!report.removed.contains(r.observer_id)) kept.push_back(r);
  }
  return Corpus::Create(corpus.stimuli(), std::move(kept), corpus.truths());
}

nlohmann::ordered_json ScreeningReportToJson(const ScreeningReport& report) {
  nlohmann::ordered_json json;
  json["method"] = ScreeningMethodName(report.method);
  json["removed"] = nlohmann::ordered_json::array();
  for (const std::string& obs : report.removed) json["removed"].push_back(obs);
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  for (const auto& [obs, st] : report.stats) {
    stats[obs] = {{"p", st.p_count},
                  {"q", st.q_count},
                  {"n", st.judgments},
                  {"ratio1", st.ratio1},
                  {"ratio2", st.ratio2}};
  }
  json["stats"] = std::move(stats);
  return json;
}

ScreeningReport ScreeningReportFromJson(const nlohmann::ordered_json& json) {
  ScreeningReport report;
  try {
    report.method = ParseScreeningMethod(json.value("method", "bt500"));
    for (const auto& obs : json.at("removed")) {
      report.removed.insert(obs.get<std::string>());
    }
    if (json.contains("stats")) {
      for (const auto& [obs, st] : json.at("stats").items()) {
        ObserverStats s;
        s.p_count = st.at("p").get<int>();
        s.q_count = st.at("q").get<int>();
        s.judgments = st.at("n").get<int>();
        s.ratio1 = st.at("ratio1").get<double>();
        s.ratio2 = st.at("ratio2").get<double>();
        report.stats[obs] = s;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed screening report: ") + e.what());
  }
  return report;
}

}  // namespace jndmap
