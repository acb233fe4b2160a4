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

#include "jndmap/codist_fit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "jndmap/csv.h"
#include "jndmap/error.h"
#include "jndmap/format.h"

namespace jndmap {
namespace {

constexpr int kPenaltyGridPoints = 101;
constexpr int kMaxFunctionEvaluations = 4000;

double Logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double ModelValue(Family family, const double* b, double d) {
  switch (family) {
    case Family::kLogistic5:
      return b[0] * (0.5 - Logistic(-b[1] * (d - b[2]))) + b[3] * d + b[4];
    case Family::kCubic4:
      return b[0] + d * (b[1] + d * (b[2] + d * b[3]));
    case Family::kLogistic2:
      return Logistic(b[0] * (d - b[1]));
    case Family::kGlm:
      return Logistic(b[0] + b[1] * d);
  }
  return 0.0;
}

// Partial derivatives of the model with respect to each parameter.
void ModelGradient(Family family, const double* b, double d, double* g) {
  switch (family) {
    case Family::kLogistic5: {
      // s = 1 / (1 + exp(b2 (d - b3)))
      const double s = Logistic(-b[1] * (d - b[2]));
      const double ss = s * (1.0 - s);
      g[0] = 0.5 - s;
      g[1] = b[0] * ss * (d - b[2]);
      g[2] = -b[0] * ss * b[1];
      g[3] = d;
      g[4] = 1.0;
      return;
    }
    case Family::kCubic4:
      g[0] = 1.0;
      g[1] = d;
      g[2] = d * d;
      g[3] = d * d * d;
      return;
    case Family::kLogistic2: {
      const double p = Logistic(b[0] * (d - b[1]));
      const double pp = p * (1.0 - p);
      g[0] = pp * (d - b[1]);
      g[1] = -pp * b[0];
      return;
    }
    case Family::kGlm: {
      const double p = Logistic(b[0] + b[1] * d);
      const double pp = p * (1.0 - p);
      g[0] = pp;
      g[1] = pp * d;
      return;
    }
  }
}

double ModelSlope(Family family, const double* b, double d) {
  switch (family) {
    case Family::kLogistic5: {
      const double s = Logistic(-b[1] * (d - b[2]));
      return b[0] * b[1] * s * (1.0 - s) + b[3];
    }
    case Family::kCubic4:
      return b[1] + d * (2.0 * b[2] + 3.0 * d * b[3]);
    case Family::kLogistic2: {
      const double p = Logistic(b[0] * (d - b[1]));
      return b[0] * p * (1.0 - p);
    }
    case Family::kGlm: {
      const double p = Logistic(b[0] + b[1] * d);
      return b[1] * p * (1.0 - p);
    }
  }
  return 0.0;
}

// Support-weighted least squares on P_SD points, optionally augmented with
// hinge rows sqrt(lambda) * max(0, -slope(x_g)) on a grid over the domain.
struct PenalizedLsq : Eigen::DenseFunctor<double> {
  PenalizedLsq(Family family, std::span<const PsdPoint> points,
               std::vector<double> grid, double lambda)
      : Eigen::DenseFunctor<double>(
            ParameterCount(family),
            static_cast<int>(points.size() + (lambda > 0 ? grid.size() : 0))),
        family(family),
        points(points),
        grid(std::move(grid)),
        sqrt_lambda(std::sqrt(lambda)) {}

  int operator()(const InputType& x, ValueType& f) const {
    const double* b = x.data();
    std::size_t row = 0;
    for (const PsdPoint& p : points) {
      f[row++] = std::sqrt(static_cast<double>(p.support)) *
                 (ModelValue(family, b, p.delta_obj) - p.p_sd);
    }
    if (sqrt_lambda > 0.0) {
      for (double xg : grid) {
        f[row++] = sqrt_lambda * std::max(0.0, -ModelSlope(family, b, xg));
      }
    }
    return 0;
  }

  int df(const InputType& x, JacobianType& jac) const {
    const int n = ParameterCount(family);
    std::vector<double> g(n);
    std::size_t row = 0;
    for (const PsdPoint& p : points) {
      ModelGradient(family, x.data(), p.delta_obj, g.data());
      const double w = std::sqrt(static_cast<double>(p.support));
      for (int j = 0; j < n; ++j) jac(row, j) = w * g[j];
      ++row;
    }
    if (sqrt_lambda > 0.0) {
      // Central differences of the slope; the hinge is inactive (zero row)
      // where the slope is non-negative.
      InputType xp = x;
      for (double xg : grid) {
        const double slope = ModelSlope(family, x.data(), xg);
        for (int j = 0; j < n; ++j) {
          if (slope >= 0.0) {
            jac(row, j) = 0.0;
            continue;
          }
          const double h = 1e-6 * std::max(1.0, std::fabs(x[j]));
          xp[j] = x[j] + h;
          const double up = ModelSlope(family, xp.data(), xg);
          xp[j] = x[j] - h;
          const double down = ModelSlope(family, xp.data(), xg);
          xp[j] = x[j];
          jac(row, j) = -sqrt_lambda * (up - down) / (2.0 * h);
        }
        ++row;
      }
    }
    return 0;
  }

  Family family;
  std::span<const PsdPoint> points;
  std::vector<double> grid;
  double sqrt_lambda;
};

std::vector<std::vector<double>> MultiStarts(Family family,
                                             std::span<const PsdPoint> points) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  for (const PsdPoint& p : points) {
    x_lo = std::min(x_lo, p.delta_obj);
    x_hi = std::max(x_hi, p.delta_obj);
  }
  const double span = std::max(x_hi - x_lo, 1e-6);
  std::vector<std::vector<double>> starts;
  for (double slope_scale : {4.0, 12.0}) {
    const double slope = slope_scale / span;
    for (int j = 0; j < 4; ++j) {
      const double mid = x_lo + span * (j + 0.5) / 4.0;
      if (family == Family::kLogistic2) {
        starts.push_back({slope, mid});
      } else {
        starts.push_back({1.0, slope, mid, 0.0, 0.5});
      }
    }
  }
  return starts;
}

// Weighted linear least squares for the cubic; the only start it needs.
std::vector<double> CubicStart(std::span<const PsdPoint> points) {
  Eigen::MatrixXd a(points.size(), 4);
  Eigen::VectorXd y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = std::sqrt(static_cast<double>(points[i].support));
    const double d = points[i].delta_obj;
    a(i, 0) = w;
    a(i, 1) = w * d;
    a(i, 2) = w * d * d;
    a(i, 3) = w * d * d * d;
    y[i] = w * points[i].p_sd;
  }
  const Eigen::VectorXd b = a.colPivHouseholderQr().solve(y);
  return {b[0], b[1], b[2], b[3]};
}

std::vector<double> Grid(double lo, double hi, int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  return grid;
}

struct LsqSolution {
  std::vector<double> params;
  double objective = std::numeric_limits<double>::infinity();
  int seed_index = -1;
  int iterations = 0;
};

LsqSolution SolveLsq(Family family, std::span<const PsdPoint> points,
                     double lo, double hi, double lambda) {
  const std::vector<std::vector<double>> starts =
      family == Family::kCubic4 ? std::vector<std::vector<double>>{CubicStart(points)}
                                : MultiStarts(family, points);
  PenalizedLsq functor(family, points, Grid(lo, hi, kPenaltyGridPoints), lambda);
  LsqSolution best;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
        starts[s].data(), static_cast<Eigen::Index>(starts[s].size()));
    Eigen::LevenbergMarquardt<PenalizedLsq> lm(functor);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setMaxfev(kMaxFunctionEvaluations);
    lm.minimize(x);
    if (!x.allFinite()) continue;
    Eigen::VectorXd f(functor.values());
    functor(x, f);
    const double objective = f.squaredNorm();
    if (!std::isfinite(objective)) continue;
    // Strict comparison: ties keep the lowest seed index.
    if (objective < best.objective) {
      best.params.assign(x.data(), x.data() + x.size());
      best.objective = objective;
      best.seed_index = static_cast<int>(s);
      best.iterations = static_cast<int>(lm.iterations());
    }
  }
  if (best.seed_index < 0) {
    throw FitError(std::string(FamilyName(family)) +
                   " fit diverged from every start");
  }
  if (family == Family::kLogistic5 && best.params[1] < 0.0) {
    // (b1, b2) and (-b1, -b2) describe the same curve.
    best.params[0] = -best.params[0];
    best.params[1] = -best.params[1];
  }
  return best;
}

double WeightedSse(Family family, const std::vector<double>& params,
                   std::span<const PsdPoint> points) {
  double sse = 0.0;
  for (const PsdPoint& p : points) {
    const double r = ModelValue(family, params.data(), p.delta_obj) - p.p_sd;
    sse += static_cast<double>(p.support) * r * r;
  }
  return sse;
}

MappingFunction FitLeastSquares(std::span<const PsdPoint> points, Family family,
                                double lo, double hi,
                                const FitOptions& options) {
  MappingFunction mf;
  mf.family = family;
  mf.domain_lo = lo;
  mf.domain_hi = hi;
  double lambda = 0.0;
  for (int attempt = 0; attempt <= options.penalty_retries; ++attempt) {
    if (attempt > 0) lambda = options.penalty_lambda * std::ldexp(1.0, attempt - 1);
    const LsqSolution sol = SolveLsq(family, points, lo, hi, lambda);
    mf.params = sol.params;
    mf.report.seed_index = sol.seed_index;
    mf.report.iterations = sol.iterations;
    mf.report.penalty_lambda = lambda;
    mf.report.residual_norm = std::sqrt(WeightedSse(family, sol.params, points));
    mf.report.monotone = IsMonotoneOnGrid(mf);
    if (mf.report.monotone) break;
  }
  mf.report.valid = mf.report.monotone;
  if (!mf.report.valid) {
    mf.report.note = "non-monotone after " +
                     std::to_string(options.penalty_retries) +
                     " penalty retries; rejected";
  }
  return mf;
}

struct BinomialObs {
  double x;
  double y;  // proportion of successes in [0, 1]
  double w;  // number of trials
};

double Deviance(const std::vector<BinomialObs>& obs, double b0, double b1) {
  double dev = 0.0;
  for (const BinomialObs& o : obs) {
    const double mu = Logistic(b0 + b1 * o.x);
    auto term = [](double y, double m) {
      return y > 0.0 ? y * std::log(y / std::max(m, 1e-300)) : 0.0;
    };
    dev += 2.0 * o.w * (term(o.y, mu) + term(1.0 - o.y, 1.0 - mu));
  }
  return dev;
}

Eigen::Vector2d LogLikGradient(const std::vector<BinomialObs>& obs, double b0,
                               double b1) {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const BinomialObs& o : obs) {
    const double r = o.w * (o.y - Logistic(b0 + b1 * o.x));
    g[0] += r;
    g[1] += r * o.x;
  }
  return g;
}

double Logit(double p) { return std::log(p / (1.0 - p)); }

MappingFunction FitGlm(const std::vector<BinomialObs>& obs, double lo,
                       double hi, const FitOptions& options) {
  MappingFunction mf;
  mf.family = Family::kGlm;
  mf.domain_lo = lo;
  mf.domain_hi = hi;
  const double cap = options.glm_slope_cap;

  double total_w = 0.0;
  double total_y = 0.0;
  double x0_max = -HUGE_VAL, x0_min = HUGE_VAL;  // observations with failures
  double x1_max = -HUGE_VAL, x1_min = HUGE_VAL;  // observations with successes
  double x_min = HUGE_VAL, x_max = -HUGE_VAL;
  for (const BinomialObs& o : obs) {
    total_w += o.w;
    total_y += o.w * o.y;
    x_min = std::min(x_min, o.x);
    x_max = std::max(x_max, o.x);
    if (o.y < 1.0) {
      x0_max = std::max(x0_max, o.x);
      x0_min = std::min(x0_min, o.x);
    }
    if (o.y > 0.0) {
      x1_max = std::max(x1_max, o.x);
      x1_min = std::min(x1_min, o.x);
    }
  }
  const double mean_y = total_y / total_w;
  auto finish = [&](double b0, double b1) {
    mf.params = {b0, b1};
    mf.report.residual_norm = std::sqrt(Deviance(obs, b0, b1));
    mf.report.gradient_norm = 2.0 * LogLikGradient(obs, b0, b1).norm();
    mf.report.monotone = IsMonotoneOnGrid(mf);
    mf.report.valid = mf.report.monotone;
    return mf;
  };

  if (x1_min == HUGE_VAL || x0_min == HUGE_VAL) {
    mf.report.constant_labels = true;
    mf.report.separation = true;
    mf.report.note = "all observations share one label; flat curve";
    return finish(x1_min == HUGE_VAL ? -cap : cap, 0.0);
  }
  if (x_min == x_max) {
    mf.report.note = "single delta value; slope not identifiable";
    return finish(Logit(mean_y), 0.0);
  }
  if (x0_max <= x1_min) {
    // Increasing separation: the likelihood keeps growing with the slope.
    mf.report.separation = true;
    mf.report.slope_capped = true;
    mf.report.note = "perfect separation at delta " +
                     FormatNumber(0.5 * (x0_max + x1_min)) + "; slope capped";
    const double mid = 0.5 * (x0_max + x1_min);
    return finish(-cap * mid, cap);
  }
  if (x1_max <= x0_min) {
    // Decreasing separation; the monotone optimum is the flat model.
    mf.report.separation = true;
    mf.report.note = "decreasing separation; slope constrained to 0";
    return finish(Logit(mean_y), 0.0);
  }

  // Newton-Raphson / IRLS with step halving.
  double b0 = Logit(std::clamp(mean_y, 1e-6, 1.0 - 1e-6));
  double b1 = 0.0;
  double dev = Deviance(obs, b0, b1);
  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= options.max_irls_iterations; ++iter) {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (const BinomialObs& o : obs) {
      const double mu = Logistic(b0 + b1 * o.x);
      const double v = o.w * mu * (1.0 - mu);
      h(0, 0) += v;
      h(0, 1) += v * o.x;
      h(1, 1) += v * o.x * o.x;
    }
    h(1, 0) = h(0, 1);
    const Eigen::Vector2d g = LogLikGradient(obs, b0, b1);
    const Eigen::Vector2d step = h.ldlt().solve(g);
    if (!step.allFinite()) break;
    double t = 1.0;
    double nb0 = b0 + step[0];
    double nb1 = b1 + step[1];
    double ndev = Deviance(obs, nb0, nb1);
    for (int halving = 0; halving < 30 && !(ndev <= dev + 1e-12 * (1.0 + dev));
         ++halving) {
      t *= 0.5;
      nb0 = b0 + t * step[0];
      nb1 = b1 + t * step[1];
      ndev = Deviance(obs, nb0, nb1);
    }
    b0 = nb0;
    b1 = nb1;
    dev = ndev;
    const double grad = 2.0 * LogLikGradient(obs, b0, b1).norm();
    const double step_norm = t * step.norm();
    if (grad < 1e-10 || (step_norm < 1e-14 * (1.0 + std::hypot(b0, b1)) &&
                         grad < 1e-8)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw FitError("GLM IRLS did not converge after " +
                   std::to_string(options.max_irls_iterations) +
                   " iterations (slope " + FormatNumber(b1) +
                   "); data are close to separated in delta");
  }
  mf.report.iterations = iter;
  if (b1 < 0.0) {
    // The deviance is convex, so with b1 >= 0 imposed the optimum sits on
    // the boundary b1 = 0.
    mf.report.note = "unconstrained slope negative; constrained to 0";
    return finish(Logit(mean_y), 0.0);
  }
  if (b1 > cap) {
    const double mid = -b0 / b1;
    mf.report.slope_capped = true;
    mf.report.note = "slope capped";
    return finish(-cap * mid, cap);
  }
  return finish(b0, b1);
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kLogistic5:
      return "logistic5";
    case Family::kCubic4:
      return "cubic4";
    case Family::kLogistic2:
      return "logistic2";
    case Family::kGlm:
      return "glm";
  }
  return "glm";
}

std::string_view FamilyLabel(Family family) {
  switch (family) {
    case Family::kLogistic5:
      return "5-para";
    case Family::kCubic4:
      return "4-para";
    case Family::kLogistic2:
      return "2-para";
    case Family::kGlm:
      return "GLM";
  }
  return "GLM";
}

Family ParseFamily(std::string_view text) {
  for (Family f : kAllFamilies) {
    if (text == FamilyName(f)) return f;
  }
  throw InputError("unknown family '" + std::string(text) +
                   "' (expected logistic5|cubic4|logistic2|glm)");
}

int ParameterCount(Family family) {
  switch (family) {
    case Family::kLogistic5:
      return 5;
    case Family::kCubic4:
      return 4;
    case Family::kLogistic2:
    case Family::kGlm:
      return 2;
  }
  return 2;
}

std::string_view GlmModeName(GlmMode mode) {
  return mode == GlmMode::kPairwise ? "pairwise" : "points";
}

GlmMode ParseGlmMode(std::string_view text) {
  if (text == "pairwise") return GlmMode::kPairwise;
  if (text == "points") return GlmMode::kPoints;
  throw InputError("unknown glm_mode '" + std::string(text) +
                   "' (expected pairwise|points)");
}

CoDistribution BuildCoDistribution(const SubQualityRange& range,
                                   std::span<const RatedPair> pairs,
                                   double bin_width) {
  if (!std::isfinite(bin_width) || bin_width <= 0.0) {
    throw InputError("bin_width must be > 0");
  }
  if (range.pair_refs.empty()) {
    throw InputError("range " + range.Id() + " has no assigned pairs");
  }
  double max_delta = 0.0;
  for (std::size_t p : range.pair_refs) {
    max_delta = std::max(max_delta, pairs[p].delta_obj);
  }
  const std::size_t bins = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::ceil(max_delta) / bin_width)));
  CoDistribution cd;
  cd.range_id = range.Id();
  cd.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) cd.bin_edges[i] = i * bin_width;
  cd.f_dif.assign(bins, 0);
  cd.f_sim.assign(bins, 0);
  for (std::size_t p : range.pair_refs) {
    const std::size_t b = std::min(
        bins - 1, static_cast<std::size_t>(pairs[p].delta_obj / bin_width));
    ++(pairs[p].sig ? cd.f_dif : cd.f_sim)[b];
  }
  return cd;
}

std::vector<PsdPoint> PsdPoints(const CoDistribution& cd) {
  std::vector<PsdPoint> points;
  for (std::size_t b = 0; b < cd.f_dif.size(); ++b) {
    const std::int64_t support = cd.f_dif[b] + cd.f_sim[b];
    if (support == 0) continue;
    points.push_back(PsdPoint{
        0.5 * (cd.bin_edges[b] + cd.bin_edges[b + 1]),
        static_cast<double>(cd.f_dif[b]) / static_cast<double>(support),
        support});
  }
  return points;
}

double MappingFunction::Raw(double delta) const {
  return ModelValue(family, params.data(), delta);
}

double MappingFunction::Slope(double delta) const {
  return ModelSlope(family, params.data(), delta);
}

double MappingFunction::Evaluate(double delta, bool* clamped) const {
  const double d = std::clamp(delta, domain_lo, domain_hi);
  if (clamped != nullptr) *clamped = d != delta;
  const double v = Raw(d);
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

MappingFunction MakeMapping(Family family, std::vector<double> params,
                            double domain_lo, double domain_hi) {
  if (static_cast<int>(params.size()) != ParameterCount(family)) {
    throw InputError(std::string(FamilyName(family)) + " expects " +
                     std::to_string(ParameterCount(family)) + " parameters");
  }
  if (!(domain_hi > domain_lo)) throw InputError("empty mapping domain");
  MappingFunction mf;
  mf.family = family;
  mf.params = std::move(params);
  mf.domain_lo = domain_lo;
  mf.domain_hi = domain_hi;
  mf.report.monotone = IsMonotoneOnGrid(mf);
  mf.report.valid = mf.report.monotone;
  return mf;
}

bool IsMonotoneOnGrid(const MappingFunction& mf, int grid_points,
                      double tolerance) {
  double prev = mf.Evaluate(mf.domain_lo);
  for (int i = 1; i < grid_points; ++i) {
    const double x =
        mf.domain_lo + (mf.domain_hi - mf.domain_lo) * i / (grid_points - 1);
    const double v = mf.Evaluate(x);
    if (v < prev - tolerance) return false;
    prev = v;
  }
  return true;
}

MappingFunction FitMapping(std::span<const PsdPoint> points, Family family,
                           const FitOptions& options,
                           std::span<const RatedPair> glm_pairs) {
  const bool pairwise = family == Family::kGlm && !glm_pairs.empty();
  const std::size_t needed =
      static_cast<std::size_t>(std::max(4, ParameterCount(family)));
  if (!pairwise && points.size() < needed) {
    throw FitError(std::string(FamilyName(family)) + " needs at least " +
                   std::to_string(needed) + " points, got " +
                   std::to_string(points.size()));
  }
  if (pairwise && glm_pairs.size() < 4) {
    throw FitError("glm needs at least 4 pair observations, got " +
                   std::to_string(glm_pairs.size()));
  }
  double lo = 0.0;
  double hi = 0.0;
  if (options.domain.has_value()) {
    std::tie(lo, hi) = *options.domain;
  } else {
    double x_min = HUGE_VAL;
    double x_max = -HUGE_VAL;
    for (const PsdPoint& p : points) {
      x_min = std::min(x_min, p.delta_obj);
      x_max = std::max(x_max, p.delta_obj);
    }
    for (const RatedPair& p : glm_pairs) {
      x_min = std::min(x_min, p.delta_obj);
      x_max = std::max(x_max, p.delta_obj);
    }
    lo = std::min(0.0, x_min);
    hi = x_max;
  }
  if (!(hi > lo)) throw FitError("degenerate fitting domain");

  if (family != Family::kGlm) {
    return FitLeastSquares(points, family, lo, hi, options);
  }
  std::vector<BinomialObs> obs;
  if (pairwise) {
    obs.reserve(glm_pairs.size());
    for (const RatedPair& p : glm_pairs) {
      obs.push_back({p.delta_obj, p.sig ? 1.0 : 0.0, 1.0});
    }
  } else {
    for (const PsdPoint& p : points) {
      obs.push_back({p.delta_obj, p.p_sd, static_cast<double>(p.support)});
    }
  }
  return FitGlm(obs, lo, hi, options);
}

void WriteCodistHeader(std::ostream& out) {
  WriteCsvLine(out, {"range_id", "bin_lo", "bin_hi", "f_dif", "f_sim", "p_sd"});
}

void WriteCodistRows(const CoDistribution& cd, std::ostream& out) {
  for (std::size_t b = 0; b < cd.f_dif.size(); ++b) {
    const std::int64_t support = cd.f_dif[b] + cd.f_sim[b];
    WriteCsvLine(out, {cd.range_id, FormatNumber(cd.bin_edges[b]),
                       FormatNumber(cd.bin_edges[b + 1]),
                       std::to_string(cd.f_dif[b]), std::to_string(cd.f_sim[b]),
                       support > 0 ? FormatNumber(static_cast<double>(cd.f_dif[b]) /
                                                  static_cast<double>(support))
                                   : ""});
  }
}

void WriteCurveSamplesHeader(std::ostream& out) {
  WriteCsvLine(out, {"range_id", "family", "delta_obj", "p_sd"});
}

void WriteCurveSamples(std::string_view range_id, const MappingFunction& mf,
                       std::ostream& out, int samples) {
  for (int i = 0; i < samples; ++i) {
    const double x = mf.domain_lo +
                     (mf.domain_hi - mf.domain_lo) * i / std::max(samples - 1, 1);
    WriteCsvLine(out, {std::string(range_id), std::string(FamilyName(mf.family)),
                       FormatNumber(x), FormatNumber(mf.Evaluate(x))});
  }
}

nlohmann::ordered_json MappingToJson(const MappingFunction& mf) {
  const FitReport& r = mf.report;
  nlohmann::ordered_json json;
  json["params"] = mf.params;
  json["domain"] = {mf.domain_lo, mf.domain_hi};
  json["fit_report"] = {{"residual_norm", r.residual_norm},
                        {"monotone", r.monotone},
                        {"iterations", r.iterations},
                        {"valid", r.valid},
                        {"seed_index", r.seed_index},
                        {"penalty_lambda", r.penalty_lambda},
                        {"gradient_norm", r.gradient_norm},
                        {"separation", r.separation},
                        {"slope_capped", r.slope_capped},
                        {"constant_labels", r.constant_labels},
                        {"note", r.note}};
  return json;
}

MappingFunction MappingFromJson(Family family,
                                const nlohmann::ordered_json& json) {
  try {
    MappingFunction mf;
    mf.family = family;
    mf.params = json.at("params").get<std::vector<double>>();
    if (static_cast<int>(mf.params.size()) != ParameterCount(family)) {
      throw InputError(std::string(FamilyName(family)) + " expects " +
                       std::to_string(ParameterCount(family)) + " parameters");
    }
    const auto domain = json.at("domain").get<std::vector<double>>();
    if (domain.size() != 2) throw InputError("domain must have two entries");
    mf.domain_lo = domain[0];
    mf.domain_hi = domain[1];
    const auto& r = json.at("fit_report");
    mf.report.residual_norm = r.at("residual_norm").get<double>();
    mf.report.monotone = r.at("monotone").get<bool>();
    mf.report.iterations = r.at("iterations").get<int>();
    mf.report.valid = r.at("valid").get<bool>();
    mf.report.seed_index = r.value("seed_index", -1);
    mf.report.penalty_lambda = r.value("penalty_lambda", 0.0);
    mf.report.gradient_norm = r.value("gradient_norm", 0.0);
    mf.report.separation = r.value("separation", false);
    mf.report.slope_capped = r.value("slope_capped", false);
    mf.report.constant_labels = r.value("constant_labels", false);
    mf.report.note = r.value("note", "");
    return mf;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed mapping function: ") + e.what());
  }
}

}  // namespace jndmap
