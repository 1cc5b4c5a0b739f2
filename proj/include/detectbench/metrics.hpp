//
// Copyright 2026 The detectbench Authors
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
//

// ROC construction and the detector-evaluation metrics built on it: AUROC,
// exponentially weighted AUROC (W-AUROC), Youden operating points, the
// FPR-stability score SFD and the combined URSS.
//
// Score orientation is fixed: a higher score means "more likely AI".

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "detectbench/error.hpp"

namespace detectbench {

enum class Label { kHuman, kAi };

struct ScoredSample {
  double score = 0.0;
  Label label = Label::kHuman;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
  // Raw counts at this vertex; fpr/tpr are derived from them.
  std::int64_t fp = 0;
  std::int64_t tp = 0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
};

struct OperatingPoint {
  double threshold = 0.0;
  double fpr_star = 0.0;
  double tpr_star = 0.0;
  double j_value = 0.0;
};

struct ScenarioMetrics {
  double auroc = 0.0;
  double w_auroc = 0.0;
  OperatingPoint operating_point;
};

struct MetricReport {
  std::map<std::string, ScenarioMetrics> per_scenario;
  double sigma_fpr = 0.0;
  double sfd = 1.0;
  double urss = 0.0;
  double k = 0.0;
  double lambda = 0.0;
};

struct SfdResult {
  double sigma_fpr = 0.0;
  double sfd = 1.0;
};

// exp(-k * 0.05) = 1/2: the weight halves at FPR = 5%.
inline constexpr double kDefaultDecayK = 20.0 * std::numbers::ln2;
// exp(-lambda * 0.1) = 1/2: stability halves at sigma_FPR = 0.1.
inline constexpr double kDefaultLambda = 10.0 * std::numbers::ln2;

// Vertices are emitted once per distinct score, walking thresholds from the
// top. The first vertex is (0,0) with a threshold just above the maximum
// score; the last is (1,1) at the minimum score. Samples sharing a score move
// the curve along one straight (possibly diagonal) segment.
inline RocCurve BuildRoc(std::span<const ScoredSample> samples) {
  RocCurve curve;
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) {
      throw Error(ErrorCode::kNonFiniteScore, "score is not finite");
    }
    (s.label == Label::kAi ? curve.n_pos : curve.n_neg) += 1;
  }
  if (curve.n_pos == 0 || curve.n_neg == 0) {
    throw Error(ErrorCode::kEmptyClass,
                curve.n_pos == 0 ? "no ai samples" : "no human samples");
  }

  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredSample& a, const ScoredSample& b) {
              return a.score > b.score;
            });

  const auto npos = static_cast<double>(curve.n_pos);
  const auto nneg = static_cast<double>(curve.n_neg);
  const double above_max = std::nextafter(
      sorted.front().score, std::numeric_limits<double>::infinity());
  curve.points.push_back({0.0, 0.0, above_max, 0, 0});

  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double threshold = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == threshold) {
      (sorted[i].label == Label::kAi ? tp : fp) += 1;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / nneg,
                            static_cast<double>(tp) / npos, threshold, fp, tp});
  }
  return curve;
}

// Trapezoidal area, accumulated in integer units so the result equals the
// Mann-Whitney pair statistic (ties counted one half) up to one rounding.
inline double Auroc(const RocCurve& curve) {
  std::int64_t twice_area = 0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    twice_area += (b.fp - a.fp) * (a.tp + b.tp);
  }
  return static_cast<double>(twice_area) /
         (2.0 * static_cast<double>(curve.n_pos) *
          static_cast<double>(curve.n_neg));
}

namespace internal {

// \int_0^1 e^{-c s} ds
inline double ExpMoment0(double c) {
  if (c == 0.0) return 1.0;
  return -std::expm1(-c) / c;
}

// \int_0^1 s e^{-c s} ds. The closed form cancels badly for small c, so a
// power series is used there.
inline double ExpMoment1(double c) {
  if (std::abs(c) < 1e-2) {
    double sum = 0.0;
    double term = 1.0;  // (-c)^n / n!
    for (int n = 0; n < 12; ++n) {
      sum += term / (n + 2);
      term *= -c / (n + 1);
    }
    return sum;
  }
  return (1.0 - (1.0 + c) * std::exp(-c)) / (c * c);
}

}  // namespace internal

// Expected TPR under p(t) = exp(-k t) / Z on t = FPR in [0,1], with TPR(t)
// linear between curve vertices. Each segment is integrated in closed form.
inline double WeightedAuroc(const RocCurve& curve,
                            double k = kDefaultDecayK) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorCode::kInvalidDecay, "k must be positive");
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    const double width = b.fpr - a.fpr;
    if (width <= 0.0) continue;  // vertical riser, zero measure
    const double c = k * width;
    integral += width * std::exp(-k * a.fpr) *
                (a.tpr * internal::ExpMoment0(c) +
                 (b.tpr - a.tpr) * internal::ExpMoment1(c));
  }
  const double z = internal::ExpMoment0(k);
  return integral / z;
}

// Vertex maximising J = TPR - FPR. Ties go to the lowest FPR, then the
// highest threshold. Comparisons use integer cross-products so exact ties are
// detected exactly.
inline OperatingPoint YoudenOperatingPoint(const RocCurve& curve) {
  const RocPoint* best = nullptr;
  // J scaled by n_pos * n_neg.
  std::int64_t best_j = 0;
  for (const auto& p : curve.points) {
    const std::int64_t j = p.tp * curve.n_neg - p.fp * curve.n_pos;
    if (best == nullptr || j > best_j ||
        (j == best_j &&
         (p.fp < best->fp ||
          (p.fp == best->fp && p.threshold > best->threshold)))) {
      best = &p;
      best_j = j;
    }
  }
  return {best->threshold, best->fpr, best->tpr, best->tpr - best->fpr};
}

// Population standard deviation of the per-scenario optimal FPRs, mapped
// through exp(-lambda * sigma).
inline SfdResult Sfd(std::span<const double> fpr_stars,
                     double lambda = kDefaultLambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidDecay, "lambda must be positive");
  }
  if (fpr_stars.empty()) {
    throw Error(ErrorCode::kEmptyScenarios, "no scenarios");
  }
  SfdResult out;
  const auto [lo, hi] = std::minmax_element(fpr_stars.begin(), fpr_stars.end());
  if (*lo == *hi) {
    // Identical observations: avoid a spurious spread from rounding the mean.
    out.sigma_fpr = 0.0;
    out.sfd = 1.0;
    return out;
  }
  const double m = static_cast<double>(fpr_stars.size());
  double mean = 0.0;
  for (double v : fpr_stars) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : fpr_stars) ss += (v - mean) * (v - mean);
  out.sigma_fpr = std::sqrt(ss / m);
  out.sfd = std::exp(-lambda * out.sigma_fpr);
  return out;
}

inline double Urss(std::span<const double> w_aurocs, double sfd) {
  if (w_aurocs.empty()) {
    throw Error(ErrorCode::kEmptyScenarios, "no scenarios");
  }
  double mean = 0.0;
  for (double v : w_aurocs) mean += v;
  mean /= static_cast<double>(w_aurocs.size());
  return mean * sfd;
}

// Full per-scenario evaluation. Each map entry is one scenario's samples.
inline MetricReport Evaluate(
    const std::map<std::string, std::vector<ScoredSample>>& scenarios,
    double k = kDefaultDecayK, double lambda = kDefaultLambda) {
  if (scenarios.empty()) {
    throw Error(ErrorCode::kEmptyScenarios, "no scenarios");
  }
  MetricReport report;
  report.k = k;
  report.lambda = lambda;
  std::vector<double> fprs;
  std::vector<double> waurocs;
  for (const auto& [key, samples] : scenarios) {
    const RocCurve curve = BuildRoc(samples);
    ScenarioMetrics m;
    m.auroc = Auroc(curve);
    m.w_auroc = WeightedAuroc(curve, k);
    m.operating_point = YoudenOperatingPoint(curve);
    fprs.push_back(m.operating_point.fpr_star);
    waurocs.push_back(m.w_auroc);
    report.per_scenario.emplace(key, m);
  }
  const SfdResult s = Sfd(fprs, lambda);
  report.sigma_fpr = s.sigma_fpr;
  report.sfd = s.sfd;
  report.urss = Urss(waurocs, s.sfd);
  return report;
}

}  // namespace detectbench
