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

#include "detectbench/metrics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"

namespace detectbench {
namespace {

std::vector<ScoredSample> Make(std::vector<double> ai, std::vector<double> human) {
  std::vector<ScoredSample> out;
  for (double s : ai) out.push_back({s, Label::kAi});
  for (double s : human) out.push_back({s, Label::kHuman});
  return out;
}

TEST(BuildRocTest, PerfectlySeparatedVertices) {
  const auto curve = BuildRoc(Make({0.9, 0.8}, {0.2, 0.1}));
  const std::vector<std::pair<double, double>> expected = {
      {0, 0}, {0, 0.5}, {0, 1}, {0.5, 1}, {1, 1}};
  ASSERT_EQ(curve.points.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_DOUBLE_EQ(curve.points[i].fpr, expected[i].first) << i;
    EXPECT_DOUBLE_EQ(curve.points[i].tpr, expected[i].second) << i;
  }
  EXPECT_GT(curve.points[0].threshold, 0.9);
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    EXPECT_LT(curve.points[i].threshold, curve.points[i - 1].threshold);
  }
  EXPECT_EQ(curve.n_pos, 2);
  EXPECT_EQ(curve.n_neg, 2);
}

TEST(BuildRocTest, TiedPairIsOneDiagonal) {
  const auto curve = BuildRoc(Make({0.3}, {0.3}));
  ASSERT_EQ(curve.points.size(), 2u);
  EXPECT_DOUBLE_EQ(curve.points[1].fpr, 1.0);
  EXPECT_DOUBLE_EQ(curve.points[1].tpr, 1.0);
  EXPECT_DOUBLE_EQ(Auroc(curve), 0.5);
}

TEST(BuildRocTest, Errors) {
  try {
    BuildRoc(Make({0.1, 0.2}, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyClass);
  }
  try {
    BuildRoc(Make({std::nan("")}, {0.2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteScore);
  }
  try {
    BuildRoc(Make({1.0}, {INFINITY}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteScore);
  }
}

TEST(AurocTest, Examples) {
  EXPECT_DOUBLE_EQ(Auroc(BuildRoc(Make({0.9, 0.8}, {0.2, 0.1}))), 1.0);
  const auto mixed = Make({0.9, 0.5}, {0.6, 0.1});
  EXPECT_DOUBLE_EQ(oracle::PairCountingAuroc(mixed), 0.75);
  EXPECT_DOUBLE_EQ(Auroc(BuildRoc(mixed)), 0.75);
}

TEST(AurocTest, ChanceLevelWhenLabelsIndependent) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> score(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<ScoredSample> samples;
  for (int i = 0; i < 20000; ++i) {
    samples.push_back({score(rng), coin(rng) ? Label::kAi : Label::kHuman});
  }
  EXPECT_NEAR(Auroc(BuildRoc(samples)), 0.5, 0.01);
}

TEST(AurocTest, MatchesPairCountingOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto samples = oracle::RandomSamples(rng);
    EXPECT_NEAR(Auroc(BuildRoc(samples)), oracle::PairCountingAuroc(samples), 1e-12);
  }
}

TEST(WeightedAurocTest, PerfectDetectorIsOne) {
  EXPECT_NEAR(WeightedAuroc(BuildRoc(Make({0.9}, {0.1}))), 1.0, 1e-15);
}

TEST(WeightedAurocTest, ChanceDiagonal) {
  const double k = kDefaultDecayK;
  const double closed =
      (1.0 - (1.0 + k) * std::exp(-k)) / (k * (1.0 - std::exp(-k)));
  const double quad =
      oracle::QuadratureWeightedTpr([](double t) { return t; }, k);
  EXPECT_NEAR(closed, quad, 1e-10);
  EXPECT_NEAR(quad, 0.07213, 1e-4);
  // A single tied pair gives the diagonal.
  EXPECT_NEAR(WeightedAuroc(BuildRoc(Make({0.5}, {0.5}))), quad, 1e-12);
}

TEST(WeightedAurocTest, StepAtFivePercent) {
  // 20 human samples: one scores above every ai sample, so TPR jumps to 1
  // at FPR = 0.05.
  std::vector<double> human(19, 0.0);
  human.push_back(2.0);
  const auto curve = BuildRoc(Make({1.0}, human));
  const double k = kDefaultDecayK;
  const double expected = (std::exp(-0.05 * k) - std::exp(-k)) /
                          (1.0 - std::exp(-k));
  // The step curve from the samples ramps linearly from (0,0) to (0.05,0)
  // then rises; its TPR is 0 up to 0.05 and 1 after.
  EXPECT_NEAR(WeightedAuroc(curve, k), expected, 1e-12);
  EXPECT_NEAR(WeightedAuroc(curve, k), 0.49999952, 1e-7);
}

TEST(WeightedAurocTest, InvalidDecay) {
  const auto curve = BuildRoc(Make({0.9}, {0.1}));
  for (double k : {0.0, -1.0, std::nan("")}) {
    try {
      WeightedAuroc(curve, k);
      FAIL() << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidDecay);
    }
  }
}

TEST(WeightedAurocTest, ApproachesAurocAsDecayVanishes) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto curve = BuildRoc(oracle::RandomSamples(rng));
    EXPECT_NEAR(WeightedAuroc(curve, 1e-6), Auroc(curve), 1e-4);
  }
}

TEST(WeightedAurocTest, ClosedFormMatchesQuadrature) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> kdist(0.05, 40.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto curve = BuildRoc(oracle::RandomSamples(rng, 20, 8));
    std::vector<std::pair<double, double>> vertices;
    std::vector<double> breaks;
    for (const auto& p : curve.points) {
      vertices.emplace_back(p.fpr, p.tpr);
      breaks.push_back(p.fpr);
    }
    const double k = trial == 0 ? kDefaultDecayK : kdist(rng);
    const double quad =
        oracle::QuadratureWeightedTpr(oracle::InterpolatedTpr(vertices), k, breaks);
    EXPECT_NEAR(WeightedAuroc(curve, k), quad, 1e-9) << "k=" << k;
  }
}

TEST(WeightedAurocTest, MonotoneInTpr) {
  // Raising every ai score can only move TPR(t) up.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto samples = oracle::RandomSamples(rng);
    const double before = WeightedAuroc(BuildRoc(samples));
    for (auto& s : samples) {
      if (s.label == Label::kAi) s.score += 0.25;
    }
    EXPECT_GE(WeightedAuroc(BuildRoc(samples)) + 1e-15, before);
  }
}

TEST(WeightedAurocTest, InvariantUnderMonotoneRescaling) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto samples = oracle::RandomSamples(rng);
    auto scaled = samples;
    for (auto& s : scaled) s.score = std::exp(3.0 * s.score) - 7.0;
    const auto a = BuildRoc(samples);
    const auto b = BuildRoc(scaled);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      EXPECT_EQ(a.points[i].fpr, b.points[i].fpr);
      EXPECT_EQ(a.points[i].tpr, b.points[i].tpr);
    }
    EXPECT_EQ(Auroc(a), Auroc(b));
    EXPECT_EQ(WeightedAuroc(a), WeightedAuroc(b));
  }
}

TEST(YoudenTest, Examples) {
  const auto perfect = YoudenOperatingPoint(BuildRoc(Make({0.9, 0.8}, {0.2, 0.1})));
  EXPECT_EQ(perfect.fpr_star, 0.0);
  EXPECT_EQ(perfect.tpr_star, 1.0);
  EXPECT_EQ(perfect.j_value, 1.0);

  const auto mixed = Make({0.9, 0.5}, {0.6, 0.1});
  EXPECT_DOUBLE_EQ(oracle::MaxYoudenJ(mixed), 0.5);
  const auto op = YoudenOperatingPoint(BuildRoc(mixed));
  EXPECT_EQ(op.j_value, 0.5);
  EXPECT_EQ(op.fpr_star, 0.0);
  EXPECT_EQ(op.tpr_star, 0.5);
  EXPECT_EQ(op.threshold, 0.9);

  const auto flat = YoudenOperatingPoint(BuildRoc(Make({0.4, 0.4}, {0.4})));
  EXPECT_EQ(flat.j_value, 0.0);
  EXPECT_EQ(flat.fpr_star, 0.0);
  EXPECT_EQ(flat.tpr_star, 0.0);
  EXPECT_GT(flat.threshold, 0.4);
}

TEST(YoudenTest, MatchesExhaustiveSweep) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const auto samples = oracle::RandomSamples(rng);
    const auto op = YoudenOperatingPoint(BuildRoc(samples));
    EXPECT_NEAR(op.j_value, oracle::MaxYoudenJ(samples), 1e-12);
    // Tie-break: no sweep point with the same J has a lower FPR.
    for (const auto& p : oracle::ThresholdSweep(samples)) {
      if (std::abs((p.tpr - p.fpr) - op.j_value) < 1e-12) {
        EXPECT_GE(p.fpr, op.fpr_star);
      }
    }
  }
}

TEST(SfdTest, Examples) {
  const std::vector<double> flat = {0.1, 0.1, 0.1};
  auto s = Sfd(flat);
  EXPECT_NEAR(s.sigma_fpr, 0.0, 1e-17);
  EXPECT_NEAR(s.sfd, 1.0, 1e-15);

  const std::vector<double> tenth = {0.0, 0.2};
  s = Sfd(tenth);
  EXPECT_DOUBLE_EQ(s.sigma_fpr, 0.1);
  EXPECT_NEAR(s.sfd, 0.5, 1e-15);

  const std::vector<double> fifth = {0.0, 0.4};
  s = Sfd(fifth);
  EXPECT_DOUBLE_EQ(s.sigma_fpr, 0.2);
  EXPECT_NEAR(s.sfd, 0.25, 1e-15);
}

TEST(SfdTest, Errors) {
  const std::vector<double> some = {0.1};
  EXPECT_THROW(Sfd(some, 0.0), Error);
  try {
    Sfd(std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyScenarios);
  }
}

TEST(SfdTest, StrictlyDecreasingInSpread) {
  double prev = 2.0;
  for (double spread = 0.0; spread <= 1.0; spread += 0.05) {
    const std::vector<double> v = {0.0, spread};
    const double sfd = Sfd(v).sfd;
    EXPECT_LT(sfd, prev);
    prev = sfd;
  }
}

TEST(UrssTest, Examples) {
  const std::vector<double> one = {1.0};
  EXPECT_DOUBLE_EQ(Urss(one, 1.0), 1.0);
  const std::vector<double> w = {0.699};
  EXPECT_NEAR(Urss(w, 0.470), 0.32853, 1e-12);
  const std::vector<double> seven = {0.7};
  EXPECT_EQ(Urss(seven, 0.0), 0.0);
  EXPECT_THROW(Urss(std::vector<double>{}, 1.0), Error);
}

TEST(UrssTest, BoundedByBothFactors) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> w(1 + trial % 5);
    double mean = 0.0;
    for (auto& x : w) {
      x = u(rng);
      mean += x;
    }
    mean /= static_cast<double>(w.size());
    const double sfd = trial % 10 == 0 ? 0.0 : u(rng);
    const double urss = Urss(w, sfd);
    EXPECT_GE(urss, 0.0);
    EXPECT_LE(urss, std::min(mean, sfd) + 1e-15);
    EXPECT_EQ(urss == 0.0, mean == 0.0 || sfd == 0.0);
  }
}

TEST(EvaluateTest, ReportInvariants) {
  std::mt19937_64 rng(41);
  std::map<std::string, std::vector<ScoredSample>> scenarios;
  for (int i = 0; i < 4; ++i) {
    scenarios["s" + std::to_string(i)] = oracle::RandomSamples(rng);
  }
  const MetricReport r = Evaluate(scenarios);
  double mean = 0.0;
  for (const auto& [k, m] : r.per_scenario) mean += m.w_auroc;
  mean /= 4.0;
  EXPECT_NEAR(r.urss, mean * r.sfd, 1e-12);
  EXPECT_NEAR(r.sfd, std::exp(-r.lambda * r.sigma_fpr), 1e-12);
  EXPECT_EQ(r.k, kDefaultDecayK);
  EXPECT_EQ(r.lambda, kDefaultLambda);
  EXPECT_THROW(Evaluate({}), Error);
}

TEST(DefaultsTest, CalibrationConstants) {
  EXPECT_NEAR(std::exp(-kDefaultDecayK * 0.05), 0.5, 1e-15);
  EXPECT_NEAR(std::exp(-kDefaultLambda * 0.1), 0.5, 1e-15);
}

}  // namespace
}  // namespace detectbench
