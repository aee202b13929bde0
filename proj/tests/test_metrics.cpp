// Copyright 2026 The soda-ood Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "soda/error.hpp"
#include "soda/metrics.hpp"

namespace soda::metrics {
namespace {

using testing::brute_auc;
using testing::brute_fpr;

constexpr OodLabel I = OodLabel::kId;
constexpr OodLabel O = OodLabel::kOod;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

struct Instance {
  std::vector<double> scores;
  std::vector<OodLabel> labels;
};

// Scores drawn from a small grid so ties are frequent.
Instance random_instance(synth::Xoshiro256& rng) {
  Instance in;
  const std::size_t n = 2 + rng.below(80);
  const std::uint64_t grid = 2 + rng.below(12);
  for (std::size_t i = 0; i < n; ++i) {
    in.labels.push_back(i == 0 ? I : (i == 1 ? O : (rng.uniform() < 0.6 ? I : O)));
    in.scores.push_back(static_cast<double>(rng.below(grid)) / static_cast<double>(grid) +
                        (rng.uniform() < 0.3 ? 0.0 : 0.001 * rng.uniform()));
  }
  return in;
}

TEST(Auc, HandExamples) {
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<OodLabel>{I, I, O, O}), 1.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.3, 0.5, 0.1}, std::vector<OodLabel>{I, I, O, O}), 0.75);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.4, 0.4, 0.4}, std::vector<OodLabel>{I, O, O}), 0.5);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.1, 0.9}, std::vector<OodLabel>{I, O}), 0.0);
}

TEST(Auc, Errors) {
  EXPECT_EQ(code_of([] { auc(std::vector<double>{1, 2}, std::vector<OodLabel>{I, I}); }),
            ErrorCode::kDegenerateLabels);
  EXPECT_EQ(code_of([] { auc(std::vector<double>{1}, std::vector<OodLabel>{I, O}); }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { auc(std::vector<double>{1, NAN}, std::vector<OodLabel>{I, O}); }),
            ErrorCode::kNonFiniteScore);
}

TEST(Auc, MatchesPairCounting) {
  synth::Xoshiro256 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    EXPECT_EQ(auc(in.scores, in.labels), brute_auc(in.scores, in.labels));
  }
}

TEST(Auc, InvariantUnderMonotoneMapsAndFlips) {
  synth::Xoshiro256 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_instance(rng);
    std::vector<double> mapped, affine, negated;
    for (double s : in.scores) {
      mapped.push_back(std::exp(s));
      affine.push_back(4.0 * s + 1.0);
      negated.push_back(-s);
    }
    const double a = auc(in.scores, in.labels);
    EXPECT_EQ(auc(mapped, in.labels), a);
    EXPECT_EQ(auc(affine, in.labels), a);
    EXPECT_NEAR(a + auc(negated, in.labels), 1.0, 1e-12);
  }
}

TEST(FprAtRecall, HandExamples) {
  std::vector<double> s(19, 0.9);
  s.push_back(0.1);
  std::vector<OodLabel> y(20, I);
  s.push_back(0.5);
  s.push_back(0.05);
  y.push_back(O);
  y.push_back(O);
  // 19 of 20 ID kept at tau = 0.9; neither OOD reaches it.
  EXPECT_DOUBLE_EQ(fpr_at_recall(s, y, 0.95), 0.0);
  // Full recall needs tau = 0.1, which admits the 0.5 OOD.
  EXPECT_DOUBLE_EQ(fpr_at_recall(s, y, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(fpr_at_recall(std::vector<double>{0.1, 0.2, 0.9}, std::vector<OodLabel>{I, I, O}, 0.95), 1.0);
}

TEST(FprAtRecall, ThresholdTiesCountAsAccepted) {
  EXPECT_DOUBLE_EQ(fpr_at_recall(std::vector<double>{0.5, 0.5, 0.4}, std::vector<OodLabel>{I, O, O}, 0.95), 0.5);
}

TEST(FprAtRecall, Errors) {
  const std::vector<double> s{0.1, 0.2};
  const std::vector<OodLabel> y{I, O};
  EXPECT_EQ(code_of([&] { fpr_at_recall(s, y, 0.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { fpr_at_recall(s, y, 1.5); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { fpr_at_recall(s, std::vector<OodLabel>{O, O}, 0.95); }), ErrorCode::kDegenerateLabels);
}

TEST(FprAtRecall, MatchesThresholdEnumeration) {
  synth::Xoshiro256 rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    for (double r : {0.5, 0.8, 0.95, 1.0}) {
      EXPECT_EQ(fpr_at_recall(in.scores, in.labels, r), brute_fpr(in.scores, in.labels, r));
    }
  }
}

TEST(FprAtRecall, NonIncreasingAsRecallDrops) {
  synth::Xoshiro256 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_instance(rng);
    double prev = 1.0;
    for (double r = 1.0; r > 0.01; r -= 0.05) {
      const double f = fpr_at_recall(in.scores, in.labels, r);
      EXPECT_LE(f, prev);
      prev = f;
    }
  }
}

TEST(Evaluate, Counts) {
  const auto r = evaluate(std::vector<double>{3, 2, 1}, std::vector<OodLabel>{I, I, O});
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_DOUBLE_EQ(r.fpr95, 0.0);
  EXPECT_EQ(r.n_id, 2U);
  EXPECT_EQ(r.n_ood, 1U);
}

TEST(BinnedAccuracy, EqualCountWithRemainderFirst) {
  const std::vector<std::uint32_t> pred{0, 1, 1, 0, 2, 2, 0};
  const std::vector<std::uint32_t> truth{0, 0, 1, 0, 2, 1, 1};
  const std::vector<double> d{0.7, 0.1, 0.3, 0.5, 0.9, 0.2, 0.4};
  // Sorted by d: idx 1(x) 5(x) 2(ok) 6(x) 3(ok) 0(ok) 4(ok).
  const auto bins = binned_accuracy(pred, truth, d, 3);
  ASSERT_EQ(bins.size(), 3U);
  EXPECT_EQ(bins[0].count, 3U);
  EXPECT_EQ(bins[1].count, 2U);
  EXPECT_EQ(bins[2].count, 2U);
  EXPECT_DOUBLE_EQ(bins[0].accuracy, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(bins[1].accuracy, 0.5);
  EXPECT_DOUBLE_EQ(bins[2].accuracy, 1.0);
  EXPECT_DOUBLE_EQ(bins[0].d_src_min, 0.1);
  EXPECT_DOUBLE_EQ(bins[0].d_src_max, 0.3);
  EXPECT_DOUBLE_EQ(bins[2].d_src_min, 0.7);
  EXPECT_DOUBLE_EQ(bins[2].d_src_max, 0.9);
}

TEST(BinnedAccuracy, SingleBinIsOverallAccuracy) {
  const std::vector<std::uint32_t> pred{0, 1, 2, 3};
  const std::vector<std::uint32_t> truth{0, 1, 0, 0};
  const std::vector<double> d{0.4, 0.3, 0.2, 0.1};
  const auto bins = binned_accuracy(pred, truth, d, 1);
  EXPECT_DOUBLE_EQ(bins[0].accuracy, 0.5);
  EXPECT_EQ(bins[0].count, 4U);
}

TEST(BinnedAccuracy, Errors) {
  const std::vector<std::uint32_t> p{0, 1};
  const std::vector<double> d{0.1, 0.2};
  EXPECT_EQ(code_of([&] { binned_accuracy(p, p, d, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { binned_accuracy(p, p, d, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { binned_accuracy(p, std::vector<std::uint32_t>{0}, d, 1); }), ErrorCode::kLengthMismatch);
}

}  // namespace
}  // namespace soda::metrics
