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

#include "soda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <fmt/core.h>

#include "soda/error.hpp"

namespace soda::metrics {

namespace {

void check(std::span<const double> scores, std::span<const OodLabel> labels, std::size_t* n_id,
           std::size_t* n_ood) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, fmt::format("{} scores, {} labels", scores.size(), labels.size()));
  }
  *n_id = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), OodLabel::kId));
  *n_ood = labels.size() - *n_id;
  if (*n_id == 0 || *n_ood == 0) {
    throw Error(ErrorCode::kDegenerateLabels, fmt::format("n_id={} n_ood={}", *n_id, *n_ood));
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw Error(ErrorCode::kNonFiniteScore, fmt::format("score {}", i));
  }
}

}  // namespace

double auc(std::span<const double> scores, std::span<const OodLabel> labels) {
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  check(scores, labels, &n_id, &n_ood);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // A tie group occupying 1-based ranks a..b has mid-rank (a + b) / 2; keep
  // twice the rank sum so everything stays integral.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi + 1 < order.size() && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    const std::uint64_t twice_mid = (lo + 1) + (hi + 1);
    for (std::size_t k = lo; k <= hi; ++k) {
      if (labels[order[k]] == OodLabel::kId) twice_rank_sum += twice_mid;
    }
    lo = hi + 1;
  }
  // Mann-Whitney: U = R_id - n_id (n_id + 1) / 2.
  const std::uint64_t twice_u = twice_rank_sum - static_cast<std::uint64_t>(n_id) * (n_id + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_id) * static_cast<double>(n_ood));
}

double fpr_at_recall(std::span<const double> scores, std::span<const OodLabel> labels,
                     double recall) {
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  check(scores, labels, &n_id, &n_ood);
  if (!(recall > 0.0 && recall <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("recall must be in (0, 1], got {}", recall));
  }
  std::vector<double> id_scores;
  id_scores.reserve(n_id);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == OodLabel::kId) id_scores.push_back(scores[i]);
  }
  // 0.95 * 20 evaluates to 19.000000000000004 in binary; do not round that up.
  const double exact = recall * static_cast<double>(n_id);
  auto needed = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  needed = std::clamp<std::size_t>(needed, 1, n_id);
  const auto kth = id_scores.begin() + static_cast<std::ptrdiff_t>(needed - 1);
  std::nth_element(id_scores.begin(), kth, id_scores.end(), std::greater<>());
  const double tau = *kth;

  std::size_t false_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == OodLabel::kOod && scores[i] >= tau) ++false_pos;
  }
  return static_cast<double>(false_pos) / static_cast<double>(n_ood);
}

EvalResult evaluate(std::span<const double> scores, std::span<const OodLabel> labels) {
  EvalResult r;
  r.auc = auc(scores, labels);
  r.fpr95 = fpr_at_recall(scores, labels, 0.95);
  r.n_id = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), OodLabel::kId));
  r.n_ood = labels.size() - r.n_id;
  return r;
}

std::vector<AccuracyBin> binned_accuracy(std::span<const std::uint32_t> predictions,
                                         std::span<const std::uint32_t> true_classes,
                                         std::span<const double> d_src, std::size_t n_bins) {
  const std::size_t n = predictions.size();
  if (true_classes.size() != n || d_src.size() != n) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} predictions, {} classes, {} d_src", n, true_classes.size(), d_src.size()));
  }
  if (n_bins == 0 || n_bins > n) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("need 1 <= bins <= {}, got {}", n, n_bins));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d_src[a] < d_src[b]; });

  std::vector<AccuracyBin> bins(n_bins);
  const std::size_t base = n / n_bins;
  const std::size_t extra = n % n_bins;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t count = base + (b < extra ? 1 : 0);
    std::size_t correct = 0;
    for (std::size_t k = pos; k < pos + count; ++k) {
      correct += (predictions[order[k]] == true_classes[order[k]]) ? 1 : 0;
    }
    bins[b].count = count;
    bins[b].d_src_min = d_src[order[pos]];
    bins[b].d_src_max = d_src[order[pos + count - 1]];
    bins[b].accuracy = static_cast<double>(correct) / static_cast<double>(count);
    pos += count;
  }
  return bins;
}

}  // namespace soda::metrics
