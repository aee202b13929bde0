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

// Threshold-free OOD evaluation. ID samples are the positive class: a good
// detector scores them higher than OOD samples.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "soda/io.hpp"

namespace soda::metrics {

using io::OodLabel;

struct EvalResult {
  double auc = 0.0;
  double fpr95 = 0.0;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
};

/// P(score(ID) > score(OOD)) over all (ID, OOD) pairs, ties counting one
/// half. Computed from mid-ranks in integer arithmetic, so the result is the
/// exact pair-count ratio.
double auc(std::span<const double> scores, std::span<const OodLabel> labels);

/// Fraction of OOD samples scoring >= tau, where tau is the
/// ceil(recall * n_id)-th largest ID score.
double fpr_at_recall(std::span<const double> scores, std::span<const OodLabel> labels,
                     double recall);

EvalResult evaluate(std::span<const double> scores, std::span<const OodLabel> labels);

struct AccuracyBin {
  double d_src_min = 0.0;
  double d_src_max = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

/// Sorts samples by ascending d_src (ties by index) and cuts them into
/// `n_bins` equal-count bins, the first N % n_bins bins taking one extra
/// sample. Requires 1 <= n_bins <= N.
std::vector<AccuracyBin> binned_accuracy(std::span<const std::uint32_t> predictions,
                                         std::span<const std::uint32_t> true_classes,
                                         std::span<const double> d_src, std::size_t n_bins);

}  // namespace soda::metrics
