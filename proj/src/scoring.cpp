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

#include "soda/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fmt/core.h>

#include "soda/error.hpp"

namespace soda {

namespace {

void expect_same_dim(const EmbeddingMatrix& a, const EmbeddingMatrix& b, const char* what) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{}: test has d={}, other has d={}", what, a.cols(), b.cols()));
  }
}

std::size_t count_classes(std::span<const std::uint32_t> class_index) {
  std::uint32_t top = 0;
  for (const auto c : class_index) top = std::max(top, c);
  return class_index.empty() ? 0 : static_cast<std::size_t>(top) + 1;
}

/// max_c sims[i*C + c], ties to the lowest c.
ScoreVector row_max(const std::vector<double>& sims, std::size_t n, std::size_t c) {
  ScoreVector out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = sims.data() + i * c;
    out.values[i] = *std::max_element(row, row + c);
  }
  return out;
}

}  // namespace

EmbeddingMatrix class_means(const EmbeddingMatrix& unit_rows,
                            std::span<const std::uint32_t> class_index,
                            std::size_t num_classes) {
  if (class_index.size() != unit_rows.rows()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} class indices for {} rows", class_index.size(), unit_rows.rows()));
  }
  if (num_classes == 0) throw Error(ErrorCode::kEmptyClass, "no classes");
  const std::size_t d = unit_rows.cols();
  std::vector<double> sums(num_classes * d, 0.0);
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t r = 0; r < unit_rows.rows(); ++r) {
    const auto c = class_index[r];
    if (c >= num_classes) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("row {} has class {} >= {}", r, c, num_classes));
    }
    ++counts[c];
    const auto row = unit_rows.row(r);
    for (std::size_t k = 0; k < d; ++k) sums[c * d + k] += row[k];
  }
  EmbeddingMatrix means(num_classes, d);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) throw Error(ErrorCode::kEmptyClass, fmt::format("class {}", c));
    for (std::size_t k = 0; k < d; ++k) {
      means(c, k) = static_cast<float>(sums[c * d + k] / static_cast<double>(counts[c]));
    }
  }
  return means;
}

PrototypeSet build_prototypes(const PromptEmbeddingGroups& groups) {
  const std::size_t num_classes =
      std::max(groups.class_names.size(), count_classes(groups.class_index));
  const EmbeddingMatrix unit = normalize_rows(groups.embeddings);
  PrototypeSet set{class_means(unit, groups.class_index, num_classes), groups.class_names};
  for (std::size_t c = set.class_names.size(); c < num_classes; ++c) {
    set.class_names.push_back(fmt::format("class_{}", c));
  }
  return set;
}

std::vector<double> prototype_similarities(const EmbeddingMatrix& test,
                                           const EmbeddingMatrix& prototypes,
                                           unsigned threads) {
  expect_same_dim(test, prototypes, "prototypes");
  const std::size_t n = test.rows();
  const std::size_t c = prototypes.rows();
  std::vector<double> sims(n * c);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        sims[i * c + j] = cosine_sim(test.row(i), prototypes.row(j));
      }
    }
  });
  return sims;
}

ScoreVector text_score(const EmbeddingMatrix& test, const PrototypeSet& protos, unsigned threads) {
  const auto sims = prototype_similarities(test, protos.prototypes, threads);
  return row_max(sims, test.rows(), protos.num_classes());
}

ScoreVector mls_score(const EmbeddingMatrix& test, const PrototypeSet& protos, unsigned threads) {
  return text_score(test, protos, threads);
}

std::vector<std::uint32_t> classify(const EmbeddingMatrix& test, const PrototypeSet& protos,
                                    unsigned threads) {
  const auto sims = prototype_similarities(test, protos.prototypes, threads);
  const std::size_t c = protos.num_classes();
  std::vector<std::uint32_t> out(test.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* row = sims.data() + i * c;
    out[i] = static_cast<std::uint32_t>(std::max_element(row, row + c) - row);
  }
  return out;
}

ScoreVector msp_score(const EmbeddingMatrix& test, const PrototypeSet& protos, double temperature,
                      unsigned threads) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("temperature must be positive, got {}", temperature));
  }
  const auto sims = prototype_similarities(test, protos.prototypes, threads);
  const std::size_t c = protos.num_classes();
  ScoreVector out;
  out.values.resize(test.rows());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double* row = sims.data() + i * c;
    const double top = *std::max_element(row, row + c) / temperature;
    // max softmax probability = 1 / sum_j exp(l_j - l_max)
    double denom = 0.0;
    for (std::size_t j = 0; j < c; ++j) denom += std::exp(row[j] / temperature - top);
    out.values[i] = 1.0 / denom;
  }
  return out;
}

ScoreVector source_similarity(const EmbeddingMatrix& test, const EmbeddingMatrix& reference,
                              std::size_t k, unsigned threads) {
  expect_same_dim(test, reference, "reference");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (k > reference.rows()) {
    throw Error(ErrorCode::kKTooLarge, fmt::format("k={} but only {} reference rows", k, reference.rows()));
  }
  const EmbeddingMatrix unit_test = normalize_rows(test);
  const EmbeddingMatrix unit_ref = normalize_rows(reference);
  ScoreVector out;
  out.values.resize(test.rows());
  parallel_for(test.rows(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sims(unit_ref.rows());
    for (std::size_t i = begin; i < end; ++i) {
      const auto zi = unit_test.row(i);
      for (std::size_t r = 0; r < sims.size(); ++r) {
        sims[r] = std::clamp(dot(zi, unit_ref.row(r)), -1.0, 1.0);
      }
      std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), sims.end(),
                        std::greater<>());
      double sum = 0.0;
      for (std::size_t r = 0; r < k; ++r) sum += sims[r];
      out.values[i] = sum / static_cast<double>(k);
    }
  });
  return out;
}

ScoreVector cosine_proto_score(const EmbeddingMatrix& test, const EmbeddingMatrix& reference,
                               std::span<const std::uint32_t> ref_class_index, unsigned threads) {
  expect_same_dim(test, reference, "reference");
  const EmbeddingMatrix means =
      class_means(normalize_rows(reference), ref_class_index, count_classes(ref_class_index));
  const auto sims = prototype_similarities(test, means, threads);
  return row_max(sims, test.rows(), means.rows());
}

ScoreVector mahalanobis_score(const EmbeddingMatrix& test, const EmbeddingMatrix& reference,
                              std::span<const std::uint32_t> ref_class_index, double ridge,
                              unsigned threads) {
  expect_same_dim(test, reference, "reference");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("ridge must be nonnegative, got {}", ridge));
  }
  if (ref_class_index.size() != reference.rows()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} class indices for {} reference rows", ref_class_index.size(), reference.rows()));
  }
  const std::size_t d = reference.cols();
  const std::size_t num_classes = count_classes(ref_class_index);

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_classes),
                                                static_cast<Eigen::Index>(d));
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t r = 0; r < reference.rows(); ++r) {
    const auto c = static_cast<Eigen::Index>(ref_class_index[r]);
    ++counts[ref_class_index[r]];
    for (std::size_t k = 0; k < d; ++k) means(c, static_cast<Eigen::Index>(k)) += reference(r, k);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) throw Error(ErrorCode::kEmptyClass, fmt::format("reference class {}", c));
    means.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
  }

  Eigen::MatrixXd centered(static_cast<Eigen::Index>(reference.rows()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < reference.rows(); ++r) {
    const auto c = static_cast<Eigen::Index>(ref_class_index[r]);
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      centered(static_cast<Eigen::Index>(r), kk) = reference(r, k) - means(c, kk);
    }
  }
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(reference.rows());
  cov.diagonal().array() += ridge;

  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance,
                fmt::format("covariance + {} I is not positive definite", ridge));
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  if ((lower.diagonal().array() <= 0.0).any()) {
    throw Error(ErrorCode::kSingularCovariance, "zero pivot in Cholesky factor");
  }

  ScoreVector out;
  out.values.resize(test.rows());
  parallel_for(test.rows(), threads, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd diff(static_cast<Eigen::Index>(d));
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t k = 0; k < d; ++k) {
          const auto kk = static_cast<Eigen::Index>(k);
          diff(kk) = test(i, k) - means(static_cast<Eigen::Index>(c), kk);
        }
        const Eigen::VectorXd y = lower.triangularView<Eigen::Lower>().solve(diff);
        best = std::min(best, y.squaredNorm());
      }
      out.values[i] = -best;
    }
  });
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!std::isfinite(out.values[i])) {
      throw Error(ErrorCode::kNonFiniteScore, fmt::format("mahalanobis score of row {}", i));
    }
  }
  return out;
}

}  // namespace soda
