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

// Initial OOD scores (higher = more in-distribution) and the baseline
// scorers evaluated over the same embeddings.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "soda/core.hpp"

namespace soda {

/// Encoded prompt sentences and the class each one describes.
struct PromptEmbeddingGroups {
  EmbeddingMatrix embeddings;
  std::vector<std::uint32_t> class_index;
  std::vector<std::string> class_names;
};

/// One prototype row per class: the mean of that class's normalized prompt
/// embeddings. Rows are deliberately left un-normalized.
struct PrototypeSet {
  EmbeddingMatrix prototypes;
  std::vector<std::string> class_names;

  std::size_t num_classes() const noexcept { return prototypes.rows(); }
};

PrototypeSet build_prototypes(const PromptEmbeddingGroups& groups);

/// Per-class mean of normalized rows; classes are 0..num_classes-1.
/// Throws EmptyClass if a class has no rows.
EmbeddingMatrix class_means(const EmbeddingMatrix& unit_rows,
                            std::span<const std::uint32_t> class_index,
                            std::size_t num_classes);

/// N x C cosine similarities between test rows and prototypes, row-major.
std::vector<double> prototype_similarities(const EmbeddingMatrix& test,
                                           const EmbeddingMatrix& prototypes,
                                           unsigned threads = 0);

/// Maximum cosine similarity to any text prototype.
ScoreVector text_score(const EmbeddingMatrix& test, const PrototypeSet& protos,
                       unsigned threads = 0);

/// Mean of the k largest cosine similarities to the reference rows.
ScoreVector source_similarity(const EmbeddingMatrix& test, const EmbeddingMatrix& reference,
                              std::size_t k, unsigned threads = 0);

/// Argmax prototype per sample; ties go to the lowest class index.
std::vector<std::uint32_t> classify(const EmbeddingMatrix& test, const PrototypeSet& protos,
                                    unsigned threads = 0);

/// Maximum softmax probability over similarity / temperature.
ScoreVector msp_score(const EmbeddingMatrix& test, const PrototypeSet& protos,
                      double temperature = 1.0, unsigned threads = 0);

/// Maximum logit. With cosine logits this is exactly text_score.
ScoreVector mls_score(const EmbeddingMatrix& test, const PrototypeSet& protos,
                      unsigned threads = 0);

/// Maximum cosine similarity to per-class means of the reference rows.
ScoreVector cosine_proto_score(const EmbeddingMatrix& test, const EmbeddingMatrix& reference,
                               std::span<const std::uint32_t> ref_class_index,
                               unsigned threads = 0);

/// Negated minimum squared Mahalanobis distance to a class mean under a
/// tied covariance estimated from class-centered reference rows, plus
/// `ridge` on the diagonal. Operates on raw (un-normalized) features.
ScoreVector mahalanobis_score(const EmbeddingMatrix& test, const EmbeddingMatrix& reference,
                              std::span<const std::uint32_t> ref_class_index,
                              double ridge = 1e-3, unsigned threads = 0);

}  // namespace soda
