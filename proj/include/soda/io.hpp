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

// File formats.
//
//   Embeddings  "SODAEMB1" | u32le n_rows | u32le n_cols | float32le payload,
//               row-major, exactly 16 + 4 * n_rows * n_cols bytes.
//   Labels      CSV `index,ood_label[,class_label]`, ood_label in {ID, OOD}
//               (case-insensitive), LF or CRLF.
//   Classes     CSV `row,class_name` assigning each embedding row a class.
//   Scores      CSV `index,s_text,d_src,score_initial,score_final`, reals
//               with 9 significant digits, d_src empty in zero-shot mode.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "soda/core.hpp"

namespace soda::io {

inline constexpr std::array<char, 8> kEmbMagic = {'S', 'O', 'D', 'A', 'E', 'M', 'B', '1'};
inline constexpr std::size_t kEmbHeaderBytes = 16;

struct EmbFileHeader {
  std::uint32_t n_rows = 0;
  std::uint32_t n_cols = 0;
};

enum class OodLabel : std::uint8_t { kId, kOod };

struct LabelEntry {
  std::size_t index = 0;
  OodLabel ood_label = OodLabel::kId;
  std::optional<std::string> class_label;
};

/// Rows sorted by index; indices are a permutation of 0..N-1.
struct LabelTable {
  std::vector<LabelEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::vector<OodLabel> ood_labels() const;
  bool has_class_labels() const;
};

/// Class membership of embedding rows; `index[r]` points into `names`, which
/// are ordered by first appearance.
struct ClassAssignment {
  std::vector<std::string> names;
  std::vector<std::uint32_t> index;

  std::size_t num_classes() const noexcept { return names.size(); }
  /// Position of `name` in `names`, if present.
  std::optional<std::uint32_t> find(const std::string& name) const;
};

struct ScoreTable {
  std::vector<double> s_text;
  std::optional<std::vector<double>> d_src;  // absent in zero-shot mode
  std::vector<double> score_initial;
  std::vector<double> score_final;

  std::size_t size() const noexcept { return s_text.size(); }
};

EmbFileHeader read_emb_header(const std::filesystem::path& path);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m);

LabelTable load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelTable& labels);

ClassAssignment load_classes(const std::filesystem::path& path);
void save_classes(const std::filesystem::path& path, const ClassAssignment& classes);

void save_scores(const std::filesystem::path& path, const ScoreTable& table);
ScoreTable load_scores(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// `%.9g` rendering used for every real written to a scores file.
std::string format_real(double v);

/// Splits one CSV line on commas; a trailing '\r' is dropped.
std::vector<std::string> split_csv_line(std::string line);

}  // namespace soda::io
