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

#include "soda/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <openssl/evp.h>

#include "soda/error.hpp"

namespace soda::io {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32le(unsigned char* p, std::uint32_t v) {
  p[0] = static_cast<unsigned char>(v & 0xFFU);
  p[1] = static_cast<unsigned char>((v >> 8) & 0xFFU);
  p[2] = static_cast<unsigned char>((v >> 16) & 0xFFU);
  p[3] = static_cast<unsigned char>((v >> 24) & 0xFFU);
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, fmt::format("cannot open {}", path.string()));
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoFailure, fmt::format("read error on {}", path.string()));
  return bytes;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, fmt::format("cannot open {}", path.string()));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  // Tolerate trailing blank lines only.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::size_t parse_index(const std::string& field, const std::filesystem::path& path,
                        std::size_t line_no) {
  const std::string t = trim(field);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kMalformedCsv,
                fmt::format("{}:{}: bad index '{}'", path.string(), line_no, field));
  }
  return value;
}

double parse_real(const std::string& field, const std::filesystem::path& path,
                  std::size_t line_no) {
  const std::string t = trim(field);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw Error(ErrorCode::kMalformedCsv,
                fmt::format("{}:{}: bad number '{}'", path.string(), line_no, field));
  }
  return v;
}

void expect_header(const std::vector<std::string>& lines, const std::filesystem::path& path,
                   const std::vector<std::string>& required,
                   const std::vector<std::string>& optional, std::size_t* columns) {
  if (lines.empty()) throw Error(ErrorCode::kMalformedCsv, fmt::format("{}: empty file", path.string()));
  auto fields = split_csv_line(lines.front());
  for (auto& f : fields) f = lower(trim(f));
  std::vector<std::string> expected = required;
  bool ok = fields.size() >= required.size() && fields.size() <= required.size() + optional.size();
  expected.insert(expected.end(), optional.begin(), optional.end());
  for (std::size_t k = 0; ok && k < fields.size(); ++k) ok = fields[k] == expected[k];
  if (!ok) {
    throw Error(ErrorCode::kMalformedCsv,
                fmt::format("{}: unexpected header '{}'", path.string(), lines.front()));
  }
  *columns = fields.size();
}

/// Checks that `seen` marks every index in 0..N-1.
void expect_permutation(const std::vector<char>& seen, const std::filesystem::path& path) {
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kMalformedCsv, fmt::format("{}: index {} missing", path.string(), i));
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, fmt::format("cannot write {}", path.string()));
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, fmt::format("write error on {}", path.string()));
}

}  // namespace

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string format_real(double v) { return fmt::format("{:.9g}", v); }

std::vector<OodLabel> LabelTable::ood_labels() const {
  std::vector<OodLabel> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.ood_label);
  return out;
}

bool LabelTable::has_class_labels() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.class_label.has_value(); });
}

std::optional<std::uint32_t> ClassAssignment::find(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - names.begin());
}

EmbFileHeader read_emb_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, fmt::format("cannot open {}", path.string()));
  unsigned char buf[kEmbHeaderBytes];
  in.read(reinterpret_cast<char*>(buf), kEmbHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kEmbHeaderBytes)) {
    throw Error(ErrorCode::kTruncatedFile, fmt::format("{}: header incomplete", path.string()));
  }
  if (std::memcmp(buf, kEmbMagic.data(), kEmbMagic.size()) != 0) {
    throw Error(ErrorCode::kBadMagic, path.string());
  }
  return {read_u32le(buf + 8), read_u32le(buf + 12)};
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < kEmbHeaderBytes) {
    throw Error(ErrorCode::kTruncatedFile,
                fmt::format("{}: {} bytes, header needs {}", path.string(), bytes.size(), kEmbHeaderBytes));
  }
  if (std::memcmp(bytes.data(), kEmbMagic.data(), kEmbMagic.size()) != 0) {
    throw Error(ErrorCode::kBadMagic, path.string());
  }
  const std::size_t rows = read_u32le(bytes.data() + 8);
  const std::size_t cols = read_u32le(bytes.data() + 12);
  const std::size_t expected = kEmbHeaderBytes + 4 * rows * cols;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kTruncatedFile,
                fmt::format("{}: {} bytes, header implies {}", path.string(), bytes.size(), expected));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::kTruncatedFile,
                fmt::format("{}: {} trailing bytes after payload", path.string(), bytes.size() - expected));
  }
  std::vector<float> data(rows * cols);
  const unsigned char* p = bytes.data() + kEmbHeaderBytes;
  for (std::size_t k = 0; k < data.size(); ++k, p += 4) {
    const float v = std::bit_cast<float>(read_u32le(p));
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteEntry, fmt::format("row {} col {}", k / cols, k % cols));
    }
    data[k] = v;
  }
  return EmbeddingMatrix(rows, cols, std::move(data));
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  std::vector<unsigned char> bytes(kEmbHeaderBytes + 4 * m.data().size());
  std::memcpy(bytes.data(), kEmbMagic.data(), kEmbMagic.size());
  write_u32le(bytes.data() + 8, static_cast<std::uint32_t>(m.rows()));
  write_u32le(bytes.data() + 12, static_cast<std::uint32_t>(m.cols()));
  unsigned char* p = bytes.data() + kEmbHeaderBytes;
  for (const float v : m.data()) {
    write_u32le(p, std::bit_cast<std::uint32_t>(v));
    p += 4;
  }
  auto out = open_out(path, true);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  finish(out, path);
}

LabelTable load_labels(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::size_t columns = 0;
  expect_header(lines, path, {"index", "ood_label"}, {"class_label"}, &columns);
  const std::size_t n = lines.size() - 1;
  LabelTable table;
  table.entries.resize(n);
  std::vector<char> seen(n, 0);
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split_csv_line(lines[l]);
    if (fields.size() != columns) {
      throw Error(ErrorCode::kMalformedCsv,
                  fmt::format("{}:{}: expected {} fields, got {}", path.string(), l + 1, columns, fields.size()));
    }
    const std::size_t index = parse_index(fields[0], path, l + 1);
    if (index >= n) {
      throw Error(ErrorCode::kMalformedCsv,
                  fmt::format("{}:{}: index {} out of range for {} rows", path.string(), l + 1, index, n));
    }
    if (seen[index]) throw Error(ErrorCode::kDuplicateIndex, fmt::format("{}: index {}", path.string(), index));
    seen[index] = 1;
    const std::string token = lower(trim(fields[1]));
    LabelEntry entry;
    entry.index = index;
    if (token == "id") {
      entry.ood_label = OodLabel::kId;
    } else if (token == "ood") {
      entry.ood_label = OodLabel::kOod;
    } else {
      throw Error(ErrorCode::kUnknownLabelToken,
                  fmt::format("{}:{}: '{}'", path.string(), l + 1, fields[1]));
    }
    if (columns == 3) entry.class_label = trim(fields[2]);
    table.entries[index] = std::move(entry);
  }
  expect_permutation(seen, path);
  return table;
}

void save_labels(const std::filesystem::path& path, const LabelTable& labels) {
  const bool with_class = labels.has_class_labels();
  auto out = open_out(path, false);
  out << (with_class ? "index,ood_label,class_label\n" : "index,ood_label\n");
  for (const auto& e : labels.entries) {
    out << e.index << ',' << (e.ood_label == OodLabel::kId ? "ID" : "OOD");
    if (with_class) out << ',' << *e.class_label;
    out << '\n';
  }
  finish(out, path);
}

ClassAssignment load_classes(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::size_t columns = 0;
  expect_header(lines, path, {"row", "class_name"}, {}, &columns);
  const std::size_t n = lines.size() - 1;
  std::vector<std::string> row_names(n);
  std::vector<char> seen(n, 0);
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split_csv_line(lines[l]);
    if (fields.size() != 2) {
      throw Error(ErrorCode::kMalformedCsv,
                  fmt::format("{}:{}: expected 2 fields, got {}", path.string(), l + 1, fields.size()));
    }
    const std::size_t row = parse_index(fields[0], path, l + 1);
    if (row >= n) {
      throw Error(ErrorCode::kMalformedCsv,
                  fmt::format("{}:{}: row {} out of range for {} rows", path.string(), l + 1, row, n));
    }
    if (seen[row]) throw Error(ErrorCode::kDuplicateIndex, fmt::format("{}: row {}", path.string(), row));
    seen[row] = 1;
    row_names[row] = trim(fields[1]);
    if (row_names[row].empty()) {
      throw Error(ErrorCode::kMalformedCsv, fmt::format("{}:{}: empty class name", path.string(), l + 1));
    }
  }
  expect_permutation(seen, path);
  ClassAssignment classes;
  classes.index.reserve(n);
  for (const auto& name : row_names) {
    auto idx = classes.find(name);
    if (!idx) {
      idx = static_cast<std::uint32_t>(classes.names.size());
      classes.names.push_back(name);
    }
    classes.index.push_back(*idx);
  }
  return classes;
}

void save_classes(const std::filesystem::path& path, const ClassAssignment& classes) {
  auto out = open_out(path, false);
  out << "row,class_name\n";
  for (std::size_t r = 0; r < classes.index.size(); ++r) {
    out << r << ',' << classes.names.at(classes.index[r]) << '\n';
  }
  finish(out, path);
}

void save_scores(const std::filesystem::path& path, const ScoreTable& table) {
  const std::size_t n = table.size();
  if (table.score_initial.size() != n || table.score_final.size() != n ||
      (table.d_src && table.d_src->size() != n)) {
    throw Error(ErrorCode::kLengthMismatch, "score columns differ in length");
  }
  std::string text = "index,s_text,d_src,score_initial,score_final\n";
  for (std::size_t i = 0; i < n; ++i) {
    text += fmt::format("{},{},{},{},{}\n", i, format_real(table.s_text[i]),
                        table.d_src ? format_real((*table.d_src)[i]) : std::string(),
                        format_real(table.score_initial[i]), format_real(table.score_final[i]));
  }
  auto out = open_out(path, true);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish(out, path);
}

ScoreTable load_scores(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::size_t columns = 0;
  expect_header(lines, path, {"index", "s_text", "d_src", "score_initial", "score_final"}, {}, &columns);
  const std::size_t n = lines.size() - 1;
  ScoreTable table;
  table.s_text.resize(n);
  table.score_initial.resize(n);
  table.score_final.resize(n);
  std::vector<double> d_src(n);
  std::size_t d_src_present = 0;
  std::vector<char> seen(n, 0);
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split_csv_line(lines[l]);
    if (fields.size() != 5) {
      throw Error(ErrorCode::kMalformedCsv,
                  fmt::format("{}:{}: expected 5 fields, got {}", path.string(), l + 1, fields.size()));
    }
    const std::size_t i = parse_index(fields[0], path, l + 1);
    if (i >= n) throw Error(ErrorCode::kMalformedCsv, fmt::format("{}:{}: index {} out of range", path.string(), l + 1, i));
    if (seen[i]) throw Error(ErrorCode::kDuplicateIndex, fmt::format("{}: index {}", path.string(), i));
    seen[i] = 1;
    table.s_text[i] = parse_real(fields[1], path, l + 1);
    if (!trim(fields[2]).empty()) {
      d_src[i] = parse_real(fields[2], path, l + 1);
      ++d_src_present;
    }
    table.score_initial[i] = parse_real(fields[3], path, l + 1);
    table.score_final[i] = parse_real(fields[4], path, l + 1);
  }
  expect_permutation(seen, path);
  if (d_src_present == n && n > 0) {
    table.d_src = std::move(d_src);
  } else if (d_src_present != 0) {
    throw Error(ErrorCode::kMalformedCsv, fmt::format("{}: d_src column partially empty", path.string()));
  }
  return table;
}

std::string sha256_file(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoFailure, "sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

}  // namespace soda::io
