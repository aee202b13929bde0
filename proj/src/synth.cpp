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

#include "soda/synth.hpp"

#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "soda/error.hpp"

namespace soda::synth {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> normalized(std::vector<double> v) {
  const double n = norm(v);
  for (double& x : v) x /= n;
  return v;
}

std::vector<double> gaussian_vector(std::size_t dim, Xoshiro256& rng) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

std::vector<double> sample_around(const ClassSpec& cls, Xoshiro256& rng) {
  std::vector<double> v = gaussian_vector(cls.mean.size(), rng);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = cls.mean[k] + v[k] / cls.concentration;
  return normalized(std::move(v));
}

void put_row(EmbeddingMatrix& m, std::size_t r, const std::vector<double>& v) {
  auto row = m.row(r);
  for (std::size_t k = 0; k < v.size(); ++k) row[k] = static_cast<float>(v[k]);
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  SplitMix64 sm(seed);
  for (auto& word : s_) word = sm.next();
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

std::uint64_t Xoshiro256::below(std::uint64_t bound) {
  const std::uint64_t limit = (~std::uint64_t{0} / bound) * bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x < limit) return x % bound;
  }
}

std::vector<double> random_orthogonal(const std::vector<double>& x, Xoshiro256& rng) {
  for (;;) {
    std::vector<double> u = gaussian_vector(x.size(), rng);
    double proj = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) proj += u[k] * x[k];
    for (std::size_t k = 0; k < x.size(); ++k) u[k] -= proj * x[k];
    if (norm(u) > 1e-8) return normalized(std::move(u));
  }
}

std::vector<double> rotate_random_plane(const std::vector<double>& x, double angle,
                                        Xoshiro256& rng) {
  const std::vector<double> u = random_orthogonal(x, rng);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = c * x[k] + s * u[k];
  return normalized(std::move(out));
}

void SynthScenario::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidScenario, why); };
  if (dim < 2) fail(fmt::format("dim must be >= 2, got {}", dim));
  if (id_classes.empty()) fail("at least one ID class required");
  if (n_reference == 0) fail("n_reference must be positive");
  if (prompts_per_class == 0) fail("prompts_per_class must be positive");
  if (n_id_test * id_classes.size() + n_ood_test * ood_classes.size() == 0) fail("empty test set");
  if (!(shift >= 0.0) || !std::isfinite(shift)) fail("shift must be >= 0");
  if (!(prototype_noise >= 0.0) || !std::isfinite(prototype_noise)) fail("prototype_noise must be >= 0");
  auto check_class = [&](const ClassSpec& c) {
    if (c.mean.size() != dim) fail(fmt::format("class {} mean has dim {}", c.name, c.mean.size()));
    if (std::abs(norm(c.mean) - 1.0) > 1e-6) fail(fmt::format("class {} mean is not a unit vector", c.name));
    if (!(c.concentration > 0.0)) fail(fmt::format("class {} concentration must be > 0", c.name));
    if (c.name.empty() || c.name.find(',') != std::string::npos) fail("class names must be non-empty, no commas");
  };
  for (const auto& c : id_classes) check_class(c);
  for (const auto& c : ood_classes) check_class(c);
}

SynthScenario make_scenario(const ScenarioParams& p) {
  if (p.dim < 2) throw Error(ErrorCode::kInvalidScenario, "dim must be >= 2");
  if (p.id_classes == 0) throw Error(ErrorCode::kInvalidScenario, "at least one ID class required");
  // Class geometry comes from its own stream so that sample counts do not
  // move the class means.
  Xoshiro256 rng(p.seed ^ 0x636C617373ULL);
  SynthScenario s;
  s.dim = p.dim;
  for (std::size_t c = 0; c < p.id_classes; ++c) {
    s.id_classes.push_back({fmt::format("id_{}", c), normalized(gaussian_vector(p.dim, rng)), p.concentration});
  }
  for (std::size_t c = 0; c < p.ood_classes; ++c) {
    std::vector<double> mean;
    if (p.ood_angle > 0.0) {
      mean = rotate_random_plane(s.id_classes[c % p.id_classes].mean, p.ood_angle, rng);
    } else {
      mean = normalized(gaussian_vector(p.dim, rng));
    }
    s.ood_classes.push_back({fmt::format("ood_{}", c), std::move(mean), p.concentration});
  }
  s.n_id_test = p.n_id_test;
  s.n_ood_test = p.n_ood_test;
  s.n_reference = p.n_reference;
  s.prompts_per_class = p.prompts_per_class;
  s.shift = p.shift;
  s.prototype_noise = p.prototype_noise;
  s.seed = p.seed;
  return s;
}

ScenarioParams standard_params() {
  ScenarioParams p;
  p.seed = 42;
  p.dim = 64;
  p.id_classes = 5;
  p.ood_classes = 3;
  p.concentration = 6.0;
  p.ood_angle = 1.0;
  p.n_id_test = 100;
  p.n_ood_test = 100;
  p.n_reference = 50;
  p.prompts_per_class = 8;
  p.shift = 0.6;
  p.prototype_noise = 1.2;
  return p;
}

SynthData generate(const SynthScenario& sc) {
  sc.validate();
  Xoshiro256 rng(sc.seed);
  const std::size_t n_id_classes = sc.id_classes.size();
  SynthData out;

  out.reference = EmbeddingMatrix(sc.n_reference * n_id_classes, sc.dim);
  for (const auto& c : sc.id_classes) out.reference_classes.names.push_back(c.name);
  out.prompt_classes.names = out.reference_classes.names;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n_id_classes; ++c) {
    for (std::size_t k = 0; k < sc.n_reference; ++k, ++r) {
      put_row(out.reference, r, sample_around(sc.id_classes[c], rng));
      out.reference_classes.index.push_back(static_cast<std::uint32_t>(c));
    }
  }

  out.prompts = EmbeddingMatrix(sc.prompts_per_class * n_id_classes, sc.dim);
  r = 0;
  for (std::size_t c = 0; c < n_id_classes; ++c) {
    for (std::size_t k = 0; k < sc.prompts_per_class; ++k, ++r) {
      put_row(out.prompts, r, rotate_random_plane(sc.id_classes[c].mean, sc.prototype_noise, rng));
      out.prompt_classes.index.push_back(static_cast<std::uint32_t>(c));
    }
  }

  struct Pending {
    std::vector<double> row;
    io::OodLabel label;
    std::string class_name;
  };
  std::vector<Pending> test;
  test.reserve(sc.n_id_test * n_id_classes + sc.n_ood_test * sc.ood_classes.size());
  auto draw = [&](const ClassSpec& c, std::size_t count, io::OodLabel label) {
    for (std::size_t k = 0; k < count; ++k) {
      auto x = sample_around(c, rng);
      test.push_back({rotate_random_plane(x, sc.shift, rng), label, c.name});
    }
  };
  for (const auto& c : sc.id_classes) draw(c, sc.n_id_test, io::OodLabel::kId);
  for (const auto& c : sc.ood_classes) draw(c, sc.n_ood_test, io::OodLabel::kOod);
  // Fisher-Yates so that ID and OOD rows interleave.
  for (std::size_t i = test.size(); i > 1; --i) {
    std::swap(test[i - 1], test[rng.below(i)]);
  }

  out.test = EmbeddingMatrix(test.size(), sc.dim);
  out.labels.entries.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    put_row(out.test, i, test[i].row);
    out.labels.entries.push_back({i, test[i].label, test[i].class_name});
  }
  return out;
}

std::vector<std::filesystem::path> write_scenario(const SynthData& data,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths = {
      dir / "reference.emb", dir / "reference_classes.csv", dir / "prompts.emb",
      dir / "prompt_classes.csv", dir / "test.emb", dir / "labels.csv"};
  io::save_embeddings(paths[0], data.reference);
  io::save_classes(paths[1], data.reference_classes);
  io::save_embeddings(paths[2], data.prompts);
  io::save_classes(paths[3], data.prompt_classes);
  io::save_embeddings(paths[4], data.test);
  io::save_labels(paths[5], data.labels);
  return paths;
}

PromptEmbeddingGroups prompt_groups(const EmbeddingMatrix& prompts,
                                    const io::ClassAssignment& classes) {
  if (classes.index.size() != prompts.rows()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} prompt rows but {} class rows", prompts.rows(), classes.index.size()));
  }
  return {prompts, classes.index, classes.names};
}

}  // namespace soda::synth
