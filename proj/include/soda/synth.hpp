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

// Synthetic unit-sphere embedding scenarios.
//
// Each class is a mean direction on the sphere. Samples are
// normalize(mean + g / concentration) with g ~ N(0, I): an approximation of
// a von Mises-Fisher draw that is cheap and exactly reproducible. Test
// samples are then rotated by a fixed angle `shift` in a random plane
// through the sample, emulating a source-to-target domain gap. Prompt
// embeddings are the ID class means rotated by `prototype_noise`, which
// weakens text alignment without touching the cluster structure.
//
// Randomness comes from xoshiro256** seeded through SplitMix64, with
// Box-Muller normals, so a seed gives the same bytes on every platform with
// IEEE doubles and a correctly rounded libm.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "soda/core.hpp"
#include "soda/io.hpp"
#include "soda/scoring.hpp"

namespace soda::synth {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna).
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via the Box-Muller transform; pairs are cached.
  double normal();
  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct ClassSpec {
  std::string name;
  std::vector<double> mean;  // unit vector
  double concentration = 10.0;
};

struct SynthScenario {
  std::size_t dim = 64;
  std::vector<ClassSpec> id_classes;
  std::vector<ClassSpec> ood_classes;
  std::size_t n_id_test = 100;     // per ID class
  std::size_t n_ood_test = 100;    // per OOD class
  std::size_t n_reference = 50;    // per ID class
  std::size_t prompts_per_class = 8;
  double shift = 0.0;              // radians
  double prototype_noise = 0.0;    // radians
  std::uint64_t seed = 0;

  /// Throws InvalidScenario.
  void validate() const;
};

/// Knobs for drawing class mean directions from the seed.
struct ScenarioParams {
  std::size_t dim = 64;
  std::size_t id_classes = 5;
  std::size_t ood_classes = 3;
  double concentration = 10.0;
  /// Angle (radians) between each OOD mean and the ID mean it is derived
  /// from. A non-positive value draws OOD means independently.
  double ood_angle = 0.0;
  std::size_t n_id_test = 100;
  std::size_t n_ood_test = 100;
  std::size_t n_reference = 50;
  std::size_t prompts_per_class = 8;
  double shift = 0.0;
  double prototype_noise = 0.0;
  std::uint64_t seed = 0;
};

SynthScenario make_scenario(const ScenarioParams& params);

/// Defaults of the reference experiment: seed 42, 64 dimensions, 5 ID and
/// 3 OOD classes.
ScenarioParams standard_params();

struct SynthData {
  EmbeddingMatrix reference;
  io::ClassAssignment reference_classes;
  EmbeddingMatrix prompts;
  io::ClassAssignment prompt_classes;
  EmbeddingMatrix test;
  io::LabelTable labels;
};

SynthData generate(const SynthScenario& scenario);

/// Writes reference.emb, reference_classes.csv, prompts.emb,
/// prompt_classes.csv, test.emb and labels.csv into `dir`; returns the paths.
std::vector<std::filesystem::path> write_scenario(const SynthData& data,
                                                  const std::filesystem::path& dir);

PromptEmbeddingGroups prompt_groups(const EmbeddingMatrix& prompts,
                                    const io::ClassAssignment& classes);

/// Unit vector orthogonal to unit vector `x`, drawn uniformly.
std::vector<double> random_orthogonal(const std::vector<double>& x, Xoshiro256& rng);

/// cos(angle) x + sin(angle) u with u a random unit vector orthogonal to x.
std::vector<double> rotate_random_plane(const std::vector<double>& x, double angle,
                                        Xoshiro256& rng);

}  // namespace soda::synth
