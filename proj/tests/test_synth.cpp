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
#include <filesystem>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "soda/error.hpp"
#include "soda/io.hpp"
#include "soda/metrics.hpp"
#include "soda/scoring.hpp"
#include "soda/synth.hpp"

namespace soda::synth {
namespace {

namespace fs = std::filesystem;

ScenarioParams small_params() {
  ScenarioParams p;
  p.seed = 9;
  p.dim = 16;
  p.id_classes = 3;
  p.ood_classes = 2;
  p.concentration = 8.0;
  p.n_id_test = 30;
  p.n_ood_test = 20;
  p.n_reference = 10;
  p.prompts_per_class = 4;
  return p;
}

double mean_id_text_score(const SynthData& d) {
  const auto protos = build_prototypes(prompt_groups(d.prompts, d.prompt_classes));
  const auto s = text_score(d.test, protos).values;
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (d.labels.entries[i].ood_label == io::OodLabel::kId) {
      sum += s[i];
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

TEST(SplitMix64, ReferenceSequence) {
  SplitMix64 sm(0);
  EXPECT_EQ(sm.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(sm.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(sm.next(), 0x06C45D188009454FULL);
}

TEST(Xoshiro256, UniformAndNormalMoments) {
  Xoshiro256 rng(123);
  double su = 0, sn = 0, sn2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7U);
}

TEST(RotateRandomPlane, ExactAngle) {
  Xoshiro256 rng(1);
  const std::vector<double> x{0.6, 0.8, 0.0, 0.0};
  for (double angle : {0.0, 0.3, 1.2, 3.0}) {
    const auto y = rotate_random_plane(x, angle, rng);
    EXPECT_NEAR(testing::naive_cosine(x, y), std::cos(angle), 1e-12);
    const auto u = random_orthogonal(x, rng);
    EXPECT_NEAR(testing::naive_cosine(x, u), 0.0, 1e-12);
  }
}

TEST(Generate, ShapesAndUnitRows) {
  const auto d = generate(make_scenario(small_params()));
  EXPECT_EQ(d.reference.rows(), 30U);
  EXPECT_EQ(d.prompts.rows(), 12U);
  EXPECT_EQ(d.test.rows(), 130U);
  EXPECT_EQ(d.labels.size(), 130U);
  for (const auto* m : {&d.reference, &d.prompts, &d.test}) {
    for (std::size_t i = 0; i < m->rows(); ++i) EXPECT_NEAR(std::sqrt(dot(m->row(i), m->row(i))), 1.0, 1e-6);
  }
  std::size_t n_ood = 0;
  for (const auto& e : d.labels.entries) n_ood += e.ood_label == io::OodLabel::kOod ? 1 : 0;
  EXPECT_EQ(n_ood, 40U);
  EXPECT_EQ(d.reference_classes.names, (std::vector<std::string>{"id_0", "id_1", "id_2"}));
}

TEST(Generate, HugeConcentrationSitsOnTheMean) {
  auto p = small_params();
  p.concentration = 1e9;
  const auto sc = make_scenario(p);
  const auto d = generate(sc);
  for (std::size_t i = 0; i < d.reference.rows(); ++i) {
    const auto& mean = sc.id_classes[d.reference_classes.index[i]].mean;
    double dist2 = 0;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double diff = d.reference(i, k) - mean[k];
      dist2 += diff * diff;
    }
    EXPECT_LT(std::sqrt(dist2), 1e-6);
  }
}

TEST(Generate, SameSeedSameBytes) {
  const auto a = fs::temp_directory_path() / "soda_synth_a";
  const auto b = fs::temp_directory_path() / "soda_synth_b";
  const auto pa = write_scenario(generate(make_scenario(small_params())), a);
  const auto pb = write_scenario(generate(make_scenario(small_params())), b);
  for (std::size_t k = 0; k < pa.size(); ++k) EXPECT_EQ(io::sha256_file(pa[k]), io::sha256_file(pb[k]));
  auto other = small_params();
  other.seed = 10;
  const auto pc = write_scenario(generate(make_scenario(other)), b);
  EXPECT_NE(io::sha256_file(pa[4]), io::sha256_file(pc[4]));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Generate, ShiftAndNoiseLowerTextScore) {
  auto p = small_params();
  const double clean = mean_id_text_score(generate(make_scenario(p)));
  p.shift = 0.8;
  const double shifted = mean_id_text_score(generate(make_scenario(p)));
  p.shift = 0.0;
  p.prototype_noise = 0.8;
  const double noisy = mean_id_text_score(generate(make_scenario(p)));
  EXPECT_LT(shifted, clean - 0.05);
  EXPECT_LT(noisy, clean - 0.05);
}

TEST(Generate, IntraClassTighterThanCrossClass) {
  const auto d = generate(make_scenario(small_params()));
  const auto s = pairwise_similarity(d.reference);
  double intra = 0, cross = 0;
  std::size_t ni = 0, nc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (d.reference_classes.index[i] == d.reference_classes.index[j]) {
        intra += s(i, j);
        ++ni;
      } else {
        cross += s(i, j);
        ++nc;
      }
    }
  }
  EXPECT_GT(intra / static_cast<double>(ni), cross / static_cast<double>(nc) + 0.3);
}

TEST(Generate, CleanScenarioIsSeparable) {
  auto p = small_params();
  p.concentration = 50.0;
  p.ood_angle = 0.0;
  p.dim = 64;
  const auto d = generate(make_scenario(p));
  const auto protos = build_prototypes(prompt_groups(d.prompts, d.prompt_classes));
  const auto s = text_score(d.test, protos).values;
  EXPECT_GE(metrics::auc(s, d.labels.ood_labels()), 0.99);
}

TEST(SynthScenario, Validation) {
  auto sc = make_scenario(small_params());
  sc.shift = -0.1;
  EXPECT_THROW(sc.validate(), Error);
  sc = make_scenario(small_params());
  sc.id_classes[0].mean[0] += 0.5;
  EXPECT_THROW(sc.validate(), Error);
  sc = make_scenario(small_params());
  sc.id_classes[1].concentration = 0.0;
  EXPECT_THROW(sc.validate(), Error);
  auto p = small_params();
  p.id_classes = 0;
  try {
    make_scenario(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidScenario);
  }
}

}  // namespace
}  // namespace soda::synth
