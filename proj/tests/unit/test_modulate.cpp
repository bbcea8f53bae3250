#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chaoswave/cross_validation.hpp"
#include "chaoswave/errors.hpp"
#include "chaoswave/modulate.hpp"
#include "test_util.hpp"

namespace chaoswave {
namespace {

using testing::random_matrix;

WaveletPyramid random_pyramid(std::size_t side, std::size_t levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return dwt2d_forward(random_matrix(side, side, rng), default_cdf97(), levels);
}

std::vector<double> iota(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
  return v;
}

bool pyramids_equal(const WaveletPyramid& a, const WaveletPyramid& b) {
  if (!(a.approx == b.approx) || a.details.size() != b.details.size()) return false;
  for (std::size_t k = 0; k < a.details.size(); ++k) {
    if (!(a.details[k].lh == b.details[k].lh && a.details[k].hl == b.details[k].hl &&
          a.details[k].hh == b.details[k].hh)) {
      return false;
    }
  }
  return true;
}

TEST(ModulationConfig, Validation) {
  ModulationConfig c;
  EXPECT_NO_THROW(c.validate(6));
  c.scale = -0.1;
  EXPECT_THROW(c.validate(6), InvalidInput);
  c = {};
  c.level_mask = {0};
  EXPECT_THROW(c.validate(6), InvalidInput);
  c.level_mask = {7};
  EXPECT_THROW(c.validate(6), InvalidInput);
  c.level_mask = {1, 6};
  EXPECT_NO_THROW(c.validate(6));
  EXPECT_TRUE(c.selects(6));
  EXPECT_FALSE(c.selects(3));
}

TEST(ModulatePyramid, ZeroScaleIsIdentity) {
  const auto p = random_pyramid(32, 3, 1);
  ModulationConfig c;
  c.scale = 0.0;
  EXPECT_TRUE(pyramids_equal(modulate_pyramid(p, iota(selected_detail_count(p, c)), c), p));
}

TEST(ModulatePyramid, ZeroSequenceIsIdentity) {
  const auto p = random_pyramid(32, 3, 2);
  const ModulationConfig c;
  EXPECT_TRUE(pyramids_equal(modulate_pyramid(p, std::vector<double>(selected_detail_count(p, c), 0.0), c), p));
}

TEST(ModulatePyramid, CanonicalOrderSingleLevel) {
  const auto p = random_pyramid(8, 1, 3);
  ModulationConfig c;
  c.scale = 0.5;
  ASSERT_EQ(selected_detail_count(p, c), 48u);
  const auto m = iota(48);
  const auto q = modulate_pyramid(p, m, c);
  // LH occupies m[0..15], HL m[16..31], HH m[32..47], each row-major.
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t col = 0; col < 4; ++col) {
      const std::size_t k = r * 4 + col;
      EXPECT_EQ(q.details[0].lh(r, col), p.details[0].lh(r, col) + 0.5 * m[k]);
      EXPECT_EQ(q.details[0].hl(r, col), p.details[0].hl(r, col) + 0.5 * m[16 + k]);
      EXPECT_EQ(q.details[0].hh(r, col), p.details[0].hh(r, col) + 0.5 * m[32 + k]);
    }
  }
  EXPECT_EQ(q.approx, p.approx);
}

TEST(ModulatePyramid, FinestLevelFirstAndMask) {
  const auto p = random_pyramid(16, 2, 4);
  ModulationConfig all;
  all.scale = 1.0;
  ASSERT_EQ(selected_detail_count(p, all), 3u * 64 + 3u * 16);
  const auto m = iota(240);
  const auto q = modulate_pyramid(p, m, all);
  EXPECT_EQ(q.details[0].lh(0, 0), p.details[0].lh(0, 0) + 1.0);
  EXPECT_EQ(q.details[1].lh(0, 0), p.details[1].lh(0, 0) + m[192]);
  EXPECT_EQ(q.details[1].hh(3, 3), p.details[1].hh(3, 3) + m[239]);

  ModulationConfig coarse = all;
  coarse.level_mask = {2};
  ASSERT_EQ(selected_detail_count(p, coarse), 48u);
  const auto r = modulate_pyramid(p, iota(48), coarse);
  EXPECT_EQ(r.details[0].lh, p.details[0].lh);
  EXPECT_EQ(r.details[0].hh, p.details[0].hh);
  EXPECT_EQ(r.details[1].lh(0, 0), p.details[1].lh(0, 0) + 1.0);
  EXPECT_EQ(r.details[1].hh(3, 3), p.details[1].hh(3, 3) + 48.0);
}

TEST(ModulatePyramid, RejectsShortSequence) {
  const auto p = random_pyramid(16, 2, 5);
  const ModulationConfig c;
  EXPECT_THROW(modulate_pyramid(p, std::vector<double>(selected_detail_count(p, c) - 1, 1.0), c), InvalidInput);
}

TEST(ModulatePyramid, ApproximationBitIdenticalAndLinearInScale) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t levels = 1 + trial % 4;
    const auto p = random_pyramid(64, levels, 100 + trial);
    ModulationConfig c;
    c.scale = std::abs(u(rng)) / 10.0;
    std::vector<double> m(selected_detail_count(p, c));
    for (double& v : m) v = u(rng);
    const auto q1 = modulate_pyramid(p, m, c);
    ModulationConfig c2 = c;
    c2.scale = 2.0 * c.scale;
    const auto q2 = modulate_pyramid(p, m, c2);
    EXPECT_EQ(q1.approx, p.approx);
    EXPECT_EQ(q2.approx, p.approx);
    for (std::size_t k = 0; k < levels; ++k) {
      for (auto band : {&DetailBands::lh, &DetailBands::hl, &DetailBands::hh}) {
        const Matrix& b0 = p.details[k].*band;
        const Matrix& b1 = q1.details[k].*band;
        const Matrix& b2 = q2.details[k].*band;
        for (std::size_t i = 0; i < b0.size(); ++i) {
          EXPECT_NEAR(b2.data()[i] - b0.data()[i], 2.0 * (b1.data()[i] - b0.data()[i]), 1e-12);
        }
      }
    }
  }
}

TEST(EnhanceImage, ZeroScaleIsRoundTrip) {
  std::mt19937_64 rng(7);
  const Matrix x = random_matrix(64, 64, rng, 0.0, 1.0);
  ModulationConfig c;
  c.scale = 0.0;
  const Matrix y = enhance_image(x, default_cdf97(), 4, c, ChuaParams{});
  EXPECT_LT(max_abs_difference(x, y), 1e-9);
}

TEST(EnhanceImage, DifferenceEqualsInverseOfModulationOnlyPyramid) {
  std::mt19937_64 rng(8);
  const FilterBank bank = default_cdf97();
  const Matrix x = random_matrix(512, 512, rng, 0.0, 1.0);
  const ModulationConfig c;
  const ChuaParams params;
  const Matrix y = enhance_image(x, bank, 6, c, params);
  EXPECT_GT(max_abs_difference(x, y), 0.0);

  // Modulation is additive, so the change is the inverse transform of a
  // pyramid holding only the scaled sequence in its detail bands.
  WaveletPyramid zero = dwt2d_forward(Matrix(512, 512), bank, 6);
  const std::size_t n = selected_detail_count(zero, c);
  const auto traj = integrate(c.chaos_initial, params, c.chaos_step, c.chaos_burn_in, n);
  const Matrix expected = dwt2d_inverse(modulate_pyramid(zero, modulation_sequence(traj, n), c), bank);
  const Matrix diff = difference_map(x, y);
  for (std::size_t i = 0; i < diff.size(); ++i) EXPECT_NEAR(diff.data()[i], std::abs(expected.data()[i]), 1e-9);
}

TEST(EnhanceImage, Deterministic) {
  std::mt19937_64 rng(9);
  const Matrix x = random_matrix(128, 128, rng, 0.0, 1.0);
  const ModulationConfig c;
  const Matrix a = enhance_image(x, default_cdf97(), 5, c, ChuaParams{});
  const Matrix b = enhance_image(x, default_cdf97(), 5, c, ChuaParams{});
  EXPECT_EQ(a, b);
}

TEST(EnhanceImage, PropagatesErrors) {
  const ModulationConfig c;
  EXPECT_THROW(enhance_image(Matrix(100, 100), default_cdf97(), 3, c, ChuaParams{}), InvalidInput);
  ChuaParams diverging;
  diverging.alpha = 30.0;
  EXPECT_THROW(enhance_image(Matrix(64, 64), default_cdf97(), 3, c, diverging), NumericalDivergence);
}

TEST(DifferenceMap, Examples) {
  const Matrix a(4, 4, 0.7);
  const Matrix same = difference_map(a, a);
  for (double v : same.data()) EXPECT_EQ(v, 0.0);
  const Matrix shifted = difference_map(Matrix(3, 5), Matrix(3, 5, 0.3));
  for (double v : shifted.data()) EXPECT_DOUBLE_EQ(v, 0.3);
  EXPECT_THROW(difference_map(Matrix(3, 3), Matrix(3, 4)), InvalidInput);
}

TEST(DifferenceMap, BoundedByFilterGain) {
  std::mt19937_64 rng(10);
  const FilterBank bank = default_cdf97();
  const ModulationConfig c;  // scale 0.01
  const ChuaParams params;
  for (std::size_t levels : {1u, 3u, 6u}) {
    const Matrix x = random_matrix(256, 256, rng, 0.0, 1.0);
    const Matrix d = difference_map(x, enhance_image(x, bank, levels, c, params));
    const std::size_t n = selected_detail_count(dwt2d_forward(x, bank, levels), c);
    double max_m = 0;
    for (double v : modulation_sequence(integrate(c.chaos_initial, params, c.chaos_step, c.chaos_burn_in, n), n)) {
      max_m = std::max(max_m, std::abs(v));
    }
    double mean = 0, peak = 0;
    for (double v : d.data()) {
      mean += v;
      peak = std::max(peak, v);
    }
    mean /= static_cast<double>(d.size());
    EXPECT_GT(mean, 0.0);
    EXPECT_LE(peak, modulation_gain_bound(bank, levels, c, max_m));
  }
}

TEST(EnhanceDataset, MatchesPerImageEnhancement) {
  std::mt19937_64 rng(11);
  LabeledDataset ds;
  for (int i = 0; i < 3; ++i) {
    ds.items.push_back({GrayImage{random_matrix(32, 32, rng, 0, 1), PixelDomain::Unit}, Label::Benign, "s", false});
  }
  ds.items.push_back({GrayImage{random_matrix(64, 32, rng, 0, 1), PixelDomain::Unit}, Label::Malignant, "t", true});
  const ModulationConfig c;
  const auto out = enhance_dataset(ds, default_cdf97(), 2, c, ChuaParams{});
  ASSERT_EQ(out.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(out.items[i].image.pixels, enhance_image(ds.items[i].image.pixels, default_cdf97(), 2, c, ChuaParams{}));
    EXPECT_EQ(out.items[i].label, ds.items[i].label);
    EXPECT_EQ(out.items[i].source_id, ds.items[i].source_id);
    EXPECT_EQ(out.items[i].augmented, ds.items[i].augmented);
  }
}

}  // namespace
}  // namespace chaoswave
