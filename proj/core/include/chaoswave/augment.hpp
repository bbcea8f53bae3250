#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "chaoswave/imageio.hpp"

namespace chaoswave {

enum class AugOp { HorizontalFlip, VerticalFlip, Rotate90, Brightness, VerticalScale };

struct AugmentationPlan {
  std::size_t target_count = 2048;
  std::uint64_t seed = 0;
  std::vector<AugOp> ops{AugOp::HorizontalFlip, AugOp::VerticalFlip, AugOp::Rotate90, AugOp::Brightness,
                         AugOp::VerticalScale};
  double brightness_min = 0.2;
  double brightness_max = 1.0;
  double vertical_scale_factor = 0.5;

  void validate() const;
};

GrayImage hflip(const GrayImage& image);
GrayImage vflip(const GrayImage& image);
// Clockwise quarter turn; swaps height and width.
GrayImage rotate90(const GrayImage& image);
// p -> clamp(factor * p, 0, 1). Unit images only.
GrayImage adjust_brightness(const GrayImage& image, double factor);
// Nearest-neighbour squash of the height by `factor`, then edge-replicated
// padding (split top/bottom) back to the original height.
GrayImage vertical_scale(const GrayImage& image, double factor);

/// Keeps every source item (augmented=false) and adds seeded variants until
/// the dataset holds target_count items. Per-class targets are proportional to
/// the source class counts, so a balanced source yields balanced output. Each
/// variant picks a source of its class and a random composition of 1..3 ops;
/// its generator is seeded from (plan.seed, output index) alone.
LabeledDataset augment(const LabeledDataset& dataset, const AugmentationPlan& plan);

}  // namespace chaoswave
