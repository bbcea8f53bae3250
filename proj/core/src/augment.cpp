#include "chaoswave/augment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "chaoswave/errors.hpp"
#include "chaoswave/seed.hpp"

namespace chaoswave {

void AugmentationPlan::validate() const {
  if (target_count == 0) throw InvalidInput("AugmentationPlan: target_count must be positive");
  if (!(brightness_min >= 0.2 && brightness_max <= 1.0 && brightness_min <= brightness_max)) {
    throw InvalidInput("AugmentationPlan: brightness range must lie within [0.2, 1.0]");
  }
  if (!(vertical_scale_factor > 0.0 && vertical_scale_factor <= 1.0)) {
    throw InvalidInput("AugmentationPlan: vertical_scale_factor must lie in (0, 1]");
  }
}

GrayImage hflip(const GrayImage& image) {
  GrayImage out = image;
  for (std::size_t r = 0; r < out.height(); ++r) std::ranges::reverse(out.pixels.row(r));
  return out;
}

GrayImage vflip(const GrayImage& image) {
  GrayImage out = image;
  const std::size_t h = image.height();
  for (std::size_t r = 0; r < h; ++r) {
    std::ranges::copy(image.pixels.row(h - 1 - r), out.pixels.row(r).begin());
  }
  return out;
}

GrayImage rotate90(const GrayImage& image) {
  const std::size_t h = image.height(), w = image.width();
  GrayImage out{Matrix(w, h), image.domain};
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) out.pixels(c, h - 1 - r) = image.pixels(r, c);
  }
  return out;
}

GrayImage adjust_brightness(const GrayImage& image, double factor) {
  if (image.domain != PixelDomain::Unit) throw InvalidState("adjust_brightness: expects a normalized image");
  if (!(factor >= 0.0)) throw InvalidInput("adjust_brightness: factor must be non-negative");
  GrayImage out = image;
  for (double& v : out.pixels.data()) v = std::clamp(factor * v, 0.0, 1.0);
  return out;
}

GrayImage vertical_scale(const GrayImage& image, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) throw InvalidInput("vertical_scale: factor must lie in (0, 1]");
  const std::size_t h = image.height(), w = image.width();
  const std::size_t squashed_h = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(h * factor)));
  const GrayImage squashed = resize_nearest(image, squashed_h, w);
  const std::size_t top = (h - squashed_h) / 2;
  GrayImage out{Matrix(h, w), image.domain};
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t src = r < top ? 0 : std::min(r - top, squashed_h - 1);
    std::ranges::copy(squashed.pixels.row(src), out.pixels.row(r).begin());
  }
  return out;
}

namespace {

GrayImage apply_op(const GrayImage& image, AugOp op, const AugmentationPlan& plan, std::mt19937_64& rng) {
  switch (op) {
    case AugOp::HorizontalFlip:
      return hflip(image);
    case AugOp::VerticalFlip:
      return vflip(image);
    case AugOp::Rotate90:
      return rotate90(image);
    case AugOp::Brightness: {
      std::uniform_real_distribution<double> dist(plan.brightness_min, plan.brightness_max);
      return adjust_brightness(image, dist(rng));
    }
    case AugOp::VerticalScale:
      return vertical_scale(image, plan.vertical_scale_factor);
  }
  throw InvalidInput("unknown augmentation op");
}

}  // namespace

LabeledDataset augment(const LabeledDataset& dataset, const AugmentationPlan& plan) {
  plan.validate();
  if (dataset.items.empty()) throw InvalidInput("augment: dataset is empty");
  if (plan.target_count < dataset.size()) {
    throw InvalidInput("augment: target_count " + std::to_string(plan.target_count) + " is below source count " +
                       std::to_string(dataset.size()));
  }
  for (const auto& item : dataset.items) {
    if (item.image.domain != PixelDomain::Unit) throw InvalidState("augment: images must be normalized first");
  }
  const bool rotates = std::ranges::find(plan.ops, AugOp::Rotate90) != plan.ops.end();
  if (rotates) {
    for (const auto& item : dataset.items) {
      if (item.image.height() != item.image.width()) {
        throw InvalidInput("augment: rotate_90 requires square images (resize first)");
      }
    }
  }

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[static_cast<int>(dataset.items[i].label)].push_back(i);
  }
  // Proportional split of the target, never below a class's source count.
  const std::size_t n0 = by_class[0].size(), n1 = by_class[1].size();
  std::size_t target[2];
  target[0] = std::clamp(plan.target_count * n0 / dataset.size(), n0, plan.target_count - n1);
  target[1] = plan.target_count - target[0];

  LabeledDataset out;
  out.items.reserve(plan.target_count);
  for (const auto& item : dataset.items) out.items.push_back({item.image, item.label, item.source_id, false});

  std::uint64_t index = 0;
  for (int c = 0; c < 2; ++c) {
    const auto& pool = by_class[c];
    for (std::size_t n = pool.size(); n < target[c]; ++n, ++index) {
      std::mt19937_64 rng(item_seed(plan.seed, index));
      const auto& src = dataset.items[pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]];
      GrayImage img = src.image;
      if (!plan.ops.empty()) {
        std::vector<AugOp> ops = plan.ops;
        std::shuffle(ops.begin(), ops.end(), rng);
        const std::size_t max_ops = std::min<std::size_t>(3, ops.size());
        const std::size_t count = std::uniform_int_distribution<std::size_t>(1, max_ops)(rng);
        for (std::size_t k = 0; k < count; ++k) img = apply_op(img, ops[k], plan, rng);
      }
      out.items.push_back({std::move(img), src.label, src.source_id, true});
    }
  }
  return out;
}

}  // namespace chaoswave
