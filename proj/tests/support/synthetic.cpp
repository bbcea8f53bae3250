#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

namespace chaoswave::testing {

namespace {

void add_wave(Matrix& m, double amplitude, double period, double angle, double phase) {
  const double kx = std::cos(angle) * 2.0 * std::numbers::pi / period;
  const double ky = std::sin(angle) * 2.0 * std::numbers::pi / period;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      m(r, c) += amplitude * std::sin(kx * static_cast<double>(c) + ky * static_cast<double>(r) + phase);
    }
  }
}

}  // namespace

GrayImage texture_image(Label label, std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double s = static_cast<double>(size);
  Matrix m(size, size, 0.5);
  const double tau = 2.0 * std::numbers::pi;
  const double smooth_amp = label == Label::Benign ? 0.15 : 0.08;
  for (int k = 0; k < 2; ++k) {
    add_wave(m, smooth_amp, s * (0.25 + 0.25 * unit(rng)), tau * unit(rng), tau * unit(rng));
  }
  if (label == Label::Malignant) {
    add_wave(m, 0.2, 4.0 + 2.0 * unit(rng), tau * unit(rng), tau * unit(rng));
  }
  std::normal_distribution<double> noise(0.0, 0.02);
  for (double& v : m.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
  return {std::move(m), PixelDomain::Unit};
}

LabeledDataset texture_sources(std::size_t n_per_class, std::size_t size, std::uint64_t seed) {
  LabeledDataset ds;
  for (std::size_t i = 0; i < n_per_class; ++i) {
    for (Label label : {Label::Benign, Label::Malignant}) {
      const std::uint64_t item = seed * 1000003ULL + 2 * i + static_cast<std::uint64_t>(label);
      const std::string id = std::string(label == Label::Benign ? "b" : "m") + (i < 10 ? "0" : "") + std::to_string(i);
      ds.items.push_back({texture_image(label, size, item), label, id, false});
    }
  }
  return ds;
}

void write_texture_input_dir(const std::filesystem::path& dir, std::size_t n_per_class, std::size_t size,
                             std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const LabeledDataset ds = texture_sources(n_per_class, size, seed);
  std::ofstream labels(dir / "labels.csv", std::ios::binary);
  labels << "file,label\n";
  for (const auto& item : ds.items) {
    const std::string file = item.source_id + ".pgm";
    save_pgm(dir / file, item.image);
    labels << file << ',' << label_name(item.label) << '\n';
  }
}

LabeledDataset flat_vs_checkerboard(std::size_t count, std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.02);
  LabeledDataset ds;
  for (std::size_t i = 0; i < count; ++i) {
    const Label label = i % 2 == 0 ? Label::Benign : Label::Malignant;
    Matrix m(size, size, 0.5);
    if (label == Label::Malignant) {
      for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) m(r, c) = ((r / 4 + c / 4) % 2 == 0) ? 0.25 : 0.75;
      }
    }
    for (double& v : m.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
    ds.items.push_back({GrayImage{std::move(m), PixelDomain::Unit}, label, "s" + std::to_string(i), false});
  }
  return ds;
}

}  // namespace chaoswave::testing
