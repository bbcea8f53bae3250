#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "chaoswave/imageio.hpp"

namespace chaoswave::testing {

// Benign: smooth low-frequency blobs. Malignant: the same kind of background
// plus fine oriented stripes (period 4-6 px). Unit domain.
GrayImage texture_image(Label label, std::size_t size, std::uint64_t seed);

// n_per_class items of each class, source ids "b00", "m00", ...
LabeledDataset texture_sources(std::size_t n_per_class, std::size_t size, std::uint64_t seed);

// Writes the sources as 8-bit PGMs plus labels.csv into `dir`.
void write_texture_input_dir(const std::filesystem::path& dir, std::size_t n_per_class, std::size_t size,
                             std::uint64_t seed);

// Flat grey (benign) vs checkerboard (malignant), with mild noise.
LabeledDataset flat_vs_checkerboard(std::size_t count, std::size_t size, std::uint64_t seed);

}  // namespace chaoswave::testing
