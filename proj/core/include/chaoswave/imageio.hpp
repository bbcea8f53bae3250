#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chaoswave/matrix.hpp"

namespace chaoswave {

enum class PixelDomain {
  Raw8,  // integer values 0..255 stored as doubles
  Unit,  // reals, nominally in [0,1]
};

struct GrayImage {
  Matrix pixels;
  PixelDomain domain = PixelDomain::Raw8;

  std::size_t height() const noexcept { return pixels.rows(); }
  std::size_t width() const noexcept { return pixels.cols(); }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Malignant is the positive class.
enum class Label : int { Benign = 0, Malignant = 1 };

std::string_view label_name(Label label) noexcept;
Label parse_label(std::string_view text);

struct LabeledItem {
  GrayImage image;
  Label label = Label::Benign;
  std::string source_id;
  bool augmented = false;
};

struct LabeledDataset {
  std::vector<LabeledItem> items;

  std::size_t size() const noexcept { return items.size(); }
  // (benign, malignant)
  std::pair<std::size_t, std::size_t> class_counts() const noexcept;
};

/// Binary PGM (P5) with maxval 255. Returns a Raw8 image.
GrayImage load_pgm(const std::filesystem::path& path);
GrayImage decode_pgm(std::string_view bytes);
/// Unit images are clamped to [0,1] and rounded to 8 bits; Raw8 values are
/// rounded and clamped to 0..255.
void save_pgm(const std::filesystem::path& path, const GrayImage& image);
std::string encode_pgm(const GrayImage& image);

/// Center-aligned nearest neighbour:
/// out(i,j) = in(floor((i+0.5)*H/out_h), floor((j+0.5)*W/out_w)).
GrayImage resize_nearest(const GrayImage& image, std::size_t out_h, std::size_t out_w);

/// Raw8 -> Unit by division by 255. Throws InvalidState on a Unit image.
GrayImage normalize(const GrayImage& image);

/// One matrix row per line, comma-separated decimal reals.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  Label label = Label::Benign;
  std::string source_id;
  bool augmented = false;
};

/// CSV with header `path,label,source_id,augmented`. Readers also accept the
/// three-column form, treating every row as an original.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Loads every manifest image and normalizes it to the Unit domain.
LabeledDataset load_manifest_dataset(const std::filesystem::path& manifest_path);

}  // namespace chaoswave
