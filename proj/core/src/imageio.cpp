#include "chaoswave/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "chaoswave/errors.hpp"

namespace chaoswave {

std::string_view label_name(Label label) noexcept {
  return label == Label::Malignant ? "malignant" : "benign";
}

Label parse_label(std::string_view text) {
  if (text == "benign" || text == "B" || text == "0") return Label::Benign;
  if (text == "malignant" || text == "M" || text == "1") return Label::Malignant;
  throw InvalidInput("unknown label '" + std::string(text) + "'");
}

std::pair<std::size_t, std::size_t> LabeledDataset::class_counts() const noexcept {
  std::size_t malignant = 0;
  for (const auto& item : items) malignant += item.label == Label::Malignant ? 1 : 0;
  return {items.size() - malignant, malignant};
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

constexpr std::uint64_t kMaxPgmSide = 1u << 16;

class HeaderReader {
 public:
  // `base` is the offset of `bytes` within the file, for error reporting.
  HeaderReader(std::string_view bytes, std::size_t base) : bytes_(bytes), base_(base) {}

  std::size_t pos() const noexcept { return base_ + pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), value);
    if (ec != std::errc() || ptr == bytes_.data() + start) {
      throw FormatError(std::string("PGM: expected ") + what, base_ + start);
    }
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    return value;
  }

 private:
  std::string_view bytes_;
  std::size_t base_ = 0;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("PGM: missing magic number", 0);
  if (bytes[1] != '5') {
    throw FormatError(std::string("PGM: unsupported variant P") + bytes[1] + " (only binary P5)", 1);
  }
  HeaderReader reader(bytes.substr(2), 2);
  const std::uint64_t width = reader.read_uint("width");
  const std::uint64_t height = reader.read_uint("height");
  reader.skip_space_and_comments();
  const std::size_t maxval_pos = reader.pos();
  const std::uint64_t maxval = reader.read_uint("maxval");
  if (width == 0 || height == 0) throw FormatError("PGM: zero dimension", 2);
  if (width > kMaxPgmSide || height > kMaxPgmSide) throw FormatError("PGM: dimensions too large", 2);
  if (maxval != 255) throw FormatError("PGM: maxval must be 255, got " + std::to_string(maxval), maxval_pos);
  std::size_t offset = reader.pos();
  if (offset >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[offset]))) {
    throw FormatError("PGM: missing whitespace after header", offset);
  }
  ++offset;
  const std::uint64_t expected = width * height;
  if (bytes.size() - offset < expected) {
    throw FormatError("PGM: truncated payload, expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(bytes.size() - offset),
                      bytes.size());
  }
  GrayImage img{Matrix(height, width), PixelDomain::Raw8};
  for (std::size_t i = 0; i < expected; ++i) {
    img.pixels.data()[i] = static_cast<unsigned char>(bytes[offset + i]);
  }
  return img;
}

GrayImage load_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.pixels.size());
  const double scale = image.domain == PixelDomain::Unit ? 255.0 : 1.0;
  for (double v : image.pixels.data()) {
    const double q = std::clamp(std::round(v * scale), 0.0, 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::isnan(q) ? 0.0 : q)));
  }
  return out;
}

void save_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  const std::string bytes = encode_pgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

GrayImage resize_nearest(const GrayImage& image, std::size_t out_h, std::size_t out_w) {
  if (out_h == 0 || out_w == 0) throw InvalidInput("resize_nearest: output dimensions must be >= 1");
  if (image.pixels.empty()) throw InvalidInput("resize_nearest: empty image");
  const std::size_t h = image.height(), w = image.width();
  std::vector<std::size_t> col_map(out_w);
  for (std::size_t j = 0; j < out_w; ++j) {
    // Exact integer form of floor((j + 0.5) * W / out_w).
    col_map[j] = std::min(w - 1, ((2 * j + 1) * w) / (2 * out_w));
  }
  GrayImage out{Matrix(out_h, out_w), image.domain};
  for (std::size_t i = 0; i < out_h; ++i) {
    const std::size_t src_row = std::min(h - 1, ((2 * i + 1) * h) / (2 * out_h));
    for (std::size_t j = 0; j < out_w; ++j) out.pixels(i, j) = image.pixels(src_row, col_map[j]);
  }
  return out;
}

GrayImage normalize(const GrayImage& image) {
  if (image.domain != PixelDomain::Raw8) throw InvalidState("normalize: image is already normalized");
  GrayImage out{image.pixels, PixelDomain::Unit};
  for (double& v : out.pixels.data()) v /= 255.0;
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), m(r, c));
      if (c) out.put(',');
      out.write(buf, res.ptr - buf);
    }
    out.put('\n');
  }
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::size_t count = 0;
      std::size_t field_start = 0;
      while (field_start <= line.size()) {
        std::size_t comma = line.find(',', field_start);
        if (comma == std::string_view::npos) comma = line.size();
        std::string_view field = line.substr(field_start, comma - field_start);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
          throw FormatError("matrix CSV: bad number '" + std::string(field) + "'", pos + field_start);
        }
        values.push_back(v);
        ++count;
        field_start = comma + 1;
      }
      if (rows == 0) cols = count;
      if (count != cols) throw FormatError("matrix CSV: ragged row " + std::to_string(rows + 1), pos);
      ++rows;
    }
    pos = end + 1;
  }
  return Matrix(rows, cols, std::move(values));
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : fields) {
    while (!f.empty() && std::isspace(static_cast<unsigned char>(f.back()))) f.pop_back();
    while (!f.empty() && std::isspace(static_cast<unsigned char>(f.front()))) f.erase(f.begin());
  }
  return fields;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "path,label,source_id,augmented\n";
  for (const auto& e : entries) {
    out << e.path << ',' << label_name(e.label) << ',' << e.source_id << ',' << (e.augmented ? 1 : 0) << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open manifest " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line_no == 1 && fields[0] == "path") continue;
    if (fields.size() != 3 && fields.size() != 4) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected 3 or 4 columns", line_offset);
    }
    ManifestEntry e;
    e.path = fields[0];
    try {
      e.label = parse_label(fields[1]);
    } catch (const InvalidInput&) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": bad label '" + fields[1] + "'", line_offset);
    }
    e.source_id = fields[2];
    e.augmented = fields.size() == 4 && fields[3] == "1";
    entries.push_back(std::move(e));
  }
  return entries;
}

LabeledDataset load_manifest_dataset(const std::filesystem::path& manifest_path) {
  const auto entries = read_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  LabeledDataset ds;
  ds.items.reserve(entries.size());
  for (const auto& e : entries) {
    ds.items.push_back({normalize(load_pgm(base / e.path)), e.label, e.source_id, e.augmented});
  }
  return ds;
}

}  // namespace chaoswave
