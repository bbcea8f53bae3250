#include "chaoswave/wavelet.hpp"

#include <algorithm>
#include <span>
#include <string>

#include "chaoswave/errors.hpp"
#include "chaoswave/imageio.hpp"

namespace chaoswave {

double SymmetricFilter::tap_sum() const noexcept {
  if (half_.empty()) return 0.0;
  double s = half_[0];
  for (std::size_t k = 1; k < half_.size(); ++k) s += 2.0 * half_[k];
  return s;
}

FilterBank default_cdf97() {
  FilterBank bank;
  bank.analysis_low = SymmetricFilter({0.602949018236360, 0.266864118442875, -0.078223266528990,
                                       -0.016864118442875, 0.026748757410810});
  bank.analysis_high =
      SymmetricFilter({1.115087052457000, -0.591271763114250, -0.057543526228500, 0.091271763114250});
  bank.synthesis_low =
      SymmetricFilter({1.115087052457000, 0.591271763114250, -0.057543526228500, -0.091271763114250});
  bank.synthesis_high = SymmetricFilter({0.602949018236360, -0.266864118442875, -0.078223266528990,
                                         0.016864118442875, 0.026748757410810});
  return bank;
}

namespace {

constexpr int kPad = 4;

// Whole-point symmetric reflection: x[-i] = x[i], x[n-1+i] = x[n-1-i].
std::size_t mirror(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < n ? i : period - i);
}

// Fills `ext` (size n + 2*kPad) with the symmetrically extended signal.
void extend(std::span<const double> x, std::vector<double>& ext) {
  const long n = static_cast<long>(x.size());
  ext.resize(x.size() + 2 * kPad);
  for (long i = -kPad; i < n + kPad; ++i) ext[static_cast<std::size_t>(i + kPad)] = x[mirror(i, n)];
}

struct Scratch {
  std::vector<double> ext;
  std::vector<double> ext2;
  std::vector<double> up_low;
  std::vector<double> up_high;
};

// x (length 2m) -> low (m) and high (m).
void analyze(std::span<const double> x, std::span<double> low, std::span<double> high, const FilterBank& bank,
             Scratch& s) {
  extend(x, s.ext);
  const double* e = s.ext.data() + kPad;
  const int rl = bank.analysis_low.radius();
  const int rh = bank.analysis_high.radius();
  for (std::size_t k = 0; k < low.size(); ++k) {
    const long even = static_cast<long>(2 * k);
    double acc = 0.0;
    for (int n = -rl; n <= rl; ++n) acc += bank.analysis_low[n] * e[even - n];
    low[k] = acc;
    acc = 0.0;
    for (int n = -rh; n <= rh; ++n) acc += bank.analysis_high[n] * e[even + 1 - n];
    high[k] = acc;
  }
}

// low (m) and high (m) -> x (length 2m).
void synthesize(std::span<const double> low, std::span<const double> high, std::span<double> x,
                const FilterBank& bank, Scratch& s) {
  const std::size_t n = x.size();
  s.up_low.assign(n, 0.0);
  s.up_high.assign(n, 0.0);
  for (std::size_t k = 0; k < low.size(); ++k) {
    s.up_low[2 * k] = low[k];
    s.up_high[2 * k + 1] = high[k];
  }
  extend(s.up_low, s.ext);
  extend(s.up_high, s.ext2);
  const double* el = s.ext.data() + kPad;
  const double* eh = s.ext2.data() + kPad;
  const int rl = bank.synthesis_low.radius();
  const int rh = bank.synthesis_high.radius();
  for (std::size_t m = 0; m < n; ++m) {
    const long i = static_cast<long>(m);
    double acc = 0.0;
    for (int t = -rl; t <= rl; ++t) acc += bank.synthesis_low[t] * el[i - t];
    for (int t = -rh; t <= rh; ++t) acc += bank.synthesis_high[t] * eh[i - t];
    x[m] = acc;
  }
}

void check_bank(const FilterBank& bank) {
  if (bank.analysis_low.radius() > kPad || bank.analysis_high.radius() > kPad ||
      bank.synthesis_low.radius() > kPad || bank.synthesis_high.radius() > kPad ||
      bank.analysis_low.half().empty() || bank.analysis_high.half().empty() ||
      bank.synthesis_low.half().empty() || bank.synthesis_high.half().empty()) {
    throw InvalidInput("filter bank taps must have radius 0..4");
  }
}

// One separable level in place on the top-left `rows` x `cols` block of `work`.
void forward_level(Matrix& work, std::size_t rows, std::size_t cols, const FilterBank& bank, Scratch& s) {
  std::vector<double> line(std::max(rows, cols));
  std::vector<double> low(std::max(rows, cols) / 2);
  std::vector<double> high(low.size());
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(work.row(r).begin(), cols, line.begin());
    analyze({line.data(), cols}, {low.data(), cols / 2}, {high.data(), cols / 2}, bank, s);
    std::copy_n(low.begin(), cols / 2, work.row(r).begin());
    std::copy_n(high.begin(), cols / 2, work.row(r).begin() + static_cast<long>(cols / 2));
  }
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) line[r] = work(r, c);
    analyze({line.data(), rows}, {low.data(), rows / 2}, {high.data(), rows / 2}, bank, s);
    for (std::size_t r = 0; r < rows / 2; ++r) {
      work(r, c) = low[r];
      work(r + rows / 2, c) = high[r];
    }
  }
}

void inverse_level(Matrix& work, std::size_t rows, std::size_t cols, const FilterBank& bank, Scratch& s) {
  std::vector<double> line(std::max(rows, cols));
  std::vector<double> low(std::max(rows, cols) / 2);
  std::vector<double> high(low.size());
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows / 2; ++r) {
      low[r] = work(r, c);
      high[r] = work(r + rows / 2, c);
    }
    synthesize({low.data(), rows / 2}, {high.data(), rows / 2}, {line.data(), rows}, bank, s);
    for (std::size_t r = 0; r < rows; ++r) work(r, c) = line[r];
  }
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = work.row(r);
    std::copy_n(row.begin(), cols / 2, low.begin());
    std::copy_n(row.begin() + static_cast<long>(cols / 2), cols / 2, high.begin());
    synthesize({low.data(), cols / 2}, {high.data(), cols / 2}, {line.data(), cols}, bank, s);
    std::copy_n(line.begin(), cols, row.begin());
  }
}

Matrix extract(const Matrix& m, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(m.row(r0 + r).begin() + static_cast<long>(c0), cols, out.row(r).begin());
  }
  return out;
}

void place(Matrix& m, const Matrix& block, std::size_t r0, std::size_t c0) {
  for (std::size_t r = 0; r < block.rows(); ++r) {
    std::copy(block.row(r).begin(), block.row(r).end(), m.row(r0 + r).begin() + static_cast<long>(c0));
  }
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> dwt1d_forward(const std::vector<double>& signal,
                                                                  const FilterBank& bank) {
  if (signal.empty() || signal.size() % 2 != 0) {
    throw InvalidInput("dwt1d_forward: signal length must be even and >= 2, got " + std::to_string(signal.size()));
  }
  check_bank(bank);
  Scratch s;
  std::vector<double> low(signal.size() / 2), high(signal.size() / 2);
  analyze(signal, low, high, bank, s);
  return {std::move(low), std::move(high)};
}

std::vector<double> dwt1d_inverse(const std::vector<double>& approx, const std::vector<double>& detail,
                                  const FilterBank& bank) {
  if (approx.empty() || approx.size() != detail.size()) {
    throw InvalidInput("dwt1d_inverse: approx and detail must have equal nonzero length");
  }
  check_bank(bank);
  Scratch s;
  std::vector<double> out(2 * approx.size());
  synthesize(approx, detail, out, bank, s);
  return out;
}

std::size_t WaveletPyramid::coefficient_count() const noexcept {
  std::size_t n = approx.size();
  for (const auto& d : details) n += d.lh.size() + d.hl.size() + d.hh.size();
  return n;
}

void WaveletPyramid::validate() const {
  if (levels == 0 || details.size() != levels) throw InvalidInput("pyramid: detail level count mismatch");
  const std::size_t div = std::size_t{1} << levels;
  if (source_rows == 0 || source_cols == 0 || source_rows % div != 0 || source_cols % div != 0) {
    throw InvalidInput("pyramid: source shape not divisible by 2^levels");
  }
  if (approx.rows() != source_rows / div || approx.cols() != source_cols / div) {
    throw InvalidInput("pyramid: approximation band has wrong shape");
  }
  for (std::size_t k = 0; k < levels; ++k) {
    const std::size_t r = source_rows >> (k + 1);
    const std::size_t c = source_cols >> (k + 1);
    const auto& d = details[k];
    for (const Matrix* m : {&d.lh, &d.hl, &d.hh}) {
      if (m->rows() != r || m->cols() != c) {
        throw InvalidInput("pyramid: detail band at level " + std::to_string(k + 1) + " has wrong shape");
      }
    }
  }
}

WaveletPyramid dwt2d_forward(const Matrix& image, const FilterBank& bank, std::size_t levels) {
  if (levels == 0) throw InvalidInput("dwt2d_forward: levels must be positive");
  if (levels >= 8 * sizeof(std::size_t) - 1) throw InvalidInput("dwt2d_forward: too many levels");
  const std::size_t div = std::size_t{1} << levels;
  if (image.rows() == 0 || image.cols() == 0 || image.rows() % div != 0 || image.cols() % div != 0) {
    throw InvalidInput("dwt2d_forward: image " + std::to_string(image.rows()) + "x" + std::to_string(image.cols()) +
                       " not divisible by 2^" + std::to_string(levels));
  }
  check_bank(bank);

  WaveletPyramid p;
  p.levels = levels;
  p.source_rows = image.rows();
  p.source_cols = image.cols();
  p.details.resize(levels);

  Matrix work = image;
  Scratch s;
  std::size_t rows = image.rows(), cols = image.cols();
  for (std::size_t k = 0; k < levels; ++k) {
    forward_level(work, rows, cols, bank, s);
    const std::size_t hr = rows / 2, hc = cols / 2;
    p.details[k].hl = extract(work, 0, hc, hr, hc);
    p.details[k].lh = extract(work, hr, 0, hr, hc);
    p.details[k].hh = extract(work, hr, hc, hr, hc);
    rows = hr;
    cols = hc;
  }
  p.approx = extract(work, 0, 0, rows, cols);
  return p;
}

Matrix dwt2d_inverse(const WaveletPyramid& pyramid, const FilterBank& bank) {
  pyramid.validate();
  check_bank(bank);
  Matrix work(pyramid.source_rows, pyramid.source_cols);
  place(work, pyramid.approx, 0, 0);
  Scratch s;
  for (std::size_t k = pyramid.levels; k-- > 0;) {
    const std::size_t rows = pyramid.source_rows >> k;
    const std::size_t cols = pyramid.source_cols >> k;
    const std::size_t hr = rows / 2, hc = cols / 2;
    place(work, pyramid.details[k].hl, 0, hc);
    place(work, pyramid.details[k].lh, hr, 0);
    place(work, pyramid.details[k].hh, hr, hc);
    inverse_level(work, rows, cols, bank, s);
  }
  return work;
}

void dump_pyramid_csv(const WaveletPyramid& pyramid, const std::filesystem::path& dir) {
  pyramid.validate();
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "approx.csv", pyramid.approx);
  for (std::size_t k = 0; k < pyramid.levels; ++k) {
    const std::string stem = "level" + std::to_string(k + 1) + "_";
    write_matrix_csv(dir / (stem + "lh.csv"), pyramid.details[k].lh);
    write_matrix_csv(dir / (stem + "hl.csv"), pyramid.details[k].hl);
    write_matrix_csv(dir / (stem + "hh.csv"), pyramid.details[k].hh);
  }
}

}  // namespace chaoswave
