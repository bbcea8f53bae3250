#pragma once

#include <cstddef>
#include <filesystem>
#include <utility>
#include <vector>

#include "chaoswave/matrix.hpp"

namespace chaoswave {

/// Odd-length filter symmetric about tap 0. `half[k]` holds the tap at
/// indices +k and -k, so a 9-tap filter has half.size() == 5.
class SymmetricFilter {
 public:
  SymmetricFilter() = default;
  explicit SymmetricFilter(std::vector<double> half) : half_(std::move(half)) {}

  int radius() const noexcept { return static_cast<int>(half_.size()) - 1; }
  std::size_t length() const noexcept { return 2 * half_.size() - 1; }
  double operator[](int n) const { return half_[static_cast<std::size_t>(n < 0 ? -n : n)]; }
  double tap_sum() const noexcept;
  const std::vector<double>& half() const noexcept { return half_; }

 private:
  std::vector<double> half_;
};

/// Analysis/synthesis filter quadruple of a biorthogonal two-channel bank.
/// The high-pass branch is sampled on odd positions (2k+1) and the low-pass
/// branch on even positions (2k).
struct FilterBank {
  SymmetricFilter analysis_low;    // 9 taps
  SymmetricFilter analysis_high;   // 7 taps
  SymmetricFilter synthesis_low;   // 7 taps
  SymmetricFilter synthesis_high;  // 9 taps
};

/// CDF 9/7 taps: analysis low-pass has unit DC gain, synthesis low-pass has
/// DC gain 2.
FilterBank default_cdf97();

struct DetailBands {
  Matrix lh;  // horizontal low-pass, vertical high-pass
  Matrix hl;  // horizontal high-pass, vertical low-pass
  Matrix hh;
};

/// Multi-level 2-D decomposition. `details[0]` is the finest level (level 1).
struct WaveletPyramid {
  std::size_t levels = 0;
  Matrix approx;
  std::vector<DetailBands> details;
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;

  std::size_t coefficient_count() const noexcept;
  // Throws InvalidInput if band shapes disagree with levels/source shape.
  void validate() const;
};

std::pair<std::vector<double>, std::vector<double>> dwt1d_forward(const std::vector<double>& signal,
                                                                  const FilterBank& bank);
std::vector<double> dwt1d_inverse(const std::vector<double>& approx, const std::vector<double>& detail,
                                  const FilterBank& bank);

WaveletPyramid dwt2d_forward(const Matrix& image, const FilterBank& bank, std::size_t levels);
Matrix dwt2d_inverse(const WaveletPyramid& pyramid, const FilterBank& bank);

/// Writes approx.csv and level<k>_{lh,hl,hh}.csv into `dir` (created if needed).
void dump_pyramid_csv(const WaveletPyramid& pyramid, const std::filesystem::path& dir);

}  // namespace chaoswave
