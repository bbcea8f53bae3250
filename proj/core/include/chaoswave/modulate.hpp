#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "chaoswave/chaos.hpp"
#include "chaoswave/matrix.hpp"
#include "chaoswave/wavelet.hpp"

namespace chaoswave {

struct ModulationConfig {
  double scale = 0.01;
  // 1-based levels to modulate; empty means every level.
  std::set<std::size_t> level_mask;
  double chaos_step = kDefaultStepSize;
  std::uint64_t chaos_burn_in = kDefaultBurnIn;
  std::uint64_t chaos_stride = 1;
  ChaosState chaos_initial = kDefaultInitialState;
  bool normalize_sequence = false;

  void validate(std::size_t levels) const;
  bool selects(std::size_t level) const noexcept { return level_mask.empty() || level_mask.contains(level); }
};

/// Number of detail coefficients the config selects in `pyramid`.
std::size_t selected_detail_count(const WaveletPyramid& pyramid, const ModulationConfig& config);

/// Adds m[k]*scale to each selected detail coefficient, walking levels
/// finest-first, bands LH, HL, HH, row-major within a band. The
/// approximation band and unselected levels are copied unchanged.
WaveletPyramid modulate_pyramid(const WaveletPyramid& pyramid, const std::vector<double>& m,
                                const ModulationConfig& config);

/// Forward transform, modulation by a fresh trajectory started from
/// config.chaos_initial, inverse transform. No clamping is applied.
Matrix enhance_image(const Matrix& image, const FilterBank& bank, std::size_t levels, const ModulationConfig& config,
                     const ChuaParams& params);

Matrix difference_map(const Matrix& original, const Matrix& enhanced);

/// Upper bound on |enhance_image(x) - x| per pixel for a modulation sequence
/// bounded by `max_abs_m`, derived from synthesis-filter absolute tap sums.
double modulation_gain_bound(const FilterBank& bank, std::size_t levels, const ModulationConfig& config,
                             double max_abs_m);

}  // namespace chaoswave
