#include "chaoswave/modulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaoswave/errors.hpp"

namespace chaoswave {

void ModulationConfig::validate(std::size_t levels) const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InvalidInput("ModulationConfig: scale must be >= 0");
  for (std::size_t l : level_mask) {
    if (l < 1 || l > levels) {
      throw InvalidInput("ModulationConfig: level " + std::to_string(l) + " outside 1.." + std::to_string(levels));
    }
  }
}

std::size_t selected_detail_count(const WaveletPyramid& pyramid, const ModulationConfig& config) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < pyramid.details.size(); ++k) {
    if (!config.selects(k + 1)) continue;
    const auto& d = pyramid.details[k];
    n += d.lh.size() + d.hl.size() + d.hh.size();
  }
  return n;
}

WaveletPyramid modulate_pyramid(const WaveletPyramid& pyramid, const std::vector<double>& m,
                                const ModulationConfig& config) {
  pyramid.validate();
  config.validate(pyramid.levels);
  const std::size_t needed = selected_detail_count(pyramid, config);
  if (m.size() < needed) {
    throw InvalidInput("modulate_pyramid: sequence has " + std::to_string(m.size()) + " values, need " +
                       std::to_string(needed));
  }
  WaveletPyramid out = pyramid;
  std::size_t k = 0;
  for (std::size_t level = 0; level < out.details.size(); ++level) {
    if (!config.selects(level + 1)) continue;
    auto& d = out.details[level];
    for (Matrix* band : {&d.lh, &d.hl, &d.hh}) {
      for (double& v : band->data()) v += m[k++] * config.scale;
    }
  }
  return out;
}

Matrix enhance_image(const Matrix& image, const FilterBank& bank, std::size_t levels, const ModulationConfig& config,
                     const ChuaParams& params) {
  config.validate(levels);
  WaveletPyramid pyramid = dwt2d_forward(image, bank, levels);
  const std::size_t needed = selected_detail_count(pyramid, config);
  if (needed > 0) {
    const ChaosTrajectory traj =
        integrate(config.chaos_initial, params, config.chaos_step, config.chaos_burn_in, needed, config.chaos_stride);
    pyramid = modulate_pyramid(pyramid, modulation_sequence(traj, needed, config.normalize_sequence), config);
  }
  return dwt2d_inverse(pyramid, bank);
}

Matrix difference_map(const Matrix& original, const Matrix& enhanced) {
  if (!original.same_shape(enhanced)) throw InvalidInput("difference_map: shape mismatch");
  Matrix out(original.rows(), original.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::abs(enhanced.data()[i] - original.data()[i]);
  return out;
}

namespace {

// Largest absolute tap mass landing on one output sample after 2x upsampling:
// the max over the two output parities of the summed |taps| at that parity.
double parity_gain(const SymmetricFilter& f) {
  double even = 0.0, odd = 0.0;
  for (int n = -f.radius(); n <= f.radius(); ++n) (n % 2 == 0 ? even : odd) += std::abs(f[n]);
  return std::max(even, odd);
}

}  // namespace

double modulation_gain_bound(const FilterBank& bank, std::size_t levels, const ModulationConfig& config,
                             double max_abs_m) {
  const double gl = parity_gain(bank.synthesis_low);
  const double gh = parity_gain(bank.synthesis_high);
  const double detail_gain = 2.0 * gl * gh + gh * gh;
  double bound = 0.0;
  double coarse = 1.0;  // gain of the low-pass synthesis stages above level k
  for (std::size_t level = 1; level <= levels; ++level) {
    if (config.selects(level)) bound += coarse * detail_gain;
    coarse *= gl * gl;
  }
  return bound * config.scale * max_abs_m;
}

}  // namespace chaoswave
