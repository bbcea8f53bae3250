#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace chaoswave {

/// Constants of the n-scroll Chua system. The defaults produce an
/// eight-scroll attractor.
struct ChuaParams {
  double alpha = 10.814;
  double beta = 14.0;
  double a = 1.3;
  double b = 0.11;
  double c = 7.0;
  double d = 0.0;

  // Breakpoint 2ac between the sine and linear branches of q.
  double breakpoint() const noexcept { return 2.0 * a * c; }
  void validate() const;
};

struct ChaosState {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;

  bool finite() const noexcept;
  friend bool operator==(const ChaosState&, const ChaosState&) = default;
};

inline constexpr ChaosState kDefaultInitialState{0.1, 0.1, 0.1};
inline constexpr double kDefaultStepSize = 0.005;
inline constexpr std::uint64_t kDefaultBurnIn = 10000;
inline constexpr double kDivergenceBound = 1e3;

struct ChaosTrajectory {
  ChuaParams params;
  double step_size = kDefaultStepSize;
  std::uint64_t burn_in = 0;
  std::uint64_t stride = 1;
  std::vector<ChaosState> samples;  // post burn-in only

  // Simulation time of sample i, counted from the initial state.
  double time_of(std::size_t i) const noexcept;
};

double q_nonlinearity(double z1, const ChuaParams& params);

ChaosState derivatives(const ChaosState& state, const ChuaParams& params);

// One classical RK4 step.
ChaosState rk4_step(const ChaosState& state, const ChuaParams& params, double h);

/// Fixed-step RK4. Discards `burn_in` steps, then keeps every `stride`-th
/// state until `n_samples` are collected. Throws NumericalDivergence if any
/// component exceeds kDivergenceBound in magnitude.
ChaosTrajectory integrate(const ChaosState& initial, const ChuaParams& params, double step_size,
                          std::uint64_t burn_in, std::size_t n_samples, std::uint64_t stride = 1);

/// First `n` z3 values. With `normalize`, values are divided by max |z3|
/// over the whole trajectory (no-op for an all-zero trajectory).
std::vector<double> modulation_sequence(const ChaosTrajectory& traj, std::size_t n, bool normalize = false);

}  // namespace chaoswave
