#include "chaoswave/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chaoswave/errors.hpp"

namespace chaoswave {

void ChuaParams::validate() const {
  if (!(a > 0.0)) throw InvalidInput("ChuaParams: a must be positive");
  for (double v : {alpha, beta, a, b, c, d}) {
    if (!std::isfinite(v)) throw InvalidInput("ChuaParams: non-finite constant");
  }
}

bool ChaosState::finite() const noexcept { return std::isfinite(z1) && std::isfinite(z2) && std::isfinite(z3); }

double ChaosTrajectory::time_of(std::size_t i) const noexcept {
  return step_size * static_cast<double>(burn_in + (i + 1) * stride);
}

double q_nonlinearity(double z1, const ChuaParams& p) {
  const double bp = p.breakpoint();
  const double slope = p.b * std::numbers::pi / (2.0 * p.a);
  if (z1 >= bp) return slope * (z1 - bp);
  if (z1 <= -bp) return slope * (z1 + bp);
  return -p.b * std::sin(std::numbers::pi * z1 / (2.0 * p.a) + p.d);
}

ChaosState derivatives(const ChaosState& s, const ChuaParams& p) {
  return {p.alpha * (s.z2 - q_nonlinearity(s.z1, p)), s.z1 - s.z2 + s.z3, -p.beta * s.z2};
}

ChaosState rk4_step(const ChaosState& s, const ChuaParams& p, double h) {
  const auto axpy = [](const ChaosState& x, double t, const ChaosState& k) {
    return ChaosState{x.z1 + t * k.z1, x.z2 + t * k.z2, x.z3 + t * k.z3};
  };
  const ChaosState k1 = derivatives(s, p);
  const ChaosState k2 = derivatives(axpy(s, h / 2, k1), p);
  const ChaosState k3 = derivatives(axpy(s, h / 2, k2), p);
  const ChaosState k4 = derivatives(axpy(s, h, k3), p);
  return {s.z1 + h / 6 * (k1.z1 + 2 * k2.z1 + 2 * k3.z1 + k4.z1),
          s.z2 + h / 6 * (k1.z2 + 2 * k2.z2 + 2 * k3.z2 + k4.z2),
          s.z3 + h / 6 * (k1.z3 + 2 * k2.z3 + 2 * k3.z3 + k4.z3)};
}

ChaosTrajectory integrate(const ChaosState& initial, const ChuaParams& params, double step_size,
                          std::uint64_t burn_in, std::size_t n_samples, std::uint64_t stride) {
  params.validate();
  if (!(step_size > 0.0 && step_size <= 0.1)) {
    throw InvalidInput("integrate: step_size must lie in (0, 0.1], got " + std::to_string(step_size));
  }
  if (n_samples == 0) throw InvalidInput("integrate: n_samples must be >= 1");
  if (stride == 0) throw InvalidInput("integrate: stride must be >= 1");
  if (!initial.finite()) throw InvalidInput("integrate: non-finite initial state");

  ChaosTrajectory traj;
  traj.params = params;
  traj.step_size = step_size;
  traj.burn_in = burn_in;
  traj.stride = stride;
  traj.samples.reserve(n_samples);

  const auto bounded = [](const ChaosState& s) {
    return std::abs(s.z1) <= kDivergenceBound && std::abs(s.z2) <= kDivergenceBound &&
           std::abs(s.z3) <= kDivergenceBound;
  };

  ChaosState state = initial;
  const std::uint64_t total = burn_in + static_cast<std::uint64_t>(n_samples) * stride;
  for (std::uint64_t step = 1; step <= total; ++step) {
    state = rk4_step(state, params, step_size);
    if (!state.finite() || !bounded(state)) {
      throw NumericalDivergence("Chua integration diverged", step);
    }
    if (step > burn_in && (step - burn_in) % stride == 0) traj.samples.push_back(state);
  }
  return traj;
}

std::vector<double> modulation_sequence(const ChaosTrajectory& traj, std::size_t n, bool normalize) {
  if (n > traj.samples.size()) {
    throw InvalidInput("modulation_sequence: requested " + std::to_string(n) + " values from a trajectory of " +
                       std::to_string(traj.samples.size()));
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = traj.samples[i].z3;
  if (normalize) {
    double peak = 0.0;
    for (const auto& s : traj.samples) peak = std::max(peak, std::abs(s.z3));
    if (peak > 0.0) {
      for (double& v : out) v /= peak;
    }
  }
  return out;
}

}  // namespace chaoswave
