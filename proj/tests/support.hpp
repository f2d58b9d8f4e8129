#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "phasecycle/qubit.hpp"
#include "phasecycle/sequence.hpp"

namespace phasecycle::testing {

inline constexpr double kPi = std::numbers::pi;

struct RandomCase {
  PulseSequence seq;
  NoiseModel noise;
  double detuning = 0.0;
  double measure_time = 0.0;
};

// Random pulse train of 1..max_pulses pulses with errors, detuning and
// relaxation drawn from the ranges used across the oracle tests.
inline RandomCase random_case(std::mt19937_64& rng, unsigned max_pulses = 6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomCase c;
  const unsigned n = 1 + static_cast<unsigned>(rng() % max_pulses);
  const double tau = 1.0;
  double t = 0.0;
  for (unsigned k = 0; k < n; ++k) {
    if (k > 0) t += tau * (0.2 + 2.0 * u(rng));
    const double flip = k == 0 ? kPi / 2 : kPi * (0.3 + 0.9 * u(rng));
    c.seq.pulses.push_back({t, flip, 2 * kPi * u(rng), u(rng) < 0.5 ? 1 : -1});
  }
  c.seq.m = n - 1;
  c.seq.echo_time = t + tau * 2.0 * u(rng);
  c.measure_time = c.seq.echo_time;
  c.noise.flip_error = -0.3 + 0.6 * u(rng);
  c.noise.phase_error = -0.2 + 0.4 * u(rng);
  c.noise.t2 = tau * std::pow(10.0, 3.0 * u(rng) - 0.5);
  c.noise.t1 = c.noise.t2 * std::pow(10.0, 3.0 * u(rng));
  c.detuning = (-5.0 + 10.0 * u(rng)) / tau;
  return c;
}

inline double max_abs_diff(const QubitState& a, const QubitState& b) {
  return std::max(std::abs(a.p1 - b.p1), std::abs(a.c_plus - b.c_plus));
}

}  // namespace phasecycle::testing
