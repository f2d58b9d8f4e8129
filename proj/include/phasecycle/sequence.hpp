#pragma once

// Timed pulse sequences (CP, CPMG, UDD, custom) and the noise model shared by
// the simulator and the pathway calculator. Times are in seconds, detunings
// in rad/s, angles in radians.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace phasecycle {

enum class SequenceKind { cp, cpmg, udd, custom };

std::string to_string(SequenceKind kind);
SequenceKind sequence_kind_from_string(const std::string& s);

struct PulseSpec {
  double time = 0.0;
  double nominal_flip = 0.0;
  double nominal_phase = 0.0;
  int phase_flag = 1;  // -1 adds pi to the pulse phase
};

struct ReadoutWindow {
  double start = 0.0;
  double end = 0.0;
  double step = 0.0;

  std::vector<double> sample_times() const;
};

struct PulseSequence {
  SequenceKind kind = SequenceKind::custom;
  unsigned m = 0;  // inversion pulses; pulses[0] is the preparation pulse
  std::vector<PulseSpec> pulses;
  ReadoutWindow readout;
  double echo_time = 0.0;  // nominal time of the desired echo (absolute)

  double last_pulse_time() const { return pulses.empty() ? 0.0 : pulses.back().time; }

  /// Nonnegative, nondecreasing pulse times; readout after the last pulse.
  void validate() const;
};

/// CP / CPMG: `timing` is tau, pulses at tau, 3 tau, ..., echo at 2 m tau.
/// UDD: `timing` is the total time t, pulses at t sin^2(n pi / (2(m+1))),
/// echo at t. The readout window spans [last pulse, last pulse + 3 d] with
/// step d / 50, d being the distance from the last pulse to the echo.
PulseSequence build_sequence(SequenceKind kind, unsigned m, double timing);

/// Copies the sequence with phase flags taken from one scheme row
/// (row[0] for the preparation pulse, row[j] for inversion pulse j).
PulseSequence with_phase_flags(PulseSequence seq, std::span<const std::int8_t> row);

/// Readout window of half-width `half_width` around the echo time.
PulseSequence with_readout_around_echo(PulseSequence seq, double half_width, double step);

struct NoiseModel {
  double t1 = std::numeric_limits<double>::infinity();
  double t2 = std::numeric_limits<double>::infinity();
  double detuning_sigma = 0.0;  // Gaussian ensemble width, rad/s
  double flip_error = 0.0;      // systematic fraction: angle = nominal (1 + flip_error)
  double phase_error = 0.0;     // systematic, radians
  double flip_jitter = 0.0;     // optional per-pulse Gaussian fraction
  double phase_jitter = 0.0;    // optional per-pulse Gaussian, radians
  std::uint64_t seed = 0;

  void validate() const;
  bool has_jitter() const { return flip_jitter > 0.0 || phase_jitter > 0.0; }

  static NoiseModel ideal() { return {}; }
};

struct PulseRotation {
  double angle = 0.0;
  double phase = 0.0;
};

/// Actual rotation applied for a pulse under the systematic errors plus an
/// optional per-pulse draw.
PulseRotation effective_rotation(const PulseSpec& pulse, const NoiseModel& noise,
                                 double flip_offset = 0.0, double phase_offset = 0.0);

/// Durations of the intervals 0..N for an N-pulse sequence measured at
/// `measure_time`: interval 0 precedes the first pulse, interval k follows
/// pulse k.
std::vector<double> interval_durations(const PulseSequence& seq, double measure_time);

}  // namespace phasecycle
