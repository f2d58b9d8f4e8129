#pragma once

// Event-based propagation of a single qubit through instantaneous pulses and
// closed-form free evolution (detuning, T2 dephasing, T1 decay toward the
// ground state), and execution of whole phase-cycling schemes over a static
// Gaussian detuning ensemble.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phasecycle/qubit.hpp"
#include "phasecycle/schemes.hpp"
#include "phasecycle/sequence.hpp"

namespace phasecycle {

QubitState apply_rotation(const QubitState& state, const PulseRotation& rotation);
QubitState apply_pulse(const QubitState& state, const PulseSpec& pulse, const NoiseModel& noise);
QubitState free_evolve(const QubitState& state, double duration, double detuning, const NoiseModel& noise);

/// Per-pulse jitter draws for one ensemble member.
struct PulseOffsets {
  std::vector<double> flip;
  std::vector<double> phase;
};

struct CircuitResult {
  std::vector<double> times;
  std::vector<BlochVector> trace;  // <sigma_x>, <sigma_y>, <sigma_z> at each readout time
  QubitState final_state;          // at the measurement time
  double measure_time = 0.0;
};

/// Measurement time used for final states: the echo time, or the last pulse
/// when the echo time precedes it.
double measure_time(const PulseSequence& seq);

/// State right after the last pulse, plus the trace over the sequence's
/// readout window and the state at measure_time(seq). `row` (m+1 flags)
/// overrides the sequence's phase flags when non-empty.
CircuitResult run_circuit(const PulseSequence& seq, std::span<const std::int8_t> row, const NoiseModel& noise,
                          double detuning, const PulseOffsets* offsets = nullptr);

/// State at `at` (>= last pulse) for one ensemble member; no trace sampling.
QubitState propagate(const PulseSequence& seq, const NoiseModel& noise, double detuning, double at,
                     const PulseOffsets* offsets = nullptr);

struct SchemeRunOptions {
  std::size_t ensemble_size = 1;
  unsigned workers = 1;  // rows are split across workers; results do not depend on this
  bool sample_trace = true;
};

struct SchemeResult {
  std::vector<double> times;
  std::vector<std::vector<BlochVector>> row_traces;  // ensemble-averaged, unweighted
  std::vector<BlochVector> combined_trace;           // sum_r sign_r row_r / desired_weight
  std::vector<BlochVector> row_final;                // ensemble-averaged Bloch vector at measure time
  BlochVector combined_final;                        // phase-cycled expectations (v_x, v_y, v_z), normalized
  double measure_time = 0.0;
  std::int64_t desired_weight = 0;
};

/// Detunings are drawn once from N(0, detuning_sigma) with the noise seed and
/// shared by every row; per-pulse jitter, when enabled, is drawn per member
/// after the detunings. With no detuning spread and no jitter the ensemble
/// collapses to one member.
SchemeResult run_scheme(const PulseSequence& seq, const PhaseScheme& scheme, const NoiseModel& noise,
                        const SchemeRunOptions& options = {});

/// Ideal direction of the desired echo: the Bloch vector at the echo time for
/// ideal pulses, no detuning and no relaxation, normalized.
BlochVector ideal_echo_axis(const PulseSequence& seq);

/// |in-phase quadrature| at the local extremum of |s(t)| nearest
/// `expected_time` within +/- `window`, where s = trace . axis. Returns
/// nothing when the window contains no extremum or the signal vanishes.
std::optional<double> echo_amplitude(std::span<const double> times, std::span<const BlochVector> trace,
                                     double expected_time, double window, const BlochVector& axis);

std::vector<double> in_phase(std::span<const BlochVector> trace, const BlochVector& axis);

/// Three-pulse experiment (preparation, inversion after `tau`, inversion
/// after a further `delay`) with a four-step cycle selecting either the
/// refocused echo (class {}) or the stimulated echo (class {1,2}). Returns
/// the transverse magnitude of the cycled signal at the selected echo's
/// predicted time, per circuit.
enum class SplitChannel { desired, undesired };
double split_echo(SplitChannel channel, double tau, double delay, const NoiseModel& noise,
                  std::size_t ensemble_size);

}  // namespace phasecycle
