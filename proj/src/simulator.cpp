#include "phasecycle/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "phasecycle/errors.hpp"

namespace phasecycle {

QubitState apply_rotation(const QubitState& state, const PulseRotation& rotation) {
  const Matrix2c u = rotation_operator(rotation.angle, rotation.phase);
  return QubitState::from_matrix(u * state.matrix() * u.adjoint());
}

QubitState apply_pulse(const QubitState& state, const PulseSpec& pulse, const NoiseModel& noise) {
  return apply_rotation(state, effective_rotation(pulse, noise));
}

QubitState free_evolve(const QubitState& state, double duration, double detuning, const NoiseModel& noise) {
  if (duration < 0.0) throw ValidationError("free_evolve: negative duration");
  if (duration == 0.0) return state;
  QubitState s = state;
  s.c_plus *= std::exp(Complex(-duration / noise.t2, -detuning * duration));
  s.p1 *= std::exp(-duration / noise.t1);
  return s;
}

double measure_time(const PulseSequence& seq) { return std::max(seq.echo_time, seq.last_pulse_time()); }

namespace {

QubitState through_pulses(const PulseSequence& seq, const NoiseModel& noise, double detuning,
                          const PulseOffsets* offsets) {
  QubitState s = QubitState::ground();
  double t = 0.0;
  for (std::size_t i = 0; i < seq.pulses.size(); ++i) {
    const auto& p = seq.pulses[i];
    s = free_evolve(s, p.time - t, detuning, noise);
    const double df = offsets && !offsets->flip.empty() ? offsets->flip[i] : 0.0;
    const double dp = offsets && !offsets->phase.empty() ? offsets->phase[i] : 0.0;
    s = apply_rotation(s, effective_rotation(p, noise, df, dp));
    t = p.time;
  }
  return s;
}

struct Ensemble {
  std::vector<double> detunings;
  std::vector<PulseOffsets> offsets;  // empty without jitter
};

Ensemble draw_ensemble(const NoiseModel& noise, std::size_t requested, std::size_t pulses) {
  Ensemble e;
  const bool spread = noise.detuning_sigma > 0.0;
  const std::size_t members = spread || noise.has_jitter() ? requested : 1;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  e.detunings.resize(members, 0.0);
  if (spread)
    for (auto& d : e.detunings) d = noise.detuning_sigma * unit(rng);
  if (noise.has_jitter()) {
    e.offsets.resize(members);
    for (auto& o : e.offsets) {
      o.flip.resize(pulses);
      o.phase.resize(pulses);
      for (std::size_t i = 0; i < pulses; ++i) {
        o.flip[i] = noise.flip_jitter * unit(rng);
        o.phase[i] = noise.phase_jitter * unit(rng);
      }
    }
  }
  return e;
}

}  // namespace

QubitState propagate(const PulseSequence& seq, const NoiseModel& noise, double detuning, double at,
                     const PulseOffsets* offsets) {
  const QubitState s = through_pulses(seq, noise, detuning, offsets);
  return free_evolve(s, at - seq.last_pulse_time(), detuning, noise);
}

CircuitResult run_circuit(const PulseSequence& sequence, std::span<const std::int8_t> row, const NoiseModel& noise,
                          double detuning, const PulseOffsets* offsets) {
  const PulseSequence seq = row.empty() ? sequence : with_phase_flags(sequence, row);
  const QubitState after = through_pulses(seq, noise, detuning, offsets);
  const double last = seq.last_pulse_time();

  CircuitResult r;
  r.measure_time = measure_time(seq);
  r.final_state = free_evolve(after, r.measure_time - last, detuning, noise);
  r.times = seq.readout.sample_times();
  r.trace.reserve(r.times.size());
  for (double t : r.times) r.trace.push_back(free_evolve(after, t - last, detuning, noise).bloch());
  return r;
}

SchemeResult run_scheme(const PulseSequence& seq, const PhaseScheme& scheme, const NoiseModel& noise,
                        const SchemeRunOptions& options) {
  seq.validate();
  scheme.validate();
  noise.validate();
  if (options.ensemble_size < 1) throw ValidationError("ensemble size must be at least 1");
  if (scheme.m + 1 != seq.pulses.size()) {
    std::ostringstream os;
    os << "scheme is for " << scheme.m << " inversion pulses, sequence has " << seq.pulses.size() - 1;
    throw ValidationError(os.str());
  }

  const Ensemble ens = draw_ensemble(noise, options.ensemble_size, seq.pulses.size());
  const std::size_t members = ens.detunings.size();
  const std::size_t n_rows = scheme.row_count();

  SchemeResult out;
  out.measure_time = measure_time(seq);
  out.times = options.sample_trace ? seq.readout.sample_times() : std::vector<double>{};
  out.row_traces.assign(n_rows, std::vector<BlochVector>(out.times.size()));
  out.row_final.assign(n_rows, BlochVector{});
  out.desired_weight = scheme.desired_weight();

  const double last = seq.last_pulse_time();
  auto run_row = [&](std::size_t r) {
    const PulseSequence row_seq = with_phase_flags(seq, scheme.rows.row(r));
    auto& trace = out.row_traces[r];
    BlochVector final_sum;
    for (std::size_t e = 0; e < members; ++e) {
      const double dw = ens.detunings[e];
      const PulseOffsets* off = ens.offsets.empty() ? nullptr : &ens.offsets[e];
      const QubitState after = through_pulses(row_seq, noise, dw, off);
      final_sum += free_evolve(after, out.measure_time - last, dw, noise).bloch();
      for (std::size_t k = 0; k < out.times.size(); ++k)
        trace[k] += free_evolve(after, out.times[k] - last, dw, noise).bloch();
    }
    const double inv = 1.0 / static_cast<double>(members);
    out.row_final[r] = final_sum * inv;
    for (auto& b : trace) b = b * inv;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n_rows)));
  if (workers == 1) {
    for (std::size_t r = 0; r < n_rows; ++r) run_row(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < n_rows; r += workers) run_row(r);
      });
  }

  // Fixed row order keeps the reduction independent of the worker count.
  const double norm = out.desired_weight != 0 ? 1.0 / static_cast<double>(out.desired_weight) : 1.0;
  out.combined_trace.assign(out.times.size(), BlochVector{});
  for (std::size_t r = 0; r < n_rows; ++r) {
    const double w = scheme.sign[r] * norm;
    out.combined_final += out.row_final[r] * w;
    for (std::size_t k = 0; k < out.times.size(); ++k) out.combined_trace[k] += out.row_traces[r][k] * w;
  }
  return out;
}

BlochVector ideal_echo_axis(const PulseSequence& seq) {
  const NoiseModel ideal = NoiseModel::ideal();
  const BlochVector b = propagate(seq, ideal, 0.0, measure_time(seq)).bloch();
  const double n = b.norm();
  if (n < 1e-12) throw ValidationError("ideal sequence leaves no signal at the echo time");
  return b * (1.0 / n);
}

std::vector<double> in_phase(std::span<const BlochVector> trace, const BlochVector& axis) {
  std::vector<double> s;
  s.reserve(trace.size());
  for (const auto& b : trace) s.push_back(dot(b, axis));
  return s;
}

std::optional<double> echo_amplitude(std::span<const double> times, std::span<const BlochVector> trace,
                                     double expected_time, double window, const BlochVector& axis) {
  if (times.size() != trace.size()) throw ValidationError("echo_amplitude: times and trace differ in length");
  if (times.empty() || expected_time < times.front() || expected_time > times.back())
    throw ValidationError("echo_amplitude: expected time outside the readout window");
  const auto s = in_phase(trace, axis);
  const std::size_t n = s.size();
  std::optional<double> best;
  double best_distance = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(times[k] - expected_time) > window) continue;
    const double a = std::abs(s[k]);
    if (a < 1e-15) continue;
    if (k > 0 && std::abs(s[k - 1]) > a) continue;
    if (k + 1 < n && std::abs(s[k + 1]) > a) continue;
    const double d = std::abs(times[k] - expected_time);
    if (!best || d < best_distance) {
      best = a;
      best_distance = d;
    }
  }
  return best;
}

double split_echo(SplitChannel channel, double tau, double delay, const NoiseModel& noise,
                  std::size_t ensemble_size) {
  if (!(tau > 0.0) || !(delay > 0.0)) throw ValidationError("split_echo: delays must be positive");
  constexpr double kPi = std::numbers::pi;
  PulseSequence seq;
  seq.kind = SequenceKind::custom;
  seq.m = 2;
  seq.pulses = {{0.0, kPi / 2, 0.0, 1}, {tau, kPi, kPi / 2, 1}, {tau + delay, kPi, kPi / 2, 1}};
  if (channel == SplitChannel::desired) {
    if (delay <= tau) throw ValidationError("split_echo: the refocused echo needs delay > tau");
    seq.echo_time = 2.0 * delay;
  } else {
    seq.echo_time = 2.0 * tau + delay;
  }

  PhaseScheme scheme = build_cpc(2);
  if (channel == SplitChannel::undesired)
    for (std::size_t r = 0; r < scheme.row_count(); ++r)
      scheme.sign[r] = static_cast<std::int8_t>(scheme.rows(r, 1) * scheme.rows(r, 2));

  SchemeRunOptions opts;
  opts.ensemble_size = ensemble_size;
  opts.sample_trace = false;
  const SchemeResult res = run_scheme(seq, scheme, noise, opts);
  // The undesired cycle has zero desired weight, so rescale by the row count.
  const double scale = channel == SplitChannel::undesired ? 1.0 / static_cast<double>(scheme.row_count()) : 1.0;
  const BlochVector& v = res.combined_final;
  return std::hypot(v.x, v.y) * scale;
}

}  // namespace phasecycle
