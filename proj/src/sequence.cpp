#include "phasecycle/sequence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phasecycle/errors.hpp"

namespace phasecycle {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::cp: return "cp";
    case SequenceKind::cpmg: return "cpmg";
    case SequenceKind::udd: return "udd";
    case SequenceKind::custom: return "custom";
  }
  return "custom";
}

SequenceKind sequence_kind_from_string(const std::string& s) {
  if (s == "cp") return SequenceKind::cp;
  if (s == "cpmg") return SequenceKind::cpmg;
  if (s == "udd") return SequenceKind::udd;
  if (s == "custom") return SequenceKind::custom;
  throw ValidationError("unknown sequence kind '" + s + "' (expected cp|cpmg|udd|custom)");
}

std::vector<double> ReadoutWindow::sample_times() const {
  std::vector<double> t;
  if (step <= 0.0 || end < start) return t;
  const auto n = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9));
  t.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t.push_back(start + static_cast<double>(k) * step);
  return t;
}

void PulseSequence::validate() const {
  if (pulses.empty()) throw ValidationError("pulse sequence has no pulses");
  double prev = 0.0;
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const double t = pulses[i].time;
    if (!std::isfinite(t) || t < 0.0 || t < prev) {
      std::ostringstream os;
      os << "pulse " << i << " time " << t << " must be finite, nonnegative and nondecreasing";
      throw ValidationError(os.str());
    }
    if (pulses[i].phase_flag != 1 && pulses[i].phase_flag != -1)
      throw ValidationError("pulse phase flags must be +1 or -1");
    prev = t;
  }
  if (readout.step < 0.0 || readout.end < readout.start)
    throw ValidationError("readout window must satisfy start <= end and step >= 0");
  if (readout.step > 0.0 && readout.start < last_pulse_time())
    throw ValidationError("readout window must start at or after the last pulse");
}

PulseSequence build_sequence(SequenceKind kind, unsigned m, double timing) {
  if (!(timing > 0.0) || !std::isfinite(timing)) {
    std::ostringstream os;
    os << "sequence timing must be positive, got " << timing;
    throw ValidationError(os.str());
  }
  if (kind == SequenceKind::custom) throw ValidationError("custom sequences are read from config");
  if (m < 1) throw ValidationError("sequences need at least one inversion pulse");

  PulseSequence seq;
  seq.kind = kind;
  seq.m = m;
  seq.pulses.push_back({0.0, kPi / 2, 0.0, 1});

  const double inversion_phase = kind == SequenceKind::cpmg ? kPi / 2 : 0.0;
  if (kind == SequenceKind::udd) {
    for (unsigned n = 1; n <= m; ++n) {
      const double s = std::sin(n * kPi / (2.0 * (m + 1)));
      seq.pulses.push_back({timing * s * s, kPi, inversion_phase, 1});
    }
    seq.echo_time = timing;
  } else {
    for (unsigned n = 1; n <= m; ++n) seq.pulses.push_back({(2.0 * n - 1.0) * timing, kPi, inversion_phase, 1});
    seq.echo_time = 2.0 * m * timing;
  }

  const double last = seq.last_pulse_time();
  const double d = seq.echo_time - last;
  seq.readout = {last, last + 3.0 * d, d / 50.0};
  return seq;
}

PulseSequence with_phase_flags(PulseSequence seq, std::span<const std::int8_t> row) {
  if (row.size() != seq.pulses.size()) {
    std::ostringstream os;
    os << "scheme row has " << row.size() << " entries for " << seq.pulses.size() << " pulses";
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < row.size(); ++i) seq.pulses[i].phase_flag = row[i];
  return seq;
}

PulseSequence with_readout_around_echo(PulseSequence seq, double half_width, double step) {
  const double start = std::max(seq.last_pulse_time(), seq.echo_time - half_width);
  seq.readout = {start, seq.echo_time + half_width, step};
  return seq;
}

void NoiseModel::validate() const {
  if (!(t1 > 0.0)) throw ValidationError("noise: T1 must be positive");
  if (!(t2 > 0.0)) throw ValidationError("noise: T2 must be positive");
  if (detuning_sigma < 0.0 || !std::isfinite(detuning_sigma))
    throw ValidationError("noise: detuning_sigma must be finite and nonnegative");
  if (!std::isfinite(flip_error) || !std::isfinite(phase_error))
    throw ValidationError("noise: pulse errors must be finite");
  if (flip_jitter < 0.0 || phase_jitter < 0.0) throw ValidationError("noise: jitter widths must be nonnegative");
}

PulseRotation effective_rotation(const PulseSpec& pulse, const NoiseModel& noise, double flip_offset,
                                 double phase_offset) {
  PulseRotation r;
  r.angle = pulse.nominal_flip * (1.0 + noise.flip_error + flip_offset);
  r.phase = pulse.nominal_phase + noise.phase_error + phase_offset + (pulse.phase_flag < 0 ? kPi : 0.0);
  return r;
}

std::vector<double> interval_durations(const PulseSequence& seq, double measure_time) {
  std::vector<double> d;
  d.reserve(seq.pulses.size() + 1);
  d.push_back(seq.pulses.empty() ? 0.0 : seq.pulses.front().time);
  for (std::size_t i = 0; i + 1 < seq.pulses.size(); ++i) d.push_back(seq.pulses[i + 1].time - seq.pulses[i].time);
  const double tail = measure_time - seq.last_pulse_time();
  if (tail < 0.0) throw ValidationError("measurement time precedes the last pulse");
  d.push_back(tail);
  return d;
}

}  // namespace phasecycle
