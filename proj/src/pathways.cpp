#include "phasecycle/pathways.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "phasecycle/errors.hpp"

namespace phasecycle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_budget(std::size_t pulses, unsigned max_pulses) {
  if (pulses > max_pulses) {
    std::ostringstream os;
    os << "pathway enumeration for " << pulses << " pulses needs 3^" << pulses - 1
       << " order sequences per final order; limit is " << max_pulses << " pulses";
    throw BudgetExceeded(os.str());
  }
}

// Calls visit(orders) for every assignment of {-1,0,+1} to orders[first..last).
template <typename Visit>
void walk_orders(std::vector<int>& orders, std::size_t first, std::size_t last, Visit&& visit) {
  if (first == last) {
    visit(orders);
    return;
  }
  for (int p = -1; p <= 1; ++p) {
    orders[first] = p;
    walk_orders(orders, first + 1, last, visit);
  }
  orders[first] = 0;
}

Complex interval_factor(int order, double duration, const NoiseModel& noise, double detuning) {
  if (order == 0) return {std::exp(-duration / noise.t1), 0.0};
  return std::exp(Complex(-duration / noise.t2, -order * detuning * duration));
}

}  // namespace

std::vector<int> Pathway::deltas() const {
  std::vector<int> d;
  for (std::size_t i = 0; i + 1 < orders.size(); ++i) d.push_back(orders[i + 1] - orders[i]);
  return d;
}

void Pathway::validate() const {
  if (orders.size() < 2) throw ValidationError("a pathway needs at least one pulse");
  if (orders.front() != 0) throw ValidationError("pathways start from population (order 0)");
  for (int p : orders)
    if (p < -1 || p > 1) throw ValidationError("coherence orders must lie in {-1, 0, +1}");
  if (origin >= orders.size()) throw ValidationError("pathway origin lies past the final interval");
  for (std::size_t i = 0; i <= origin; ++i)
    if (orders[i] != 0) throw ValidationError("orders up to the pathway origin must be 0");
}

std::vector<Pathway> enumerate_pathways(const PulseSequence& seq, int final_order, bool echo_forming_only,
                                        unsigned max_pulses) {
  if (final_order < -1 || final_order > 1) throw ValidationError("final order must be -1, 0 or +1");
  const std::size_t n = seq.pulses.size();
  if (n == 0) throw ValidationError("sequence has no pulses");
  check_budget(n, max_pulses);

  const auto spacings = pulse_spacings(seq);
  std::vector<Pathway> out;
  std::vector<int> orders(n + 1, 0);
  orders[n] = final_order;
  walk_orders(orders, 1, n, [&](const std::vector<int>& o) {
    Pathway p{o, 0};
    if (echo_forming_only && !echo_time(p, spacings)) return;
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<Pathway> enumerate_all_pathways(const PulseSequence& seq, unsigned max_pulses) {
  const std::size_t n = seq.pulses.size();
  if (n == 0) throw ValidationError("sequence has no pulses");
  check_budget(n, max_pulses);
  std::vector<Pathway> out;
  for (std::size_t origin = 0; origin <= n; ++origin) {
    std::vector<int> orders(n + 1, 0);
    walk_orders(orders, origin + 1, n + 1, [&](const std::vector<int>& o) { out.push_back({o, origin}); });
  }
  return out;
}

std::vector<double> pulse_spacings(const PulseSequence& seq) {
  std::vector<double> s;
  for (std::size_t i = 0; i + 1 < seq.pulses.size(); ++i) s.push_back(seq.pulses[i + 1].time - seq.pulses[i].time);
  return s;
}

std::optional<double> echo_time(const Pathway& pathway, std::span<const double> spacings) {
  const std::size_t n = pathway.pulse_count();
  if (n == 0 || spacings.size() != n - 1) {
    std::ostringstream os;
    os << "echo_time: " << spacings.size() << " spacings for a pathway over " << n << " pulses";
    throw ValidationError(os.str());
  }
  double t = 0.0;
  double scale = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    t += pathway.orders[i] * spacings[i - 1];
    scale += spacings[i - 1];
  }
  // Sums of mixed-sign spacings that should vanish come out at rounding level.
  if (std::abs(t) <= 1e-12 * scale) return std::nullopt;
  const int last = pathway.final_order();
  if (last == -1 && t > 0.0) return t;
  if (last == 1 && t < 0.0) return -t;
  return std::nullopt;
}

double echo_phase_shift(const Pathway& pathway, std::span<const double> phase_deltas) {
  const auto d = pathway.deltas();
  if (phase_deltas.size() != d.size()) throw ValidationError("echo_phase_shift: one phase delta per pulse required");
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) total += d[i] * phase_deltas[i];
  double r = std::fmod(total, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (kTwoPi - r < 1e-12) r = 0.0;
  return r;
}

std::vector<unsigned> classify(const Pathway& pathway) {
  const auto d = pathway.deltas();
  std::vector<unsigned> f;
  // d[0] belongs to the preparation pulse.
  for (std::size_t i = 1; i < d.size(); ++i)
    if (std::abs(d[i]) == 1) f.push_back(static_cast<unsigned>(i));
  return f;
}

TransferMatrix transfer_matrix(double angle, double phase) {
  const Matrix2c u = rotation_operator(angle, phase);
  const Matrix2c ud = u.adjoint();
  std::array<Matrix2c, 3> basis;
  basis[0] << 0, 0, 1, 0;  // S-
  basis[1] = pauli_z();
  basis[2] << 0, 1, 0, 0;  // S+
  TransferMatrix t{};
  for (int in = 0; in < 3; ++in) {
    const Matrix2c x = u * basis[in] * ud;
    t[0][in] = x(1, 0);
    t[1][in] = 0.5 * (x(0, 0) - x(1, 1));
    t[2][in] = x(0, 1);
  }
  return t;
}

Complex transfer_coefficient(int order_out, int order_in, double angle, double phase) {
  if (std::abs(order_out) > 1 || std::abs(order_in) > 1) throw ValidationError("coherence orders must be in {-1,0,1}");
  return transfer_matrix(angle, phase)[order_out + 1][order_in + 1];
}

double origin_source(std::size_t origin, std::span<const double> durations, const NoiseModel& noise) {
  if (origin == 0) return 0.5;
  return 0.5 * -std::expm1(-durations[origin] / noise.t1);
}

Complex pathway_amplitude(const Pathway& pathway, std::span<const PulseRotation> rotations,
                          std::span<const double> durations, const NoiseModel& noise, double detuning) {
  pathway.validate();
  const std::size_t n = pathway.pulse_count();
  if (rotations.size() != n || durations.size() != n + 1)
    throw ValidationError("pathway_amplitude: rotations/durations do not match the pathway length");
  Complex amp = origin_source(pathway.origin, durations, noise);
  for (std::size_t j = pathway.origin + 1; j <= n; ++j) {
    const auto& r = rotations[j - 1];
    amp *= transfer_coefficient(pathway.orders[j], pathway.orders[j - 1], r.angle, r.phase);
    amp *= interval_factor(pathway.orders[j], durations[j], noise, detuning);
  }
  return amp;
}

Complex pathway_amplitude(const Pathway& pathway, const PulseSequence& seq, const NoiseModel& noise,
                          double detuning, double measure_time) {
  std::vector<PulseRotation> rotations;
  for (const auto& p : seq.pulses) rotations.push_back(effective_rotation(p, noise));
  const auto durations = interval_durations(seq, measure_time);
  return pathway_amplitude(pathway, rotations, durations, noise, detuning);
}

QubitState pathway_sum(const PulseSequence& seq, const NoiseModel& noise, double detuning, double measure_time) {
  std::vector<PulseRotation> rotations;
  for (const auto& p : seq.pulses) rotations.push_back(effective_rotation(p, noise));
  const auto durations = interval_durations(seq, measure_time);
  Complex c_plus{0.0, 0.0};
  double a_z = 0.0;
  for (const auto& path : enumerate_all_pathways(seq)) {
    const Complex amp = pathway_amplitude(path, rotations, durations, noise, detuning);
    if (path.final_order() == 1) c_plus += amp;
    else if (path.final_order() == 0) a_z += amp.real();
  }
  QubitState s;
  s.p1 = 0.5 - a_z;
  s.c_plus = c_plus;
  return s;
}

std::vector<EchoPrediction> predict_echoes(const PulseSequence& seq, const NoiseModel& noise, double detuning,
                                           int final_order, bool echo_forming_only) {
  const auto spacings = pulse_spacings(seq);
  std::vector<double> phase_deltas;
  for (const auto& p : seq.pulses) phase_deltas.push_back(p.phase_flag < 0 ? std::numbers::pi : 0.0);
  std::vector<PulseRotation> rotations;
  for (const auto& p : seq.pulses) rotations.push_back(effective_rotation(p, noise));
  const double last = seq.last_pulse_time();

  std::vector<EchoPrediction> out;
  for (auto& path : enumerate_pathways(seq, final_order, echo_forming_only)) {
    EchoPrediction e;
    e.class_f = classify(path);
    e.echo_time = echo_time(path, spacings);
    e.phase_shift = echo_phase_shift(path, phase_deltas);
    const double at = e.echo_time ? last + *e.echo_time : std::max(last, seq.echo_time);
    e.amplitude = pathway_amplitude(path, rotations, interval_durations(seq, at), noise, detuning);
    e.pathway = std::move(path);
    out.push_back(std::move(e));
  }
  return out;
}

void write_pathway_report(std::ostream& out, const std::vector<EchoPrediction>& predictions) {
  out << "orders,F,echo_time,phase,abs_amplitude,refocusing\n";
  out << std::setprecision(12);
  for (const auto& e : predictions) {
    for (std::size_t i = 0; i < e.pathway.orders.size(); ++i)
      out << (i ? ";" : "") << e.pathway.orders[i];
    out << ',';
    for (std::size_t i = 0; i < e.class_f.size(); ++i) out << (i ? ";" : "") << e.class_f[i];
    out << ',';
    if (e.echo_time) out << *e.echo_time;
    out << ',' << e.phase_shift << ',' << std::abs(e.amplitude) << ',' << (e.refocusing() ? 1 : 0) << '\n';
  }
}

}  // namespace phasecycle
