#pragma once

// Coherence-transfer pathways of a pulse sequence. A pathway assigns a
// coherence order p in {-1, 0, +1} to every interval; interval 0 precedes
// the first pulse and interval k follows pulse k (pulses counted from 1 in
// this numbering, pulse 1 being the preparation pulse).

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "phasecycle/qubit.hpp"
#include "phasecycle/sequence.hpp"

namespace phasecycle {

inline constexpr unsigned kDefaultPathwayMaxPulses = 16;

struct Pathway {
  std::vector<int> orders;
  // Interval at whose end the pathway's population term is injected. Origin 0
  // is the initial (equilibrium) population; origin k >= 1 is population
  // regrown by longitudinal relaxation during interval k. orders[0..origin]
  // are all 0.
  std::size_t origin = 0;

  std::vector<int> deltas() const;  // one per pulse
  int final_order() const { return orders.back(); }
  std::size_t pulse_count() const { return orders.empty() ? 0 : orders.size() - 1; }

  void validate() const;
  bool operator==(const Pathway&) const = default;
};

/// All pathways of origin 0 for the sequence ending in `final_order`, in
/// lexicographic order of the free orders (-1 < 0 < +1). With
/// `echo_forming_only` keeps those whose echo_time is defined.
/// Throws BudgetExceeded above `max_pulses` pulses.
std::vector<Pathway> enumerate_pathways(const PulseSequence& seq, int final_order, bool echo_forming_only = false,
                                        unsigned max_pulses = kDefaultPathwayMaxPulses);

/// Every pathway of every origin and final order: the complete expansion of
/// the final density matrix.
std::vector<Pathway> enumerate_all_pathways(const PulseSequence& seq,
                                            unsigned max_pulses = kDefaultPathwayMaxPulses);

/// Durations of the intervals strictly between the first and last pulses.
std::vector<double> pulse_spacings(const PulseSequence& seq);

/// Time after the last pulse at which the pathway refocuses. `spacings` are
/// the durations of the intervals between consecutive pulses.
std::optional<double> echo_time(const Pathway& pathway, std::span<const double> spacings);

/// sum_i dp_i * dphi_i reduced to [0, 2 pi).
double echo_phase_shift(const Pathway& pathway, std::span<const double> phase_deltas);

/// Inversion pulses (1-based, preparation pulse excluded) at which the order
/// changes by exactly one.
std::vector<unsigned> classify(const Pathway& pathway);

/// Coefficients of U B_in U^dagger in the {S+, S-, Sz} basis, indexed by
/// order + 1 for both input and output: result[out + 1][in + 1].
using TransferMatrix = std::array<std::array<Complex, 3>, 3>;
TransferMatrix transfer_matrix(double angle, double phase);
Complex transfer_coefficient(int order_out, int order_in, double angle, double phase);

/// Population injected at the end of interval `origin`.
double origin_source(std::size_t origin, std::span<const double> durations, const NoiseModel& noise);

/// Amplitude of the pathway's basis operator at the end of the final interval
/// (the operator is S+ for final order +1, S- for -1 and Sz for 0).
/// `rotations` holds the applied rotation of each pulse and `durations`
/// the N+1 interval lengths.
Complex pathway_amplitude(const Pathway& pathway, std::span<const PulseRotation> rotations,
                          std::span<const double> durations, const NoiseModel& noise, double detuning);

/// Same, with the pulse rotations taken from the sequence and noise model and
/// the final interval ending at `measure_time`.
Complex pathway_amplitude(const Pathway& pathway, const PulseSequence& seq, const NoiseModel& noise,
                          double detuning, double measure_time);

/// Coherent sum over enumerate_all_pathways at `measure_time`.
QubitState pathway_sum(const PulseSequence& seq, const NoiseModel& noise, double detuning, double measure_time);

struct EchoPrediction {
  Pathway pathway;
  std::vector<unsigned> class_f;
  std::optional<double> echo_time;  // after the last pulse
  double phase_shift = 0.0;         // relative to the all-+ phase row
  Complex amplitude;                // at the echo (or at the sequence's echo time if none)
  bool refocusing() const { return echo_time.has_value(); }
};

/// Predictions for every origin-0 pathway ending in `final_order`, using the
/// sequence's phase flags as the phase row.
std::vector<EchoPrediction> predict_echoes(const PulseSequence& seq, const NoiseModel& noise, double detuning,
                                           int final_order = -1, bool echo_forming_only = false);

/// CSV with columns orders, F, echo_time, phase, abs_amplitude, refocusing.
void write_pathway_report(std::ostream& out, const std::vector<EchoPrediction>& predictions);

}  // namespace phasecycle
