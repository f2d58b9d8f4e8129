#pragma once

// Decay fitting, scaling exponents, effective states from phase-cycled
// expectations, and state fidelity.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasecycle/qubit.hpp"
#include "phasecycle/schemes.hpp"
#include "phasecycle/sequence.hpp"

namespace phasecycle {

enum class DecayModel { mono, stretched, recovery };

std::string to_string(DecayModel model);
DecayModel decay_model_from_string(const std::string& s);

struct DecayPoint {
  double time = 0.0;
  double amplitude = 0.0;
};

struct DecayFit {
  DecayModel model = DecayModel::mono;
  double amplitude = 0.0;
  double time_constant = 0.0;  // T2 (or T1 for the recovery model)
  double stretch = 1.0;
  double residual_rms = 0.0;
  unsigned iterations = 0;
  unsigned starts_converged = 0;
};

struct FitOptions {
  unsigned max_iterations = 500;
  double tolerance = 1e-8;
};

/// mono:      A exp(-t/T)
/// stretched: A exp(-(t/T)^beta), 0 < beta <= 3
/// recovery:  A (1 - 2 exp(-(t/T)^beta))
/// Levenberg-Marquardt from a grid of starts; the lowest-cost converged fit
/// wins. Throws ValidationError on bad input and ConvergenceError when no
/// start converges or the data are flat.
DecayFit fit_decay(std::span<const DecayPoint> points, DecayModel model, const FitOptions& options = {});

double evaluate_decay(const DecayFit& fit, double t);

struct ScalingPoint {
  double m = 0.0;
  double t2 = 0.0;
};

struct ScalingFit {
  double alpha = 0.0;
  double stderr_alpha = 0.0;
  double intercept = 0.0;  // ln T2 at m = 1
  std::size_t points = 0;
};

/// Ordinary least squares of ln T2 on ln m.
ScalingFit scaling_exponent(std::span<const ScalingPoint> series);

struct EffectiveState {
  BlochVector v;     // as given
  BlochVector unit;  // normalized
  Matrix2c rho;
};

/// Throws ValidationError for the zero vector.
EffectiveState effective_state(const BlochVector& v);

Matrix2c density_from_bloch(const BlochVector& b);

/// Tr(rho sigma) + 2 sqrt(det rho det sigma).
double fidelity(const Matrix2c& rho, const Matrix2c& sigma);

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 through closed-form 2x2 eigen-
/// decompositions.
double fidelity_spectral(const Matrix2c& rho, const Matrix2c& sigma);

/// Checks Hermiticity, unit trace and eigenvalues >= -tol.
void validate_density(const Matrix2c& rho, double tol = 1e-10);

/// sigma_z readouts after the tomography pre-pulses: ideal pi/2 about -y for
/// <sigma_x>, pi/2 about x for <sigma_y>, nothing for <sigma_z>.
BlochVector tomography_readout(const QubitState& state);

struct FidelityPoint {
  unsigned m = 0;
  double fidelity = 0.0;
  EffectiveState state;
  BlochVector target;
};

struct BenchmarkOptions {
  double timing = 1e-6;  // tau for CP/CPMG, total time for UDD
  std::size_t ensemble_size = 1;
  unsigned workers = 1;
};

/// For each m: run the scheme, assemble the tomography expectations per row,
/// combine with the scheme signs, and compare the effective state with the
/// ideal final state of the same sequence.
std::vector<FidelityPoint> fidelity_benchmark(SequenceKind family, std::span<const unsigned> m_values,
                                              SchemeKind scheme_kind, const NoiseModel& noise,
                                              const BenchmarkOptions& options = {});

}  // namespace phasecycle
