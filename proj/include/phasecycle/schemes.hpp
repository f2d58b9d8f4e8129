#pragma once

// Phase-cycling schemes for inversion-pulse dynamical decoupling (IDD-m):
// two-step (TPC), complete (CPC) and Hadamard (HPC) cycles, plus the
// class-by-class echo cancellation check.

#include <cstdint>
#include <string>
#include <vector>

#include "phasecycle/hadamard.hpp"

namespace phasecycle {

enum class SchemeKind { tpc, cpc, hpc, custom };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& s);

/// Rows of per-circuit pulse phase flags. Column 0 drives the preparation
/// pi/2 pulse and columns 1..m the inversion pulses; `sign` holds the +1/-1
/// weight each circuit's result carries when the results are combined.
struct PhaseScheme {
  SchemeKind kind = SchemeKind::custom;
  unsigned m = 0;
  SignMatrix rows;
  SignVector sign;

  std::size_t row_count() const noexcept { return rows.rows(); }

  /// Sum over rows of sign * preparation flag: how many times the desired
  /// echo accumulates in the combined signal.
  std::int64_t desired_weight() const;

  /// Throws ValidationError on shape mismatches.
  void validate() const;
};

inline constexpr unsigned kDefaultCpcMaxPulses = 20;

PhaseScheme build_tpc(unsigned m);

/// All 2^m inversion-phase configurations, first inversion pulse as the most
/// significant position, preparation pulse and result signs fixed to +1.
/// Throws BudgetExceeded when m > max_pulses.
PhaseScheme build_cpc(unsigned m, unsigned max_pulses = kDefaultCpcMaxPulses);

/// Four stacked blocks built from the Sylvester matrix of order
/// N = nextpow2(m): sign and preparation columns (+,+,-,-), the first
/// inversion pulse fixed to +1, and +/-H' (H without its first column,
/// truncated to m-1 columns) on the remaining pulses. 4N rows.
PhaseScheme build_hpc(unsigned m);

PhaseScheme build_scheme(SchemeKind kind, unsigned m);

/// Number of circuits the construction needs: 2, 2^m, or 4 * nextpow2(m).
BigInt scheme_complexity(SchemeKind kind, unsigned m);

struct VerifyOptions {
  // Exhaustive verification walks the 2^rank distinct class products; above
  // this rank the report falls back to sampling.
  unsigned max_exhaustive_rank = 24;
  std::uint64_t samples = std::uint64_t{1} << 20;
  std::uint64_t seed = 0;
  std::size_t survivor_cap = 32;
};

struct OrthogonalityReport {
  unsigned m = 0;
  BigInt total_classes;  // 2^m, including the desired class F = {}
  BigInt cancelled;      // non-empty classes whose echo sums to zero
  Rational ratio_exact;  // cancelled / (2^m - 1); exact only when exhaustive
  double ratio = 0.0;
  bool desired_survives = true;
  bool exhaustive = true;
  std::uint64_t samples = 0;  // classes drawn when not exhaustive
  std::vector<std::vector<unsigned>> surviving_classes;  // 1-based inversion indices
  bool survivors_truncated = false;
};

/// For every non-empty class F of inversion pulses, the echo phase vector is
/// sign o col0 o (product of the columns in F); the class is cancelled when
/// that vector sums to zero.
OrthogonalityReport verify_scheme(const PhaseScheme& scheme, const VerifyOptions& options = {});

}  // namespace phasecycle
