#include "phasecycle/schemes.hpp"

#include <random>
#include <sstream>

#include "packed_signs.hpp"
#include "phasecycle/errors.hpp"

namespace phasecycle {

namespace {

using detail::PackedSigns;

// A GF(2) basis vector of the class-product space together with the set of
// inversion columns (as a bit vector over pulses) that produces it.
struct BasisVector {
  PackedSigns value;
  PackedSigns combo;
  std::size_t pivot;
};

std::vector<unsigned> combo_to_class(const PackedSigns& combo) {
  std::vector<unsigned> f;
  for (std::size_t i = 0; i < combo.dimension(); ++i)
    if (combo.test(i)) f.push_back(static_cast<unsigned>(i + 1));
  return f;
}

bool balanced(const PackedSigns& v) { return v.sum() == 0; }

}  // namespace

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::tpc: return "tpc";
    case SchemeKind::cpc: return "cpc";
    case SchemeKind::hpc: return "hpc";
    case SchemeKind::custom: return "custom";
  }
  return "custom";
}

SchemeKind scheme_kind_from_string(const std::string& s) {
  if (s == "tpc") return SchemeKind::tpc;
  if (s == "cpc") return SchemeKind::cpc;
  if (s == "hpc") return SchemeKind::hpc;
  if (s == "custom") return SchemeKind::custom;
  throw ValidationError("unknown scheme kind '" + s + "' (expected tpc|cpc|hpc|custom)");
}

std::int64_t PhaseScheme::desired_weight() const {
  std::int64_t w = 0;
  for (std::size_t r = 0; r < rows.rows(); ++r) w += sign[r] * rows(r, 0);
  return w;
}

void PhaseScheme::validate() const {
  if (rows.rows() == 0) throw ValidationError("scheme has no rows");
  if (rows.cols() != m + 1) {
    std::ostringstream os;
    os << "scheme rows have " << rows.cols() << " columns, expected m+1 = " << m + 1;
    throw ValidationError(os.str());
  }
  if (sign.size() != rows.rows()) {
    std::ostringstream os;
    os << "sign vector has " << sign.size() << " entries for " << rows.rows() << " rows";
    throw ValidationError(os.str());
  }
  for (auto s : sign)
    if (s != 1 && s != -1) throw ValidationError("sign entries must be +1 or -1");
}

PhaseScheme build_tpc(unsigned m) {
  PhaseScheme s;
  s.kind = SchemeKind::tpc;
  s.m = m;
  s.rows = SignMatrix(2, m + 1);
  s.rows(1, 0) = -1;
  s.sign = {1, -1};
  return s;
}

PhaseScheme build_cpc(unsigned m, unsigned max_pulses) {
  if (m < 1) throw ValidationError("CPC needs at least one inversion pulse");
  if (m > max_pulses || m > 62) {
    std::ostringstream os;
    os << "CPC for m=" << m << " needs 2^" << m << " = " << scheme_complexity(SchemeKind::cpc, m)
       << " circuits, above the limit of m=" << max_pulses;
    throw BudgetExceeded(os.str());
  }
  const std::size_t n_rows = std::size_t{1} << m;
  PhaseScheme s;
  s.kind = SchemeKind::cpc;
  s.m = m;
  s.rows = SignMatrix(n_rows, m + 1);
  s.sign.assign(n_rows, 1);
  for (std::size_t r = 0; r < n_rows; ++r)
    for (unsigned j = 1; j <= m; ++j)
      if ((r >> (m - j)) & 1u) s.rows(r, j) = -1;
  return s;
}

PhaseScheme build_hpc(unsigned m) {
  if (m < 1) throw ValidationError("HPC needs at least one inversion pulse");
  const std::size_t order = next_power_of_two(m);
  const SignMatrix h = sylvester(order);

  PhaseScheme s;
  s.kind = SchemeKind::hpc;
  s.m = m;
  s.rows = SignMatrix(4 * order, m + 1);
  s.sign.assign(4 * order, 1);
  for (std::size_t block = 0; block < 4; ++block) {
    const std::int8_t prep = block < 2 ? 1 : -1;
    const std::int8_t h_sign = block % 2 == 0 ? 1 : -1;
    for (std::size_t r = 0; r < order; ++r) {
      const std::size_t row = block * order + r;
      s.sign[row] = prep;
      s.rows(row, 0) = prep;
      s.rows(row, 1) = 1;
      // Inversion pulse j >= 2 takes column j-1 of H.
      for (unsigned j = 2; j <= m; ++j) s.rows(row, j) = static_cast<std::int8_t>(h_sign * h(r, j - 1));
    }
  }
  return s;
}

PhaseScheme build_scheme(SchemeKind kind, unsigned m) {
  switch (kind) {
    case SchemeKind::tpc: return build_tpc(m);
    case SchemeKind::cpc: return build_cpc(m);
    case SchemeKind::hpc: return build_hpc(m);
    case SchemeKind::custom: break;
  }
  throw ValidationError("custom schemes are read from a file, not built");
}

BigInt scheme_complexity(SchemeKind kind, unsigned m) {
  if (m < 1) throw ValidationError("scheme_complexity: m must be at least 1");
  switch (kind) {
    case SchemeKind::tpc: return 2;
    case SchemeKind::cpc: return BigInt(1) << m;
    case SchemeKind::hpc: return BigInt(4) * BigInt(next_power_of_two(m));
    case SchemeKind::custom: break;
  }
  throw ValidationError("scheme_complexity is undefined for custom schemes");
}

OrthogonalityReport verify_scheme(const PhaseScheme& scheme, const VerifyOptions& options) {
  scheme.validate();
  const std::size_t n_rows = scheme.row_count();
  const unsigned m = scheme.m;

  PackedSigns base(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r)
    if (scheme.sign[r] * scheme.rows(r, 0) < 0) base.flip(r);

  std::vector<PackedSigns> cols;
  cols.reserve(m);
  for (unsigned j = 1; j <= m; ++j) cols.push_back(PackedSigns::from(scheme.rows.column(j)));

  OrthogonalityReport report;
  report.m = m;
  report.total_classes = BigInt(1) << m;
  report.desired_survives = !balanced(base);
  const BigInt nonempty = report.total_classes - 1;

  if (m == 0) {
    report.cancelled = 0;
    report.ratio_exact = 1;
    report.ratio = 1.0;
    return report;
  }

  // Row-reduce the inversion columns over GF(2).
  std::vector<BasisVector> basis;
  std::vector<PackedSigns> kernel;
  for (unsigned i = 0; i < m; ++i) {
    PackedSigns v = cols[i];
    PackedSigns combo(m);
    combo.flip(i);
    for (const auto& b : basis) {
      if (v.test(b.pivot)) {
        v ^= b.value;
        combo ^= b.combo;
      }
    }
    if (v.is_identity()) {
      kernel.push_back(std::move(combo));
    } else {
      const std::size_t pivot = v.lowest_set();
      basis.push_back({std::move(v), std::move(combo), pivot});
    }
  }
  const std::size_t rank = basis.size();

  if (rank <= options.max_exhaustive_rank) {
    // Every distinct class product w is hit by exactly 2^(m - rank) classes.
    std::uint64_t cancelled_points = 0;
    PackedSigns w(n_rows);
    PackedSigns combo(m);
    const std::uint64_t points = std::uint64_t{1} << rank;
    std::size_t listed = 0;
    for (std::uint64_t i = 0; i < points; ++i) {
      if (i > 0) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(i));
        w ^= basis[bit].value;
        combo ^= basis[bit].combo;
      }
      PackedSigns echo = base;
      echo ^= w;
      if (balanced(echo)) {
        ++cancelled_points;
        continue;
      }
      if (listed >= options.survivor_cap) continue;
      // Preimages: combo xor any kernel combination.
      PackedSigns f = combo;
      const std::uint64_t kernel_points =
          kernel.size() >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << kernel.size());
      for (std::uint64_t k = 0; k < kernel_points && listed < options.survivor_cap; ++k) {
        if (k > 0) f ^= kernel[static_cast<std::size_t>(std::countr_zero(k))];
        if (f.is_identity()) continue;  // desired class
        report.surviving_classes.push_back(combo_to_class(f));
        ++listed;
      }
    }
    report.cancelled = BigInt(cancelled_points) * (BigInt(1) << (m - rank));
    if (balanced(base)) report.cancelled -= 1;  // F = {} is not an unwanted class
    report.ratio_exact = Rational(report.cancelled, nonempty);
    report.ratio = report.ratio_exact.convert_to<double>();
    report.survivors_truncated = BigInt(report.surviving_classes.size()) < nonempty - report.cancelled;
    return report;
  }

  // Sampled verification.
  std::mt19937_64 rng(options.seed);
  std::uint64_t cancelled = 0;
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    PackedSigns combo(m);
    do {
      combo = PackedSigns(m);
      for (unsigned i = 0; i < m; ++i)
        if (rng() & 1u) combo.flip(i);
    } while (combo.is_identity());
    PackedSigns echo = base;
    for (unsigned i = 0; i < m; ++i)
      if (combo.test(i)) echo ^= cols[i];
    if (balanced(echo)) {
      ++cancelled;
    } else if (report.surviving_classes.size() < options.survivor_cap) {
      report.surviving_classes.push_back(combo_to_class(combo));
    }
  }
  report.exhaustive = false;
  report.samples = options.samples;
  report.cancelled = cancelled;
  report.ratio_exact = Rational(BigInt(cancelled), BigInt(options.samples));
  report.ratio = report.ratio_exact.convert_to<double>();
  report.survivors_truncated = true;
  return report;
}

}  // namespace phasecycle
