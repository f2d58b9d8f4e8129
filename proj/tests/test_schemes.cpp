#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "phasecycle/errors.hpp"
#include "phasecycle/schemes.hpp"

using namespace phasecycle;

namespace {

// Direct class-by-class count of uncancelled non-empty classes.
struct ClassCount {
  std::uint64_t uncancelled = 0;
  std::vector<std::vector<unsigned>> survivors;
};

ClassCount enumerate_classes(const PhaseScheme& s) {
  ClassCount out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s.m); ++mask) {
    long sum = 0;
    for (std::size_t r = 0; r < s.row_count(); ++r) {
      int v = s.sign[r] * s.rows(r, 0);
      for (unsigned i = 0; i < s.m; ++i)
        if (mask >> i & 1) v *= s.rows(r, i + 1);
      sum += v;
    }
    if (sum != 0) {
      ++out.uncancelled;
      std::vector<unsigned> f;
      for (unsigned i = 0; i < s.m; ++i)
        if (mask >> i & 1) f.push_back(i + 1);
      out.survivors.push_back(f);
    }
  }
  return out;
}

PhaseScheme random_scheme(std::mt19937_64& rng, unsigned m, std::size_t rows) {
  PhaseScheme s;
  s.m = m;
  s.rows = SignMatrix(rows, m + 1);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < rows; ++r) {
    for (unsigned c = 0; c <= m; ++c) s.rows(r, c) = coin(rng) ? 1 : -1;
    s.sign.push_back(coin(rng) ? 1 : -1);
  }
  return s;
}

std::vector<std::vector<unsigned>> sorted(std::vector<std::vector<unsigned>> v) {
  std::sort(v.begin(), v.end());
  return v;
}

BigInt uncancelled(const OrthogonalityReport& r) { return r.total_classes - 1 - r.cancelled; }

}  // namespace

TEST(Tpc, TwoRowsCycleThePreparationPulse) {
  const auto s = build_tpc(5);
  ASSERT_EQ(s.row_count(), 2u);
  EXPECT_EQ(s.rows(0, 0), 1);
  EXPECT_EQ(s.rows(1, 0), -1);
  for (unsigned c = 1; c <= 5; ++c) EXPECT_EQ(s.rows(1, c), 1);
  EXPECT_EQ(s.desired_weight(), 2);
  const auto r = verify_scheme(s);
  EXPECT_TRUE(r.desired_survives);
  // Only population-type terms cancel; every class of coherent echoes stays.
  EXPECT_EQ(r.cancelled, 0);
}

TEST(Cpc, TwoPulseTableRows) {
  const auto s = build_cpc(2);
  const auto expected = SignMatrix::from_rows({{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}});
  EXPECT_EQ(s.rows, expected);
  EXPECT_EQ(s.sign, (SignVector{1, 1, 1, 1}));
}

TEST(Cpc, FourPulseTableRows) {
  const auto s = build_cpc(4);
  ASSERT_EQ(s.row_count(), 16u);
  for (std::size_t r = 0; r < 16; ++r) {
    EXPECT_EQ(s.rows(r, 0), 1);
    EXPECT_EQ(s.sign[r], 1);
    for (unsigned c = 1; c <= 4; ++c) EXPECT_EQ(s.rows(r, c), (r >> (4 - c) & 1) ? -1 : 1) << r << "," << c;
  }
}

TEST(Cpc, CancelsEveryUndesiredClass) {
  for (unsigned m = 1; m <= 12; ++m) {
    const auto s = build_cpc(m);
    EXPECT_EQ(s.row_count(), std::size_t{1} << m);
    const auto r = verify_scheme(s);
    EXPECT_EQ(r.ratio, 1.0) << m;
    EXPECT_EQ(r.ratio_exact, 1) << m;
    EXPECT_TRUE(r.exhaustive);
    EXPECT_TRUE(r.surviving_classes.empty());
  }
}

TEST(Cpc, BudgetGuardsRowCount) {
  EXPECT_THROW(build_cpc(21), BudgetExceeded);
  EXPECT_NO_THROW(build_cpc(8, 8));
  EXPECT_THROW(build_cpc(9, 8), BudgetExceeded);
  EXPECT_THROW(build_cpc(0), ValidationError);
}

TEST(Hpc, RowCounts) {
  EXPECT_EQ(build_hpc(32).row_count(), 128u);
  EXPECT_EQ(build_hpc(34).row_count(), 256u);
  EXPECT_EQ(build_hpc(16).row_count(), 64u);
  for (unsigned m = 2; m <= 200; ++m) {
    const auto rows = build_hpc(m).row_count();
    EXPECT_GE(rows, 4u * m) << m;
    EXPECT_LE(rows, 8u * m - 8) << m;
    EXPECT_EQ(scheme_complexity(SchemeKind::hpc, m), rows);
  }
}

TEST(Hpc, BlockStructure) {
  const auto s = build_hpc(4);
  ASSERT_EQ(s.row_count(), 16u);
  for (std::size_t r = 0; r < 16; ++r) {
    const int block_sign = r < 8 ? 1 : -1;
    EXPECT_EQ(s.sign[r], block_sign);
    EXPECT_EQ(s.rows(r, 0), block_sign);
    EXPECT_EQ(s.rows(r, 1), 1);
  }
  // The second half of each preparation block negates the first.
  for (std::size_t r = 0; r < 4; ++r)
    for (unsigned c = 2; c <= 4; ++c) EXPECT_EQ(s.rows(r + 4, c), -s.rows(r, c));
}

TEST(Hpc, RatioRelatesToStackedMatrixRatio) {
  // Class {1} survives (constant column) and every F' u {1} mirrors F'.
  for (unsigned n = 2; n <= 6; ++n) {
    const unsigned m = 1u << n;
    const auto r = verify_scheme(build_hpc(m));
    BigInt stacked_uncancelled = 0;
    for (unsigned q = 2; q < m; q += 2) stacked_uncancelled += count_nonorthogonal_exact(n, q).d;
    EXPECT_EQ(uncancelled(r), 2 * stacked_uncancelled + 1) << n;

    const Rational stacked = hpo_ratio(HadamardKind::stacked, n).exact;
    EXPECT_EQ(Rational(stacked_uncancelled, (BigInt(1) << (m - 1)) - 1), 1 - stacked) << n;
    EXPECT_NEAR(r.ratio, stacked.convert_to<double>(), 1.0 / (std::ldexp(1.0, static_cast<int>(m)) - 1) + 1e-15) << n;
  }
}

TEST(Hpc, AboveNinetyEightPercentPastSixteenPulses) {
  for (unsigned m = 17; m <= 64; ++m) EXPECT_GT(verify_scheme(build_hpc(m)).ratio, 0.98) << m;
}

TEST(Hpc, OddClassesOutsideTheFixedPulseCancel) {
  for (unsigned m : {4u, 8u, 11u}) {
    VerifyOptions opt;
    opt.survivor_cap = 1u << m;
    const auto r = verify_scheme(build_hpc(m), opt);
    ASSERT_FALSE(r.survivors_truncated);
    for (const auto& f : r.surviving_classes) {
      const std::size_t outside = f.size() - (f.front() == 1 ? 1 : 0);
      EXPECT_EQ(outside % 2, 0u);
    }
  }
}

TEST(VerifyScheme, MatchesDirectClassEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const unsigned m = 1 + trial % 10;
    const std::size_t rows = 1 + rng() % 16;
    const auto s = random_scheme(rng, m, rows);
    VerifyOptions opt;
    opt.survivor_cap = 1u << m;
    const auto r = verify_scheme(s, opt);
    const auto oracle = enumerate_classes(s);
    EXPECT_EQ(uncancelled(r), oracle.uncancelled) << trial;
    EXPECT_EQ(sorted(r.surviving_classes), sorted(oracle.survivors)) << trial;
    EXPECT_EQ(r.ratio_exact, Rational((std::uint64_t{1} << m) - 1 - oracle.uncancelled, (std::uint64_t{1} << m) - 1));
  }
}

TEST(VerifyScheme, StructuredSchemesMatchEnumeration) {
  for (unsigned m = 1; m <= 14; ++m)
    for (auto s : {build_tpc(m), build_hpc(m)}) {
      VerifyOptions opt;
      opt.survivor_cap = 1u << m;
      EXPECT_EQ(sorted(verify_scheme(s, opt).surviving_classes), sorted(enumerate_classes(s).survivors)) << m;
    }
}

TEST(VerifyScheme, DesiredClassSurvivesForBuiltSchemes) {
  for (unsigned m = 1; m <= 40; ++m) {
    EXPECT_TRUE(verify_scheme(build_tpc(m)).desired_survives);
    EXPECT_TRUE(verify_scheme(build_hpc(m)).desired_survives);
    if (m <= 12) EXPECT_TRUE(verify_scheme(build_cpc(m)).desired_survives);
  }
}

TEST(VerifyScheme, DetectsCancelledDesiredEcho) {
  auto s = build_cpc(2);
  s.sign = {1, -1, 1, -1};
  EXPECT_FALSE(verify_scheme(s).desired_survives);
}

TEST(VerifyScheme, SamplesAboveRankLimit) {
  VerifyOptions opt;
  opt.max_exhaustive_rank = 4;
  opt.samples = 20000;
  const auto r = verify_scheme(build_cpc(8), opt);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_EQ(r.samples, 20000u);
  EXPECT_EQ(r.ratio, 1.0);
  const auto exact = verify_scheme(build_hpc(40)).ratio;
  opt.max_exhaustive_rank = 3;
  opt.samples = 200000;
  EXPECT_NEAR(verify_scheme(build_hpc(40), opt).ratio, exact, 0.005);
}

TEST(VerifyScheme, SurvivorListIsCapped) {
  VerifyOptions opt;
  opt.survivor_cap = 3;
  const auto r = verify_scheme(build_tpc(4), opt);
  EXPECT_EQ(r.surviving_classes.size(), 3u);
  EXPECT_TRUE(r.survivors_truncated);
}

TEST(SchemeComplexity, Values) {
  EXPECT_EQ(scheme_complexity(SchemeKind::tpc, 100), 2);
  EXPECT_EQ(scheme_complexity(SchemeKind::cpc, 34), BigInt(17179869184ULL));
  EXPECT_EQ(scheme_complexity(SchemeKind::hpc, 34), 256);
  EXPECT_THROW(scheme_complexity(SchemeKind::custom, 3), ValidationError);
}

TEST(PhaseSchemeValidate, RejectsShapeMismatch) {
  auto s = build_tpc(3);
  s.sign.pop_back();
  EXPECT_THROW(s.validate(), ValidationError);
  s = build_tpc(3);
  s.m = 4;
  EXPECT_THROW(s.validate(), ValidationError);
  EXPECT_THROW(verify_scheme(s), ValidationError);
}

TEST(SchemeKindNames, RoundTrip) {
  for (auto k : {SchemeKind::tpc, SchemeKind::cpc, SchemeKind::hpc, SchemeKind::custom})
    EXPECT_EQ(scheme_kind_from_string(to_string(k)), k);
  EXPECT_THROW(scheme_kind_from_string("xyz"), ValidationError);
  EXPECT_THROW(build_scheme(SchemeKind::custom, 3), ValidationError);
}
