// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails, except those named with --known-failure.

#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "phasecycle/analysis.hpp"
#include "phasecycle/errors.hpp"
#include "phasecycle/hadamard.hpp"
#include "phasecycle/io.hpp"
#include "phasecycle/pathways.hpp"
#include "phasecycle/schemes.hpp"
#include "phasecycle/simulator.hpp"
#include "support.hpp"

using namespace phasecycle;
using phasecycle::testing::kPi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_number(v); }

// ---------------------------------------------------------------------------

Outcome closed_forms() {
  const auto t0 = Clock::now();
  std::size_t checked = 0;
  for (unsigned n = 2; n <= 5; ++n) {
    const std::size_t order = std::size_t{1} << n;
    const auto set = SignVectorSet::from_columns(sylvester(order), 1);
    const auto counts = count_nonorthogonal_brute_all(set, std::uint64_t{1} << 32);
    for (unsigned q = 1; q < order; ++q) {
      const auto exact = count_nonorthogonal_exact(n, q);
      if (exact.d != counts[q] || exact.p != Rational(BigInt(counts[q]), binomial(order - 1, q)))
        return {false, "mismatch at n=" + std::to_string(n) + " q=" + std::to_string(q)};
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return {secs < 60.0, std::to_string(checked) + " (n,q) pairs exact, " + fmt(secs) + " s"};
}

Outcome hpo_ratios() {
  const double plain = hpo_ratio(HadamardKind::plain, 5).value * 100;
  const double stacked = hpo_ratio(HadamardKind::stacked, 5).value * 100;
  double worst = 1.0;
  unsigned worst_m = 0;
  for (unsigned m = 17; m <= 64; ++m) {
    const double r = verify_scheme(build_hpc(m)).ratio;
    if (r < worst) {
      worst = r;
      worst_m = m;
    }
  }
  const bool pass = std::abs(plain - 96.88) <= 0.01 && std::abs(stacked - 98.44) <= 0.01 && worst > 0.98;
  return {pass, "plain " + fmt(plain) + "%, stacked " + fmt(stacked) + "%, min HPC ratio m=17..64 " + fmt(worst) +
                    " at m=" + std::to_string(worst_m)};
}

Outcome cpc_completeness() {
  for (unsigned m = 1; m <= 12; ++m) {
    const auto s = build_cpc(m);
    if (s.row_count() != (std::size_t{1} << m)) return {false, "row count wrong at m=" + std::to_string(m)};
    if (verify_scheme(s).ratio != 1.0) return {false, "ratio below 1 at m=" + std::to_string(m)};
  }
  const auto two = build_cpc(2);
  if (two.rows != SignMatrix::from_rows({{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}}) ||
      two.sign != SignVector{1, 1, 1, 1})
    return {false, "CPMG-2 table mismatch"};
  const auto four = build_cpc(4);
  for (std::size_t r = 0; r < 16; ++r) {
    if (four.rows(r, 0) != 1 || four.sign[r] != 1) return {false, "CPMG-4 table mismatch"};
    for (unsigned c = 1; c <= 4; ++c)
      if (four.rows(r, c) != (((r >> (4 - c)) & 1) ? -1 : 1)) return {false, "CPMG-4 table mismatch"};
  }
  return {true, "ratio 1 for m=1..12, 2^m rows, 4- and 16-step tables match"};
}

// Every multiset of rows (row order does not affect any class sum). A row is
// (w, g_1..g_m) with w the product of result sign and preparation phase.
bool complete_cycle_exists(unsigned m, unsigned rows) {
  const unsigned types = 1u << (m + 1);
  std::vector<unsigned> pick(rows, 0);
  while (true) {
    long desired = 0;
    for (unsigned t : pick) desired += (t & 1) ? -1 : 1;
    bool all = desired != 0;
    for (unsigned mask = 1; all && mask < (1u << m); ++mask) {
      long sum = 0;
      for (unsigned t : pick) {
        const unsigned bits = ((t >> 1) & mask);
        sum += ((t & 1) ^ (std::popcount(bits) & 1)) ? -1 : 1;
      }
      all = sum == 0;
    }
    if (all) return true;
    // Next non-decreasing sequence.
    int i = static_cast<int>(rows) - 1;
    while (i >= 0 && pick[i] == types - 1) --i;
    if (i < 0) return false;
    ++pick[i];
    for (unsigned j = i + 1; j < rows; ++j) pick[j] = pick[i];
  }
}

Outcome cpc_lower_bound() {
  const auto t0 = Clock::now();
  for (unsigned m : {2u, 3u})
    for (unsigned rows = 1; rows < (1u << m); ++rows)
      if (complete_cycle_exists(m, rows))
        return {false, "found a complete cycle with " + std::to_string(rows) + " rows for m=" + std::to_string(m)};
  const double secs = seconds_since(t0);
  return {secs < 300.0, "no complete cycle below 2^m rows for m=2,3 (" + fmt(secs) + " s)"};
}

Outcome hpc_complexity() {
  const auto r32 = build_hpc(32).row_count(), r34 = build_hpc(34).row_count(), r16 = build_hpc(16).row_count();
  bool bounds = true;
  for (unsigned m : {16u, 32u, 34u}) {
    const auto rows = build_hpc(m).row_count();
    bounds = bounds && rows >= 4u * m && rows <= 8u * m - 8;
  }
  return {r32 == 128 && r34 == 256 && r16 == 64 && bounds,
          "m=32: " + std::to_string(r32) + ", m=34: " + std::to_string(r34) + ", m=16: " + std::to_string(r16)};
}

Outcome pathway_oracle() {
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  const int draws = 200;
  for (int d = 0; d < draws; ++d) {
    const auto c = phasecycle::testing::random_case(rng, 6);
    const QubitState a = pathway_sum(c.seq, c.noise, c.detuning, c.measure_time);
    const QubitState b = propagate(c.seq, c.noise, c.detuning, c.measure_time);
    worst = std::max(worst, (a.matrix() - b.matrix()).norm() / b.matrix().norm());
  }
  return {worst < 1e-10, std::to_string(draws) + " draws, worst relative error " + fmt(worst)};
}

Outcome echo_table() {
  const double tau = 1.0;
  const auto seq = build_sequence(SequenceKind::cpmg, 2, tau);
  const auto spacings = pulse_spacings(seq);
  const std::vector<std::pair<std::vector<int>, double>> table = {
      {{0, -1, 1, -1}, tau}, {{0, 1, 1, -1}, 3 * tau}, {{0, 0, 1, -1}, 2 * tau}, {{0, 1, 0, -1}, tau}};
  const auto found = enumerate_pathways(seq, -1, true);
  if (found.size() != table.size()) return {false, std::to_string(found.size()) + " echo-forming pathways"};
  for (const auto& [orders, when] : table) {
    const Pathway p{orders, 0};
    if (std::find(found.begin(), found.end(), p) == found.end()) return {false, "missing pathway"};
    const auto t = echo_time(p, spacings);
    if (!t || *t != when) return {false, "wrong echo position"};
  }
  return {true, "4 pathways with echoes at tau, 3tau, 2tau, tau"};
}

Outcome refocusing() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  double worst = 0.0;
  for (auto kind : {SequenceKind::cp, SequenceKind::cpmg, SequenceKind::udd})
    for (unsigned m = 1; m <= 64; ++m) {
      const auto seq = build_sequence(kind, m, kind == SequenceKind::udd ? 1e-3 : 1e-5);
      const auto axis = ideal_echo_axis(seq);
      for (int k = 0; k < 5; ++k) {
        const double dw = u(rng) / 1e-5;
        const double a = dot(propagate(seq, NoiseModel{}, dw, seq.echo_time).bloch(), axis);
        worst = std::max(worst, std::abs(a - 1.0));
      }
    }
  return {worst <= 1e-9, "CP/CPMG/UDD m=1..64, worst |A-1| = " + fmt(worst)};
}

double apparent_t2(SchemeKind kind, const NoiseModel& noise, unsigned m, std::size_t ensemble) {
  std::vector<DecayPoint> pts;
  const int n = 12;
  for (int k = 0; k < n; ++k) {
    const double total = noise.t2 * 0.1 * std::pow(20.0, static_cast<double>(k) / (n - 1));
    const auto seq = build_sequence(SequenceKind::cpmg, m, total / (2.0 * m));
    const auto res = run_scheme(seq, build_scheme(kind, m), noise, {ensemble, 1, false});
    pts.push_back({total, dot(res.combined_final, ideal_echo_axis(seq))});
  }
  return fit_decay(pts, DecayModel::mono).time_constant;
}

double split_constant(SplitChannel channel, const NoiseModel& noise, double tau, double first, double step) {
  std::vector<DecayPoint> pts;
  for (int k = 0; k < 10; ++k) {
    const double delay = first + step * k;
    pts.push_back({delay, split_echo(channel, tau, delay, noise, 300)});
  }
  return fit_decay(pts, DecayModel::mono).time_constant;
}

Outcome overestimation() {
  const auto t0 = Clock::now();
  NoiseModel noise;
  noise.t2 = 1.0;
  noise.t1 = 200.0;
  noise.flip_error = 0.1;
  noise.detuning_sigma = 2000.0;
  noise.seed = 1;
  const double tpc = apparent_t2(SchemeKind::tpc, noise, 16, 500);
  const double hpc = apparent_t2(SchemeKind::hpc, noise, 16, 500);

  NoiseModel split = noise;
  split.t1 = 600.0;
  split.flip_error = 0.2;
  const double desired = split_constant(SplitChannel::desired, split, 0.05, 0.1, 0.2);
  const double undesired = split_constant(SplitChannel::undesired, split, 0.05, 0.1, 120.0);
  const double secs = seconds_since(t0);

  const double over = tpc / hpc;
  const bool pass = over >= 1.2 && std::abs(hpc - noise.t2) <= 0.1 * noise.t2 && undesired / desired > 50.0 &&
                    secs < 120.0;
  return {pass, "T2app TPC/HPC = " + fmt(over) + " (need >= 1.2), HPC T2app/T2 = " + fmt(hpc / noise.t2) +
                    ", split decay-constant ratio " + fmt(undesired / desired) + ", " + fmt(secs) + " s"};
}

std::vector<ScalingPoint> fixture(const std::string& cycling, const std::string& sequence) {
  const CsvTable t = read_csv_file(std::string(PHASECYCLE_DATA_DIR) + "/t2_cu_mnt.csv");
  std::vector<ScalingPoint> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    if (t.rows[r][t.column("phase_cycling")] == cycling && t.rows[r][t.column("sequence")] == sequence)
      out.push_back({t.number(r, t.column("m")), t.number(r, t.column("T2_us"))});
  return out;
}

Outcome scaling() {
  const double hpc = scaling_exponent(fixture("HPC", "CPMG")).alpha;
  const double tpc = scaling_exponent(fixture("TPC", "CPMG")).alpha;
  const double udd = scaling_exponent(fixture("HPC", "UDD")).alpha;
  const bool pass = std::abs(hpc - 0.17) <= 0.03 && std::abs(tpc - 0.42) <= 0.03 && std::abs(udd - 0.81) <= 0.08;
  return {pass, "HPC-CPMG " + fmt(hpc) + ", TPC-CPMG " + fmt(tpc) + ", HPC-UDD " + fmt(udd)};
}

Outcome fidelity_suite() {
  const Matrix2c up = density_from_bloch({0, 0, 1});
  const Matrix2c down = density_from_bloch({0, 0, -1});
  const Matrix2c mixed = density_from_bloch({0, 0, 0});
  const Matrix2c tilted = density_from_bloch({0.3, -0.2, 0.5});
  const bool references = fidelity(up, up) == 1.0 && fidelity(up, down) == 0.0 && fidelity(mixed, up) == 0.5 &&
                          std::abs(fidelity(tilted, tilted) - 1.0) < 1e-12;

  std::vector<unsigned> ms;
  for (unsigned m = 1; m <= 64; ++m) ms.push_back(m);
  double worst_ideal = 0.0, worst_det = 0.0;
  for (auto family : {SequenceKind::cp, SequenceKind::cpmg, SequenceKind::udd})
    for (auto scheme : {SchemeKind::tpc, SchemeKind::hpc})
      for (const auto& pt : fidelity_benchmark(family, ms, scheme, NoiseModel{})) {
        worst_ideal = std::max(worst_ideal, std::abs(pt.fidelity - 1.0));
        worst_det = std::max(worst_det, std::abs(pt.state.rho.determinant()));
      }

  NoiseModel noise;
  noise.flip_error = 1.0 / 28;
  const unsigned sweep[] = {2, 4, 8, 16, 24, 32, 48, 64, 96, 128};
  const auto cp_tpc = fidelity_benchmark(SequenceKind::cp, sweep, SchemeKind::tpc, noise);
  const auto cp_hpc = fidelity_benchmark(SequenceKind::cp, sweep, SchemeKind::hpc, noise);
  NoiseModel udd_noise = noise;
  udd_noise.detuning_sigma = 2e5;
  udd_noise.seed = 3;
  BenchmarkOptions udd_opt;
  udd_opt.timing = 1e-5;
  udd_opt.ensemble_size = 50;
  const auto udd_tpc = fidelity_benchmark(SequenceKind::udd, sweep, SchemeKind::tpc, udd_noise, udd_opt);
  const auto udd_hpc = fidelity_benchmark(SequenceKind::udd, sweep, SchemeKind::hpc, udd_noise, udd_opt);
  bool dominates = true;
  double cp_gap = 1.0, udd_gap = 1.0;
  for (std::size_t i = 0; i < std::size(sweep); ++i) {
    dominates = dominates && cp_hpc[i].fidelity >= cp_tpc[i].fidelity && udd_hpc[i].fidelity >= udd_tpc[i].fidelity;
    cp_gap = std::min(cp_gap, cp_hpc[i].fidelity - cp_tpc[i].fidelity);
    udd_gap = std::min(udd_gap, udd_hpc[i].fidelity - udd_tpc[i].fidelity);
  }
  const bool pass = references && worst_ideal <= 1e-9 && worst_det < 1e-12 && dominates;
  return {pass, std::string("reference values ") + (references ? "exact" : "WRONG") + ", ideal |F-1| <= " +
                    fmt(worst_ideal) + ", max det rho_eff " + fmt(worst_det) + ", min HPC-TPC gap CP " + fmt(cp_gap) +
                    " UDD " + fmt(udd_gap) + " (UDD m=128: TPC " + fmt(udd_tpc.back().fidelity) + ", HPC " +
                    fmt(udd_hpc.back().fidelity) + ")"};
}

Outcome scheme_equivalence() {
  double worst = 0.0;
  for (unsigned m = 1; m <= 8; ++m)
    for (auto kind : {SequenceKind::cp, SequenceKind::cpmg, SequenceKind::udd}) {
      const auto seq = build_sequence(kind, m, kind == SequenceKind::udd ? 1e-5 : 1e-6);
      NoiseModel noise;
      noise.detuning_sigma = 4e5;
      noise.t2 = 2e-5;
      noise.seed = m;
      const SchemeRunOptions opt{20, 1, true};
      const auto tpc = run_scheme(seq, build_tpc(m), noise, opt);
      for (auto other : {SchemeKind::cpc, SchemeKind::hpc}) {
        const auto res = run_scheme(seq, build_scheme(other, m), noise, opt);
        for (std::size_t k = 0; k < tpc.times.size(); ++k) {
          const auto& a = tpc.combined_trace[k];
          const auto& b = res.combined_trace[k];
          worst = std::max({worst, std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
        }
      }
    }
  return {worst <= 1e-10, "max deviation " + fmt(worst) + " over CP/CPMG/UDD m=1..8"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> known_failures;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failure" && i + 1 < argc) {
      known_failures.insert(argv[++i]);
    } else {
      std::cerr << "usage: " << argv[0] << " [--known-failure NAME]...\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"orthogonality-closed-forms", closed_forms},
      {"hpo-ratios", hpo_ratios},
      {"cpc-completeness", cpc_completeness},
      {"cpc-lower-bound", cpc_lower_bound},
      {"hpc-complexity", hpc_complexity},
      {"pathway-oracle", pathway_oracle},
      {"cpmg2-echo-table", echo_table},
      {"refocusing-exactness", refocusing},
      {"overestimation", overestimation},
      {"scaling-exponents", scaling},
      {"fidelity-suite", fidelity_suite},
      {"scheme-equivalence", scheme_equivalence},
  };

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool excused = !o.pass && known_failures.count(name);
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail
              << (excused ? "  [known failure]" : "") << std::endl;
    if (!o.pass && !excused) ++failures;
  }
  std::cout << (failures == 0 ? "acceptance: all gating criteria pass" : "acceptance: gating failures present")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
