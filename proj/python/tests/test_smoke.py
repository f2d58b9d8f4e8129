import math

import pytest

import phasecycle as pc


def test_hadamard_scheme_rows_and_ratio():
    scheme = pc.build_scheme("hpc", 32)
    assert scheme.row_count == 128
    report = pc.verify(scheme)
    assert report["desired_survives"]
    assert report["total_classes"] == 2**32
    assert report["ratio"] == pytest.approx(0.984375, abs=1e-9)


def test_complete_cycle_cancels_everything():
    scheme = pc.build_scheme("cpc", 4)
    assert scheme.rows[0] == [1, 1, 1, 1, 1]
    assert pc.verify(scheme)["ratio"] == 1.0
    assert pc.scheme_complexity("cpc", 34) == 2**34


def test_counts_and_ratios():
    assert [pc.count_nonorthogonal(3, q) for q in range(1, 8)] == [0, 0, 7, 7, 0, 0, 1]
    assert pc.hpo_ratio("stacked", 5) == pytest.approx(63 / 64, abs=1e-9)


def test_cpmg2_pathways():
    seq = pc.build_sequence("cpmg", 2, 1.0)
    echoes = {tuple(o): pc.echo_time(seq, o, origin) for o, origin in pc.enumerate_pathways(seq, -1, True)}
    assert echoes == {(0, -1, 1, -1): 1.0, (0, 1, 1, -1): 3.0, (0, 0, 1, -1): 2.0, (0, 1, 0, -1): 1.0}


def test_ideal_refocusing_and_fidelity():
    seq = pc.build_sequence("cpmg", 8, 1e-6)
    noise = pc.NoiseModel()
    noise.detuning_sigma = 1e5
    noise.seed = 7
    result = pc.run_scheme(seq, pc.build_scheme("hpc", 8), noise, ensemble=10)
    assert result["echo_intensity"] == pytest.approx(1.0, abs=1e-9)
    assert pc.fidelity((0, 0, 1), (0, 0, -1)) == 0.0
    noisy = pc.NoiseModel()
    noisy.flip_error = 1 / 28
    hpc = pc.fidelity_benchmark("cp", [2, 32], "hpc", noisy)
    tpc = pc.fidelity_benchmark("cp", [2, 32], "tpc", noisy)
    assert all(h >= t for h, t in zip(hpc, tpc))


def test_fits():
    times = [0.1 * k for k in range(1, 20)]
    amps = [2.0 * math.exp(-t / 0.7) for t in times]
    fit = pc.fit_decay(times, amps, "mono")
    assert fit["time_constant"] == pytest.approx(0.7, rel=1e-6)
    alpha, _ = pc.scaling_exponent([1, 2, 4, 8], [3 * m**0.4 for m in [1, 2, 4, 8]])
    assert alpha == pytest.approx(0.4, abs=1e-9)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        pc.build_scheme("abc", 3)
    with pytest.raises(pc.BudgetExceeded):
        pc.build_scheme("cpc", 30)
    with pytest.raises(pc.ConvergenceError):
        pc.fit_decay([1, 2, 3, 4], [1, 1, 1, 1])
