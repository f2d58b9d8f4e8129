"""Phase-cycling design and two-level echo simulation."""

from ._core import (
    BudgetExceeded,
    ConvergenceError,
    NoiseModel,
    PhaseScheme,
    PulseSequence,
    ValidationError,
    build_scheme,
    build_sequence,
    count_nonorthogonal,
    echo_time,
    enumerate_pathways,
    fidelity,
    fidelity_benchmark,
    fit_decay,
    hpo_ratio,
    run_scheme,
    scaling_exponent,
    scheme_complexity,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
