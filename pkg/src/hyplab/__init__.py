"""Numerical laboratory for coanalytic Toeplitz operators phi(S*) on l^2(N_0).

The four core modules are

* :mod:`hyplab.symbol`   -- disc-algebra symbols and hypothesis certificates,
* :mod:`hyplab.shiftop`  -- truncated upper-triangular Toeplitz operators,
* :mod:`hyplab.spectral` -- essential-spectrum curves and non-Fredholm evidence,
* :mod:`hyplab.dynamics` -- Cauchy-kernel eigenvectors and orbit construction,

tied together by the :mod:`hyplab.labcli` experiment runner.
"""

from hyplab.symbol import (
    BoundaryWitness,
    DiscWitness,
    HypothesisReport,
    Symbol,
    Verdict,
    check_boundary_hypothesis,
    check_disc_hypothesis,
    evaluate,
    main_theorem_check,
    sup_norm_bound,
)
from hyplab.shiftop import (
    OrbitRecord,
    TruncatedOperator,
    apply,
    apply_fast,
    build_truncation,
    orbit,
)
from hyplab.spectral import (
    SpectrumCurve,
    WitnessSequence,
    essential_spectrum_curve,
    lemma_witness,
    min_norm_preimage_growth,
    sigma_min_probe,
)
from hyplab.dynamics import (
    ConstructionResult,
    EigenFamily,
    KernelVector,
    SpanFit,
    construct_hypercyclic_approx,
    kernel_gram,
    kernel_vector,
    sample_eigen_family,
    span_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryWitness",
    "ConstructionResult",
    "DiscWitness",
    "EigenFamily",
    "HypothesisReport",
    "KernelVector",
    "OrbitRecord",
    "SpanFit",
    "SpectrumCurve",
    "Symbol",
    "TruncatedOperator",
    "Verdict",
    "WitnessSequence",
    "apply",
    "apply_fast",
    "build_truncation",
    "check_boundary_hypothesis",
    "check_disc_hypothesis",
    "construct_hypercyclic_approx",
    "essential_spectrum_curve",
    "evaluate",
    "kernel_gram",
    "kernel_vector",
    "lemma_witness",
    "main_theorem_check",
    "min_norm_preimage_growth",
    "orbit",
    "sample_eigen_family",
    "sigma_min_probe",
    "span_residual",
    "sup_norm_bound",
]
