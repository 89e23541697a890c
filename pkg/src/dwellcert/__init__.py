"""Stability certificates for discrete-time switched linear systems under ranged dwell time."""

from .certificates import (
    CertificateA,
    CertificateB,
    convert_b_to_a,
    extract_b_from_a,
    load_certificate,
    verify_certificate_a,
    verify_certificate_b,
)
from .cycles import CycleFamily, CycleSpec, complexity_counts, enumerate_cycles, transition_matrix
from .errors import (
    CapExceeded,
    CertificateError,
    ConversionFailure,
    DwellCertError,
    InadmissibleSignal,
    NumericalFailure,
    SystemFormatError,
)
from .lmi import LmiProblem, build_condition_a, build_condition_b, build_multistep
from .matrix import mat_pow, max_sym_eigenvalue, spectral_radius
from .oracles import instability_witness_search, periodic_stability_oracle
from .solver import FeasibilityResult, SolverOptions, Status, solve_feasibility
from .sweep import run_sweep
from .system import (
    SwitchedSystem,
    SwitchingSignal,
    load_system,
    periodic_signal,
    random_admissible_signal,
    simulate,
)

__version__ = "0.1.0"
