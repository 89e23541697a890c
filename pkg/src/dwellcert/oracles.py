"""Brute-force checks that do not touch the LMI machinery.

A cycle whose back-to-back repetition is an admissible signal and whose
transition product has spectral radius >= 1 proves that the system is not
GUAS on its dwell range.  Not finding such a cycle proves nothing.
"""

from dataclasses import dataclass

from .cycles import DEFAULT_CAP, enumerate_cycles, transition_matrix
from .errors import InadmissibleSignal
from .matrix import spectral_radius

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class PeriodicVerdict:
    radius: float
    stable: bool
    indeterminate: bool


@dataclass(frozen=True)
class WitnessReport:
    found: bool
    cycle: object = None
    radius: float = None
    scanned: int = 0


def _check_cycle(sys, cycle):
    for m, t in zip(cycle.modes, cycle.durations):
        if not 1 <= m <= sys.num_modes:
            raise InadmissibleSignal(f"mode {m} outside 1..{sys.num_modes}")
        if not sys.dwell_min <= t <= sys.dwell_max:
            raise InadmissibleSignal(f"duration {t} outside [{sys.dwell_min}, {sys.dwell_max}]")
    if any(a == b for a, b in zip(cycle.modes, cycle.modes[1:])):
        raise InadmissibleSignal("consecutive modes repeat inside the cycle")
    if cycle.L > 1 and not cycle.repeats_admissibly():
        raise InadmissibleSignal("cycle's last and first modes coincide; its repetition is inadmissible")


def periodic_stability_oracle(sys, cycle, tol=BOUNDARY_TOL):
    """Spectral radius of the cycle product; stable iff it is below ``1 - tol``."""
    _check_cycle(sys, cycle)
    r = spectral_radius(transition_matrix(sys, cycle))
    return PeriodicVerdict(r, r < 1.0 - tol, 1.0 - tol <= r <= 1.0 + tol)


def instability_witness_search(sys, L_max, cap=DEFAULT_CAP):
    """First cycle (by ``(L, rank)``) with admissible repetition and radius >= 1."""
    if L_max < 1:
        raise ValueError("L_max must be >= 1")
    scanned = 0
    for L in range(1, L_max + 1):
        family = enumerate_cycles(sys, L, cap)
        powers = {}
        for c in family:
            if not c.repeats_admissibly():
                continue
            scanned += 1
            r = spectral_radius(transition_matrix(sys, c, powers))
            if r >= 1.0:
                return WitnessReport(True, c, r, scanned)
    return WitnessReport(False, scanned=scanned)
