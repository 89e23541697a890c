"""L-switching-cycle enumeration, transition products and problem-size counts.

A cycle is ``L`` consecutive activations ``(modes, durations)`` with no
immediate mode repeat and every duration in the dwell range.  Families are
listed in lexicographic order (mode sequence first, then duration tuple) and
``h`` is the 1-based rank in that order.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded
from .matrix import mat_pow

DEFAULT_CAP = 20000


@dataclass(frozen=True)
class CycleSpec:
    modes: tuple
    durations: tuple
    index: int

    @property
    def L(self):
        return len(self.modes)

    @property
    def total_duration(self):
        return sum(self.durations)

    def mode_at_step(self, k):
        """1-based mode active at step ``k`` in ``[0, total_duration)``."""
        if not 0 <= k < self.total_duration:
            raise IndexError(f"step {k} outside [0, {self.total_duration})")
        start = 0
        for m, t in zip(self.modes, self.durations):
            if k < start + t:
                return m
            start += t
        raise AssertionError("unreachable")

    def step_modes(self):
        """Mode at every step ``0..T_h-1``."""
        return [m for m, t in zip(self.modes, self.durations) for _ in range(t)]

    def repeats_admissibly(self):
        """True when back-to-back copies of this cycle form an admissible signal."""
        return self.modes[-1] != self.modes[0]

    def segments(self):
        return tuple(zip(self.modes, self.durations))


def cycle_count(N, L, d, allow_repeats=False):
    """``N (N-1)^(L-1) d^L`` (``N^L d^L`` when repeats are allowed)."""
    if allow_repeats:
        return N**L * d**L
    return N * (N - 1) ** (L - 1) * d**L


@dataclass(frozen=True)
class CycleFamily:
    system: object
    L: int
    cycles: tuple
    allow_repeats: bool = False

    def __len__(self):
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)

    def __getitem__(self, h):
        """Cycle of 1-based rank ``h``."""
        if not 1 <= h <= len(self.cycles):
            raise IndexError(f"cycle rank {h} outside 1..{len(self.cycles)}")
        return self.cycles[h - 1]

    def rank(self, modes, durations):
        """1-based rank of a (modes, durations) pair, computed arithmetically."""
        sys = self.system
        N, d, lo = sys.num_modes, sys.d, sys.dwell_min
        modes, durations = tuple(modes), tuple(durations)
        if len(modes) != self.L or len(durations) != self.L:
            raise ValueError("cycle length does not match family L")
        mode_rank = 0
        prev = None
        for m in modes:
            if not 1 <= m <= N:
                raise ValueError(f"mode {m} outside 1..{N}")
            if self.allow_repeats:
                mode_rank = mode_rank * N + (m - 1)
            elif prev is None:
                mode_rank = m - 1
            else:
                if m == prev:
                    raise ValueError("consecutive modes repeat")
                mode_rank = mode_rank * (N - 1) + (m - 1 - (m > prev))
            prev = m
        dur_rank = 0
        for t in durations:
            if not lo <= t <= sys.dwell_max:
                raise ValueError(f"duration {t} outside dwell range")
            dur_rank = dur_rank * d + (t - lo)
        return mode_rank * d**self.L + dur_rank + 1

    def transition_matrices(self):
        powers = {}
        return [transition_matrix(self.system, c, powers) for c in self.cycles]


def _mode_sequences(N, L, allow_repeats):
    if allow_repeats:
        yield from itertools.product(range(1, N + 1), repeat=L)
        return
    for seq in itertools.product(range(1, N + 1), repeat=L):
        if all(a != b for a, b in zip(seq, seq[1:])):
            yield seq


def enumerate_cycles(sys, L, cap=DEFAULT_CAP, allow_repeats=False):
    """All cycles of length ``L`` in lexicographic order.

    Raises :class:`CapExceeded` before generating anything when the count
    exceeds ``cap``.
    """
    if int(L) != L or L < 1:
        raise ValueError(f"L must be a positive integer, got {L}")
    L = int(L)
    count = cycle_count(sys.num_modes, L, sys.d, allow_repeats)
    if count > cap:
        raise CapExceeded(count, cap)
    durations = list(itertools.product(range(sys.dwell_min, sys.dwell_max + 1), repeat=L))
    cycles = []
    for modes in _mode_sequences(sys.num_modes, L, allow_repeats):
        for dur in durations:
            cycles.append(CycleSpec(modes, dur, len(cycles) + 1))
    return CycleFamily(sys, L, tuple(cycles), allow_repeats)


def transition_matrix(sys, cycle, powers=None):
    """``A_{i_L}^{tau_L} ... A_{i_1}^{tau_1}``: the last activation is leftmost.

    ``powers`` is an optional dict memoizing ``A_mode ** p`` by ``(mode, p)``.
    """
    if powers is None:
        powers = {}
    phi = np.eye(sys.state_dim)
    for m, t in zip(cycle.modes, cycle.durations):
        key = (m, t)
        if key not in powers:
            powers[key] = mat_pow(sys.mode(m), t)
        phi = powers[key] @ phi
    return phi


def complexity_counts(sys, L, condition):
    """``(num_variable_blocks, num_lmis)`` for condition ``'a'`` or ``'b'``.

    Condition ``b``: ``(M, M**2)``.  Condition ``a``: ``(sum(T_h + 1),
    M**2 + sum(T_h))``, one step constraint per ``k`` in ``[0, T_h - 1]``.
    """
    N, d = sys.num_modes, sys.d
    M = cycle_count(N, L, d)
    if condition == "b":
        return M, M * M
    if condition != "a":
        raise ValueError(f"condition must be 'a' or 'b', got {condition!r}")
    # sum of T_h over cycles: every position takes every duration equally often
    mode_seqs = N * (N - 1) ** (L - 1)
    dur_sum = mode_seqs * L * d ** (L - 1) * sum(range(sys.dwell_min, sys.dwell_max + 1))
    return M + dur_sum, M * M + dur_sum
