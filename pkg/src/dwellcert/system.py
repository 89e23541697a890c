"""Switched linear systems with ranged dwell time, signals and simulation."""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InadmissibleSignal, SystemFormatError
from .matrix import as_matrix


@dataclass(frozen=True)
class SwitchedSystem:
    """``x(k+1) = A[sigma(k)] x(k)`` with every dwell in ``[dwell_min, dwell_max]``.

    ``modes`` is a read-only ``(N, n, n)`` array.  Mode indices are 1-based
    everywhere in the public API.
    """

    modes: np.ndarray
    dwell_min: int
    dwell_max: int

    def __post_init__(self):
        modes = np.array(self.modes, dtype=np.float64)
        if modes.ndim != 3:
            raise SystemFormatError("dimension mismatch: modes must be a list of square matrices")
        if modes.shape[0] < 2:
            raise SystemFormatError(f"need at least 2 modes, got {modes.shape[0]}")
        if modes.shape[1] != modes.shape[2]:
            raise SystemFormatError(f"dimension mismatch: mode matrices are {modes.shape[1]}x{modes.shape[2]}")
        if not np.all(np.isfinite(modes)):
            raise SystemFormatError("mode matrices have non-finite entries")
        lo, hi = self.dwell_min, self.dwell_max
        if int(lo) != lo or int(hi) != hi or not 1 <= lo <= hi:
            raise SystemFormatError(f"dwell bounds must satisfy 1 <= min <= max, got [{lo}, {hi}]")
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "dwell_min", int(lo))
        object.__setattr__(self, "dwell_max", int(hi))

    @property
    def num_modes(self):
        return self.modes.shape[0]

    @property
    def state_dim(self):
        return self.modes.shape[1]

    @property
    def d(self):
        """Number of admissible dwell values, ``dwell_max - dwell_min + 1``."""
        return self.dwell_max - self.dwell_min + 1

    def mode(self, i):
        """Matrix of 1-based mode ``i``."""
        if not 1 <= i <= self.num_modes:
            raise IndexError(f"mode {i} outside 1..{self.num_modes}")
        return self.modes[i - 1]

    def with_dwell(self, dwell_min, dwell_max=None):
        return SwitchedSystem(self.modes, dwell_min, dwell_min if dwell_max is None else dwell_max)

    def to_document(self):
        return {
            "state_dim": self.state_dim,
            "modes": self.modes.tolist(),
            "dwell": {"min": self.dwell_min, "max": self.dwell_max},
        }

    def content_hash(self):
        """sha256 of the canonical JSON system document."""
        text = json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, SwitchedSystem):
            return NotImplemented
        return (self.dwell_min, self.dwell_max) == (other.dwell_min, other.dwell_max) and np.array_equal(
            self.modes, other.modes
        )

    def __hash__(self):
        return hash(self.content_hash())


def load_system(document):
    """Build a :class:`SwitchedSystem` from a JSON string, bytes or parsed dict."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SystemFormatError(f"malformed document: {exc}") from exc
    if not isinstance(document, dict):
        raise SystemFormatError("malformed document: top level must be an object")
    missing = {"state_dim", "modes", "dwell"} - document.keys()
    if missing:
        raise SystemFormatError(f"malformed document: missing fields {sorted(missing)}")
    dwell = document["dwell"]
    if not isinstance(dwell, dict) or not {"min", "max"} <= dwell.keys():
        raise SystemFormatError("malformed document: dwell must have 'min' and 'max'")
    lo, hi = dwell["min"], dwell["max"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (lo, hi)):
        raise SystemFormatError("malformed document: dwell bounds must be integers")
    if not 1 <= lo <= hi:
        raise SystemFormatError(f"dwell bounds must satisfy 1 <= min <= max, got [{lo}, {hi}]")
    n = document["state_dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SystemFormatError("malformed document: state_dim must be a positive integer")
    raw = document["modes"]
    if not isinstance(raw, list):
        raise SystemFormatError("malformed document: modes must be a list")
    if len(raw) < 2:
        raise SystemFormatError(f"need at least 2 modes, got {len(raw)}")
    mats = []
    for i, a in enumerate(raw, start=1):
        try:
            m = as_matrix(a, f"mode {i}")
        except (ValueError, TypeError) as exc:
            raise SystemFormatError(f"dimension mismatch: mode {i} is not a rectangular matrix") from exc
        if m.shape != (n, n):
            raise SystemFormatError(f"dimension mismatch: mode {i} has shape {m.shape}, expected ({n}, {n})")
        mats.append(m)
    return SwitchedSystem(np.stack(mats), lo, hi)


def dump_system(sys):
    return json.dumps(sys.to_document())


@dataclass(frozen=True)
class SwitchingSignal:
    """Piecewise-constant signal as ``(mode, duration)`` segments, 1-based modes."""

    segments: tuple

    def __post_init__(self):
        segs = tuple((int(m), int(t)) for m, t in self.segments)
        if not segs:
            raise InadmissibleSignal("signal needs at least one segment")
        object.__setattr__(self, "segments", segs)

    @property
    def period(self):
        return sum(t for _, t in self.segments)

    def check(self, sys):
        """Raise :class:`InadmissibleSignal` naming the first violated constraint."""
        for n, (m, t) in enumerate(self.segments):
            if not 1 <= m <= sys.num_modes:
                raise InadmissibleSignal(f"segment {n}: mode {m} outside 1..{sys.num_modes}")
            if not sys.dwell_min <= t <= sys.dwell_max:
                raise InadmissibleSignal(
                    f"segment {n}: duration {t} outside dwell range [{sys.dwell_min}, {sys.dwell_max}]"
                )
            if n and self.segments[n - 1][0] == m:
                raise InadmissibleSignal(f"segment {n}: mode {m} repeats the previous segment")

    def check_cyclic(self, sys):
        """Like :meth:`check`, plus the wrap-around join used when the signal repeats."""
        self.check(sys)
        if len(self.segments) > 1 and self.segments[-1][0] == self.segments[0][0]:
            raise InadmissibleSignal("cyclic repetition: last and first segments share a mode")

    def mode_sequence(self, horizon):
        """0-based active mode at each step ``0..horizon-1``, repeating cyclically."""
        one = np.concatenate([np.full(t, m - 1, dtype=np.int64) for m, t in self.segments])
        reps = -(-horizon // one.size)
        return np.tile(one, reps)[:horizon]

    def switching_instants(self, horizon):
        """Times ``k_n < horizon`` at which a segment starts, beginning with 0."""
        out = []
        k, n = 0, 0
        while k < horizon:
            out.append(k)
            k += self.segments[n % len(self.segments)][1]
            n += 1
        return out

    def segments_upto(self, horizon):
        """Segment list unrolled cyclically until it covers ``horizon`` steps."""
        out = []
        k, n = 0, 0
        while k < horizon:
            seg = self.segments[n % len(self.segments)]
            out.append(seg)
            k += seg[1]
            n += 1
        return out


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    modes: np.ndarray = field(repr=False)

    @property
    def norms(self):
        return np.linalg.norm(self.states, axis=1)


def simulate(sys, signal, x0, horizon):
    """Propagate ``x0`` for ``horizon`` steps; short signals repeat cyclically."""
    if int(horizon) != horizon or horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon}")
    if not isinstance(signal, SwitchingSignal):
        signal = SwitchingSignal(tuple(signal))
    if signal.period < horizon:
        signal.check_cyclic(sys)
    else:
        signal.check(sys)
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (sys.state_dim,):
        raise ValueError(f"x0 must have length {sys.state_dim}, got shape {x0.shape}")
    modes = signal.mode_sequence(int(horizon))
    states = _kernels.propagate(np.ascontiguousarray(sys.modes), modes, np.ascontiguousarray(x0))
    return Trajectory(states, modes + 1)


def periodic_signal(sys, tau, start=1):
    """All modes in turn, each held ``tau`` steps."""
    n = sys.num_modes
    return SwitchingSignal(tuple((((start - 1 + i) % n) + 1, tau) for i in range(n)))


def random_admissible_signal(sys, seed, num_segments):
    """Admissible signal with uniform successor modes and uniform durations."""
    if num_segments < 1:
        raise ValueError("num_segments must be >= 1")
    rng = np.random.default_rng(seed)
    N = sys.num_modes
    segs = []
    prev = None
    for _ in range(num_segments):
        if prev is None:
            m = int(rng.integers(1, N + 1))
        else:
            m = int(rng.integers(1, N))
            if m >= prev:
                m += 1
        t = int(rng.integers(sys.dwell_min, sys.dwell_max + 1))
        segs.append((m, t))
        prev = m
    return SwitchingSignal(tuple(segs))
