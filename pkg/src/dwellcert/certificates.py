"""Certificate verification, conversion between the two forms, and file I/O.

Product form (condition ``b``): one matrix ``P_h`` per cycle with
``Phi_h' P_h Phi_h - P_q < 0`` for every ordered pair.

Clock-dependent form (condition ``a``): a sequence ``P_h(0..T_h)`` per cycle
with a strict decrease across every step of the cycle and
``P_h(0) - P_q(T_q) < 0`` at every cycle junction.

Verification uses the Jacobi eigenvalue routine from :mod:`dwellcert.matrix`,
not the solver's Cholesky-based barrier.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificateError, ConversionFailure
from .matrix import DEFAULT_TOL, max_sym_eigenvalue, symmetrize


@dataclass(frozen=True)
class CertificateB:
    L: int
    P: tuple
    cycles: tuple
    meta: dict = field(default_factory=dict, compare=False)
    condition = "b"

    def __len__(self):
        return len(self.P)


@dataclass(frozen=True)
class CertificateA:
    L: int
    P_seq: tuple
    cycles: tuple
    meta: dict = field(default_factory=dict, compare=False)
    condition = "a"

    def __len__(self):
        return len(self.P_seq)


@dataclass
class VerificationReport:
    """One ``(label, lambda_max)`` per check; PASS iff every value is below ``-tol``."""

    checks: list
    tol: float

    @property
    def passed(self):
        return all(v < -self.tol for _, v in self.checks)

    @property
    def worst(self):
        return max(v for _, v in self.checks)

    def failures(self):
        return [(lbl, v) for lbl, v in self.checks if not v < -self.tol]

    def margin(self, kind):
        """Largest lambda_max among checks whose label starts with ``kind``."""
        return max(v for lbl, v in self.checks if lbl[0] == kind)

    def __bool__(self):
        return self.passed


def _metadata(sys, family, eps=None, mu=None):
    meta = {
        "system_hash": sys.content_hash(),
        "dwell": {"min": sys.dwell_min, "max": sys.dwell_max},
    }
    if eps is not None:
        meta["eps"] = eps
    if mu is not None:
        meta["mu"] = mu
    return meta


def _check_family(family, cert):
    if cert.L != family.L:
        raise CertificateError(f"certificate L={cert.L} does not match family L={family.L}")
    if len(cert) != len(family):
        raise CertificateError(f"certificate has {len(cert)} entries, family has {len(family)} cycles")
    for c, (modes, durs) in zip(family, cert.cycles):
        if tuple(modes) != c.modes or tuple(durs) != c.durations:
            raise CertificateError(f"entry h={c.index} does not match cycle {c.modes}/{c.durations}")


def certificate_b_from_result(sys, family, result):
    """Wrap a Feasible condition-``b`` solve as a :class:`CertificateB`."""
    P = tuple(symmetrize(result.assignment[("P", c.index)]) for c in family)
    return CertificateB(
        family.L,
        P,
        tuple((c.modes, c.durations) for c in family),
        _metadata(sys, family, result.eps, result.mu),
    )


def certificate_a_from_result(sys, family, result):
    """Wrap a Feasible condition-``a`` solve as a :class:`CertificateA`."""
    seqs = []
    for c in family:
        seqs.append(tuple(symmetrize(result.assignment[("P", c.index, k)]) for k in range(c.total_duration + 1)))
    return CertificateA(
        family.L,
        tuple(seqs),
        tuple((c.modes, c.durations) for c in family),
        _metadata(sys, family, result.eps, result.mu),
    )


def verify_certificate_b(sys, family, cert, tol=DEFAULT_TOL):
    _check_family(family, cert)
    phis = family.transition_matrices()
    checks = []
    for h, P in enumerate(cert.P, start=1):
        checks.append((("positive", h), max_sym_eigenvalue(-P, tol)))
    for h, (phi, P_h) in enumerate(zip(phis, cert.P), start=1):
        lhs = phi.T @ P_h @ phi
        for q, P_q in enumerate(cert.P, start=1):
            checks.append((("pair", h, q), max_sym_eigenvalue(lhs - P_q, tol)))
    return VerificationReport(checks, tol)


def verify_certificate_a(sys, family, cert, tol=DEFAULT_TOL):
    _check_family(family, cert)
    for c, seq in zip(family, cert.P_seq):
        if len(seq) != c.total_duration + 1:
            raise CertificateError(
                f"entry h={c.index} has {len(seq)} matrices, expected T_h + 1 = {c.total_duration + 1}"
            )
    checks = []
    for c, seq in zip(family, cert.P_seq):
        for k, P in enumerate(seq):
            checks.append((("positive", c.index, k), max_sym_eigenvalue(-P, tol)))
        for k, m in enumerate(c.step_modes()):
            A = sys.mode(m)
            checks.append((("step", c.index, k), max_sym_eigenvalue(A.T @ seq[k + 1] @ A - seq[k], tol)))
    for c_h, seq_h in zip(family, cert.P_seq):
        for c_q, seq_q in zip(family, cert.P_seq):
            checks.append((("pair", c_h.index, c_q.index), max_sym_eigenvalue(seq_h[0] - seq_q[-1], tol)))
    return VerificationReport(checks, tol)


def verify(sys, family, cert, tol=DEFAULT_TOL):
    if cert.condition == "a":
        return verify_certificate_a(sys, family, cert, tol)
    return verify_certificate_b(sys, family, cert, tol)


def _backward_sequence(sys, cycle, P_end, delta):
    """``P(k) = A' P(k+1) A + delta I`` from ``P(T_h) = P_end`` down to ``k = 0``."""
    n = sys.state_dim
    modes = cycle.step_modes()
    seq = [None] * (len(modes) + 1)
    seq[-1] = symmetrize(P_end)
    for k in range(len(modes) - 1, -1, -1):
        A = sys.mode(modes[k])
        seq[k] = symmetrize(A.T @ seq[k + 1] @ A + delta * np.eye(n))
    return tuple(seq)


def convert_b_to_a(sys, family, cert, delta0=None, shrink=0.1, max_attempts=30, tol=DEFAULT_TOL):
    """Clock-dependent certificate built backward from each ``P_h``.

    ``delta`` is the uniform step slack.  When a junction constraint fails the
    slack is shrunk by ``shrink`` and the sequence rebuilt, up to
    ``max_attempts`` times.
    """
    if not 0.0 < shrink < 1.0:
        raise ValueError("shrink must lie in (0, 1)")
    report = verify_certificate_b(sys, family, cert, tol)
    if not report.passed:
        raise CertificateError(f"input certificate does not verify (worst {report.worst:.3e})")
    if delta0 is None:
        delta0 = 1e-4 * -report.margin("pair")
    delta = float(delta0)
    best = -np.inf
    tried = []
    for _ in range(max_attempts):
        seqs = tuple(_backward_sequence(sys, c, P, delta) for c, P in zip(family, cert.P))
        out = CertificateA(cert.L, seqs, cert.cycles, {**cert.meta, "delta": delta})
        rep = verify_certificate_a(sys, family, out, tol)
        tried.append(delta)
        if rep.passed:
            return out
        best = max(best, -rep.margin("pair"))
        delta *= shrink
    raise ConversionFailure(
        f"no slack in {tried[0]:.3e}..{tried[-1]:.3e} satisfied the junction constraints", best
    )


def extract_b_from_a(sys, family, cert, tol=DEFAULT_TOL):
    """Product-form certificate ``P_h := P_h(T_h)``."""
    report = verify_certificate_a(sys, family, cert, tol)
    if not report.passed:
        raise CertificateError(f"input certificate does not verify (worst {report.worst:.3e})")
    meta = {k: v for k, v in cert.meta.items() if k != "delta"}
    return CertificateB(cert.L, tuple(seq[-1] for seq in cert.P_seq), cert.cycles, meta)


def scale_certificate(cert, c):
    if cert.condition == "b":
        return CertificateB(cert.L, tuple(c * P for P in cert.P), cert.cycles, dict(cert.meta))
    return CertificateA(cert.L, tuple(tuple(c * P for P in s) for s in cert.P_seq), cert.cycles, dict(cert.meta))


def lyapunov_values(sys, family, cert, signal, x0, horizon):
    """``V(x(k)) = x(k)' P_h(k - k_nL) x(k)`` along a signal, for ``k = 0..horizon``.

    The signal is cut into consecutive windows of ``L`` segments starting at
    time 0; each window picks the certificate sequence of the matching cycle.
    Returns ``(values, states)``.
    """
    from .system import simulate

    if cert.condition != "a":
        raise CertificateError("Lyapunov values need a clock-dependent certificate")
    L = family.L
    # cover step ``horizon`` itself, which may open a new window
    segs = signal.segments_upto(horizon + 1)
    while len(segs) % L:
        segs.append(signal.segments[len(segs) % len(signal.segments)])
    traj = simulate(sys, signal, x0, horizon)
    P_at = []
    for w in range(0, len(segs), L):
        window = segs[w : w + L]
        h = family.rank([m for m, _ in window], [t for _, t in window])
        seq = cert.P_seq[h - 1]
        P_at.extend(seq[:-1])
    P_stack = np.stack(P_at[: horizon + 1])
    X = traj.states
    values = np.einsum("ki,kij,kj->k", X, P_stack, X)
    return values, X


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def certificate_to_document(cert):
    entries = []
    for h, (modes, durs) in enumerate(cert.cycles, start=1):
        entry = {"h": h, "modes": list(modes), "durations": list(durs)}
        if cert.condition == "b":
            entry["P"] = cert.P[h - 1].tolist()
        else:
            entry["P_seq"] = [P.tolist() for P in cert.P_seq[h - 1]]
        entries.append(entry)
    doc = {
        "condition": cert.condition,
        "L": cert.L,
        "dwell": dict(cert.meta.get("dwell", {})),
        "system_hash": cert.meta.get("system_hash", ""),
    }
    for key in ("eps", "mu", "delta"):
        if key in cert.meta:
            doc[key] = cert.meta[key]
    doc["entries"] = entries
    return doc


def dump_certificate(cert):
    return json.dumps(certificate_to_document(cert), indent=1)


def _matrix(raw, where):
    try:
        m = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise CertificateError(f"{where}: not a numeric matrix") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.all(np.isfinite(m)):
        raise CertificateError(f"{where}: expected a finite square matrix")
    return symmetrize(m)


def load_certificate(document, sys=None):
    """Parse a certificate file; with ``sys`` given, the system hash must match."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"malformed certificate: {exc}") from exc
    try:
        cond = document["condition"]
        L = int(document["L"])
        dwell = document["dwell"]
        digest = document["system_hash"]
        entries = document["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateError(f"malformed certificate: {exc!r}") from exc
    if cond not in ("a", "b"):
        raise CertificateError(f"unknown condition {cond!r}")
    if sys is not None:
        if digest != sys.content_hash():
            raise CertificateError("certificate was issued for a different system")
    meta = {"system_hash": digest, "dwell": dwell}
    for key in ("eps", "mu", "delta"):
        if key in document:
            meta[key] = document[key]
    cycles, mats = [], []
    for n, e in enumerate(entries, start=1):
        if e.get("h") != n:
            raise CertificateError(f"entry {n} has index {e.get('h')}; entries must be ordered by h")
        cycles.append((tuple(e["modes"]), tuple(e["durations"])))
        if cond == "b":
            mats.append(_matrix(e["P"], f"entry h={n}"))
        else:
            mats.append(tuple(_matrix(P, f"entry h={n}, k={k}") for k, P in enumerate(e["P_seq"])))
    if cond == "b":
        return CertificateB(L, tuple(mats), tuple(cycles), meta)
    return CertificateA(L, tuple(mats), tuple(cycles), meta)
