"""Strict LMI feasibility by margin minimization.

The problem solved is::

    minimize t
    subject to  F_c(X) <= t I       for every constraint c
                I <= X_b <= mu I    for every block b

with a log-det barrier path-following method.  ``t* <= -eps`` is reported as
Feasible; a converged ``t* > -eps`` is Inconclusive, which says nothing about
instability because the conditions are only sufficient.  Feasible assignments
are re-checked with an eigenvalue routine that shares no code with the
barrier before they are returned.
"""

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericalFailure
from .matrix import symmetrize

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    FEASIBLE = "feasible"
    INCONCLUSIVE = "inconclusive"
    NUMERICAL_FAILURE = "numerical-failure"


@dataclass(frozen=True)
class SolverOptions:
    eps: float = 1e-8
    mu: float = 1e8
    tolerance: float = 1e-9
    max_iterations: int = 5000
    seed: int = 0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.mu > 1:
            raise ValueError("mu must exceed 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass
class FeasibilityResult:
    status: Status
    margin: float
    iterations: int
    eps: float
    mu: float
    assignment: dict = field(default=None, repr=False)
    blocks: list = field(default=None, repr=False)
    message: str = ""

    @property
    def feasible(self):
        return self.status is Status.FEASIBLE


def _sym_basis(n):
    """Basis of symmetric n x n matrices, ordered (i, j) with i <= j."""
    out = []
    for i in range(n):
        for j in range(i, n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            E[j, i] = 1.0
            out.append(E)
    return out


class _Layout:
    """Variable vector ``[svec(X_1), ..., svec(X_nb), t]`` and padded barrier arrays."""

    def __init__(self, problem, mu):
        self.problem = problem
        self.bases = {}
        self.offsets = []
        nvar = 0
        for n in problem.block_dims:
            if n not in self.bases:
                self.bases[n] = _sym_basis(n)
            self.offsets.append(nvar)
            nvar += len(self.bases[n])
        self.t_index = nvar
        self.nvar = nvar + 1
        groups = {}

        def add(C, coeffs):
            m = C.shape[0]
            groups.setdefault(m, []).append((C, coeffs))

        for b, n in enumerate(problem.block_dims):
            base = self.bases[n]
            lower = {self.offsets[b] + j: E for j, E in enumerate(base)}
            add(-np.eye(n), lower)
            add(mu * np.eye(n), {v: -E for v, E in lower.items()})
        for c in problem.constraints:
            m = c.dim
            coeffs = {self.t_index: np.eye(m)}
            for term in c.terms:
                G = term.G
                for j, E in enumerate(self.bases[problem.block_dims[term.block]]):
                    v = self.offsets[term.block] + j
                    img = -term.sign * (G.T @ E @ G)
                    coeffs[v] = coeffs[v] + img if v in coeffs else img
            add(np.zeros((m, m)), coeffs)

        self.groups = []
        self.degree = 0
        for m in sorted(groups):
            items = groups[m]
            k = max(len(cf) for _, cf in items)
            C = np.empty((len(items), m, m))
            idx = np.full((len(items), k), -1, dtype=np.int64)
            D = np.zeros((len(items), k, m, m))
            for b, (Cb, cf) in enumerate(items):
                C[b] = Cb
                for j, v in enumerate(sorted(cf)):
                    idx[b, j] = v
                    D[b, j] = cf[v]
            self.groups.append((C, idx, D))
            self.degree += m * len(items)

    def pack(self, blocks, t):
        x = np.zeros(self.nvar)
        for b, X in enumerate(blocks):
            n = X.shape[0]
            j = 0
            for r in range(n):
                for s in range(r, n):
                    x[self.offsets[b] + j] = X[r, s]
                    j += 1
        x[self.t_index] = t
        return x

    def unpack(self, x):
        out = []
        for b, n in enumerate(self.problem.block_dims):
            X = np.zeros((n, n))
            j = 0
            for r in range(n):
                for s in range(r, n):
                    X[r, s] = X[s, r] = x[self.offsets[b] + j]
                    j += 1
            out.append(X)
        return out

    def value(self, x, scale):
        total = scale * x[self.t_index]
        for C, idx, D in self.groups:
            ok, v = _kernels.barrier_value(x, C, idx, D)
            if not ok:
                return np.inf
            total += v
        return total

    def derivs(self, x, scale):
        g = np.zeros(self.nvar)
        H = np.zeros((self.nvar, self.nvar))
        for C, idx, D in self.groups:
            if not _kernels.barrier_derivs(x, C, idx, D, g, H):
                raise NumericalFailure("iterate left the barrier domain")
        g[self.t_index] += scale
        return g, H


def _newton_direction(g, H):
    d = np.sqrt(np.maximum(np.diag(H), 1e-300))
    Hs = H / d[:, None] / d[None, :]
    gs = g / d
    try:
        L = np.linalg.cholesky(Hs)
        step = -np.linalg.solve(L.T, np.linalg.solve(L, gs))
    except np.linalg.LinAlgError:
        step = -np.linalg.lstsq(Hs, gs, rcond=None)[0]
    return step / d


def _max_constraint_eig(problem, blocks):
    vals = [np.linalg.eigvalsh(symmetrize(F))[-1] for F in problem.evaluate(blocks)]
    return max(vals) if vals else -np.inf


def _initial_point(layout, mu):
    problem = layout.problem
    c0 = 0.5 * (1.0 + mu)
    blocks = [c0 * np.eye(n) for n in problem.block_dims]
    worst = _max_constraint_eig(problem, blocks)
    t0 = worst + 1.0 + 0.1 * abs(worst)
    return layout.pack(blocks, t0)


def _center(layout, x, scale, budget):
    """Damped Newton on the barrier at fixed ``scale``; returns ``(x, iterations, stalled)``."""
    f = layout.value(x, scale)
    it = 0
    while it < budget:
        g, H = layout.derivs(x, scale)
        dx = _newton_direction(g, H)
        dec = -float(g @ dx)
        it += 1
        if not np.isfinite(dec):
            return x, it, True
        # below this the decrement is dominated by rounding in the barrier value
        if dec / 2.0 <= max(1e-9, 1e-12 * abs(f)):
            return x, it, False
        alpha = 1.0
        while True:
            xn = x + alpha * dx
            fn = layout.value(xn, scale)
            if fn <= f - 0.01 * alpha * dec:
                break
            alpha *= 0.5
            if alpha < 1e-14:
                return x, it, True
        if f - fn <= 1e-15 * abs(f):
            return xn, it, False
        x, f = xn, fn
    return x, it, False


def solve_feasibility(problem, opts=None):
    """Decide strict feasibility of ``problem``; see module docstring."""
    opts = opts or SolverOptions()
    layout = _Layout(problem, opts.mu)
    x = _initial_point(layout, opts.mu)
    theta = float(layout.degree)
    t_idx = layout.t_index
    scale = theta / max(1.0, abs(x[t_idx]))
    # converged once the barrier gap is below tolerance relative to the problem scale
    gap_target = opts.tolerance * opts.mu
    iterations = 0
    stalled = False
    status = None
    while True:
        budget = opts.max_iterations - iterations
        if budget <= 0:
            break
        x, used, stalled = _center(layout, x, scale, min(budget, 200))
        iterations += used
        t = float(x[t_idx])
        gap = theta / scale
        log.debug("scale=%.3e t=%.6e gap=%.3e iters=%d", scale, t, gap, iterations)
        if gap <= max(gap_target, opts.tolerance * abs(t)):
            status = Status.FEASIBLE if t <= -opts.eps else Status.INCONCLUSIVE
            break
        if t - 2.0 * gap > -opts.eps:
            status = Status.INCONCLUSIVE
            break
        if stalled:
            break
        scale *= 10.0
    t = float(x[t_idx])
    if status is None:
        # iteration cap or loss of progress: only a verifiable point is usable
        if t <= -opts.eps and stalled:
            status = Status.FEASIBLE
        else:
            reason = "loss of progress" if stalled else "iteration cap reached"
            return FeasibilityResult(Status.NUMERICAL_FAILURE, t, iterations, opts.eps, opts.mu, message=reason)

    if status is Status.INCONCLUSIVE:
        return FeasibilityResult(status, t, iterations, opts.eps, opts.mu)

    blocks = [symmetrize(X) for X in layout.unpack(x)]
    worst = _max_constraint_eig(problem, blocks)
    low = min(np.linalg.eigvalsh(X)[0] for X in blocks)
    high = max(np.linalg.eigvalsh(X)[-1] for X in blocks)
    if not (worst <= -opts.eps and low > 0.0 and high <= opts.mu * (1.0 + 1e-9)):
        return FeasibilityResult(
            Status.NUMERICAL_FAILURE,
            t,
            iterations,
            opts.eps,
            opts.mu,
            message=f"post-check failed: max constraint eigenvalue {worst:.3e}",
        )
    assignment = dict(zip(problem.block_ids, blocks))
    return FeasibilityResult(Status.FEASIBLE, float(worst), iterations, opts.eps, opts.mu, assignment, blocks)
