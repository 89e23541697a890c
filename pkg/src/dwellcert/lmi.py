"""Structured LMI feasibility problems for the cycle-based stability tests.

Each constraint is a short sum of terms ``sign * G.T @ X_b @ G`` that must be
negative definite; every decision block ``X_b`` must be positive definite.
Strictness is left to the solver.
"""

from dataclasses import dataclass

import numpy as np

from .cycles import enumerate_cycles
from .errors import DwellCertError


@dataclass(frozen=True)
class Term:
    G: np.ndarray
    block: int
    sign: int


@dataclass(frozen=True)
class Constraint:
    terms: tuple
    label: tuple

    @property
    def dim(self):
        return self.terms[0].G.shape[1]


@dataclass(frozen=True)
class LmiProblem:
    """Decision blocks ``block_ids[i]`` of size ``block_dims[i]`` and constraints over them."""

    block_ids: tuple
    block_dims: tuple
    constraints: tuple
    kind: str = ""

    def __post_init__(self):
        nb = len(self.block_ids)
        for c in self.constraints:
            out = c.terms[0].G.shape[1]
            for t in c.terms:
                if not 0 <= t.block < nb:
                    raise DwellCertError(f"constraint {c.label} references undeclared block {t.block}")
                if t.G.shape != (self.block_dims[t.block], out):
                    raise DwellCertError(f"constraint {c.label} has inconsistent factor shape {t.G.shape}")

    @property
    def num_blocks(self):
        return len(self.block_ids)

    def block_index(self):
        return {b: i for i, b in enumerate(self.block_ids)}

    def constraint_value(self, c, blocks):
        """Matrix value of constraint ``c`` for a list of block matrices."""
        out = np.zeros((c.dim, c.dim))
        for t in c.terms:
            out += t.sign * (t.G.T @ blocks[t.block] @ t.G)
        return out

    def evaluate(self, blocks):
        return [self.constraint_value(c, blocks) for c in self.constraints]


def _eye(n):
    return np.eye(n)


def build_condition_b(sys, family):
    """``Phi_h' P_h Phi_h - P_q < 0`` for every ordered pair ``(h, q)``, ``h == q`` included."""
    n = sys.state_dim
    M = len(family)
    phis = family.transition_matrices()
    I = _eye(n)
    constraints = []
    for h in range(M):
        for q in range(M):
            terms = (Term(phis[h], h, 1), Term(I, q, -1))
            constraints.append(Constraint(terms, ("pair", h + 1, q + 1)))
    return LmiProblem(
        tuple(("P", c.index) for c in family),
        (n,) * M,
        tuple(constraints),
        kind="b",
    )


def _step_constraints(sys, cycle, offset):
    """``A_i' P_h(k+1) A_i - P_h(k) < 0`` for ``k`` in ``[0, T_h - 1]``."""
    I = _eye(sys.state_dim)
    out = []
    for k, m in enumerate(cycle.step_modes()):
        terms = (Term(np.array(sys.mode(m)), offset + k + 1, 1), Term(I, offset + k, -1))
        out.append(Constraint(terms, ("step", cycle.index, k)))
    return out


def build_condition_a(sys, family):
    """Clock-dependent form: blocks ``P_h(0..T_h)`` per cycle.

    Emits the step constraints of every cycle followed by the coupling
    constraints ``P_h(0) - P_q(T_q) < 0`` for every ordered pair.
    """
    n = sys.state_dim
    ids, offsets = [], []
    for c in family:
        offsets.append(len(ids))
        ids.extend(("P", c.index, k) for k in range(c.total_duration + 1))
    constraints = []
    for c, off in zip(family, offsets):
        constraints.extend(_step_constraints(sys, c, off))
    I = _eye(n)
    for h, c_h in enumerate(family):
        for q, c_q in enumerate(family):
            terms = (Term(I, offsets[h], 1), Term(I, offsets[q] + c_q.total_duration, -1))
            constraints.append(Constraint(terms, ("pair", h + 1, q + 1)))
    return LmiProblem(tuple(ids), (n,) * len(ids), tuple(constraints), kind="a")


def multistep_family(sys, L, cap=None):
    """All ``N**L`` unit-duration sequences, repeats allowed."""
    if (sys.dwell_min, sys.dwell_max) != (1, 1):
        raise DwellCertError(
            f"multiple-step form needs dwell range [1, 1], got [{sys.dwell_min}, {sys.dwell_max}]"
        )
    kwargs = {} if cap is None else {"cap": cap}
    return enumerate_cycles(sys, L, allow_repeats=True, **kwargs)


def build_multistep(sys, L, form):
    """Arbitrary-switching multiple-step conditions; ``L=1, form='b'`` is the switched Lyapunov test."""
    family = multistep_family(sys, L)
    if form == "b":
        return build_condition_b(sys, family)
    if form == "a":
        return build_condition_a(sys, family)
    raise ValueError(f"form must be 'a' or 'b', got {form!r}")


def build(sys, family, condition):
    if condition == "a":
        return build_condition_a(sys, family)
    if condition == "b":
        return build_condition_b(sys, family)
    raise ValueError(f"condition must be 'a' or 'b', got {condition!r}")
