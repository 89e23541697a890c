import numpy as np
import pytest

from dwellcert.cycles import complexity_counts, enumerate_cycles
from dwellcert.errors import DwellCertError
from dwellcert.lmi import build_condition_a, build_condition_b, build_multistep
from dwellcert.matrix import mat_pow
from dwellcert.system import SwitchedSystem

from .conftest import A1, A2


def _terms(c):
    return [(t.block, t.sign, t.G) for t in c.terms]


def test_condition_b_single_cycle(example):
    fam = enumerate_cycles(example, 1)
    prob = build_condition_b(example, fam)
    assert prob.num_blocks == 2 and len(prob.constraints) == 4
    phis = {1: mat_pow(A1, 10), 2: mat_pow(A2, 10)}
    for c in prob.constraints:
        _, h, q = c.label
        (bh, sh, G), (bq, sq, I) = _terms(c)
        assert (bh, sh, bq, sq) == (h - 1, 1, q - 1, -1)
        np.testing.assert_allclose(G, phis[h], rtol=1e-14)
        np.testing.assert_array_equal(I, np.eye(2))


def test_condition_b_L2_products(example):
    s = example.with_dwell(4)
    prob = build_condition_b(s, enumerate_cycles(s, 2))
    assert prob.num_blocks == 2 and len(prob.constraints) == 4
    expected = [mat_pow(A2, 4) @ mat_pow(A1, 4), mat_pow(A1, 4) @ mat_pow(A2, 4)]
    for c in prob.constraints:
        h = c.label[1]
        np.testing.assert_allclose(c.terms[0].G, expected[h - 1], rtol=1e-13)


def test_condition_b_emits_diagonal_pairs():
    s = SwitchedSystem(np.stack([np.eye(2), np.eye(2)]), 1, 1)
    prob = build_condition_b(s, enumerate_cycles(s, 1))
    labels = [c.label for c in prob.constraints]
    assert ("pair", 1, 1) in labels and ("pair", 2, 2) in labels
    P = [np.eye(2) * 3.0, np.eye(2) * 3.0]
    diag = [prob.constraint_value(c, P) for c in prob.constraints if c.label[1] == c.label[2]]
    assert all(np.array_equal(F, np.zeros((2, 2))) for F in diag)


def clock_form_reference(A, tau):
    """Direct listing of the L=1 clock-dependent system for two modes, fixed dwell."""
    out = []
    for i in (1, 2):
        for k in range(tau):
            out.append(("step", i, k, A[i - 1]))
    for i in (1, 2):
        for j in (1, 2):
            out.append(("pair", i, j, None))
    return out


def test_condition_a_single_cycle(example):
    fam = enumerate_cycles(example, 1)
    prob = build_condition_a(example, fam)
    assert prob.num_blocks == 22
    assert len(prob.constraints) == 24
    ids = prob.block_index()
    ref = clock_form_reference([A1, A2], 10)
    assert len(ref) == len(prob.constraints)
    for c, (kind, i, k, A) in zip(prob.constraints, ref):
        if kind == "step":
            assert c.label == ("step", i, k)
            assert c.terms[0].block == ids[("P", i, k + 1)] and c.terms[0].sign == 1
            assert c.terms[1].block == ids[("P", i, k)] and c.terms[1].sign == -1
            np.testing.assert_array_equal(c.terms[0].G, A)
        else:
            assert c.label == ("pair", i, k)
            j = k
            assert c.terms[0].block == ids[("P", i, 0)]
            assert c.terms[1].block == ids[("P", j, 10)]


def test_condition_a_tau1_single_step(example):
    s = example.with_dwell(1)
    prob = build_condition_a(s, enumerate_cycles(s, 1))
    steps = [c for c in prob.constraints if c.label[0] == "step"]
    assert len(steps) == 2
    for c in steps:
        h = c.label[1]
        np.testing.assert_array_equal(c.terms[0].G, [A1, A2][h - 1])


def test_condition_a_segment_modes(example):
    s = example.with_dwell(3)
    fam = enumerate_cycles(s, 2)
    prob = build_condition_a(s, fam)
    steps = [c for c in prob.constraints if c.label[:2] == ("step", 1)]
    mats = [c.terms[0].G for c in steps]
    for k, G in enumerate(mats):
        np.testing.assert_array_equal(G, A1 if k < 3 else A2)


def test_multistep_switched_lyapunov(example):
    s = example.with_dwell(1)
    prob = build_multistep(s, 1, "b")
    assert prob.num_blocks == 2 and len(prob.constraints) == 4
    for c in prob.constraints:
        _, i, j = c.label
        np.testing.assert_array_equal(c.terms[0].G, [A1, A2][i - 1])
        assert c.terms[0].block == i - 1 and c.terms[1].block == j - 1


def test_multistep_L2_forms(example):
    s = example.with_dwell(1)
    b = build_multistep(s, 2, "b")
    assert b.num_blocks == 4 and len(b.constraints) == 16
    np.testing.assert_allclose(b.constraints[1 * 4].terms[0].G, A2 @ A1)  # sequence (1, 2)
    a = build_multistep(s, 2, "a")
    assert a.num_blocks == 4 * 3
    ids = a.block_index()
    pairs = [c for c in a.constraints if c.label[0] == "pair"]
    assert len(pairs) == 16
    for c in pairs:
        _, h, q = c.label
        assert c.terms[0].block == ids[("P", h, 0)]
        assert c.terms[1].block == ids[("P", q, 2)]


def test_multistep_rejects_dwell(example):
    with pytest.raises(DwellCertError, match="dwell range"):
        build_multistep(example, 2, "b")


@pytest.mark.parametrize("condition", ["a", "b"])
def test_values_symmetric_and_homogeneous(example, condition):
    s = example.with_dwell(2, 3)
    fam = enumerate_cycles(s, 2)
    prob = build_condition_a(s, fam) if condition == "a" else build_condition_b(s, fam)
    rng = np.random.default_rng(3)
    blocks = []
    for _ in range(prob.num_blocks):
        R = rng.normal(size=(2, 2))
        blocks.append(R + R.T)
    vals = prob.evaluate(blocks)
    scaled = prob.evaluate([2.7 * X for X in blocks])
    for F, Fs in zip(vals, scaled):
        np.testing.assert_allclose(F, F.T, rtol=0, atol=1e-12)
        np.testing.assert_allclose(Fs, 2.7 * F, rtol=1e-12, atol=1e-12)


def test_condition_b_counts_match_formula(example):
    for lo, hi, L in [(1, 1, 1), (1, 2, 2), (3, 5, 2)]:
        s = example.with_dwell(lo, hi)
        prob = build_condition_b(s, enumerate_cycles(s, L))
        assert (prob.num_blocks, len(prob.constraints)) == complexity_counts(s, L, "b")
