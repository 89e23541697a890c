import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwellcert.certificates import (
    CertificateA,
    CertificateB,
    certificate_a_from_result,
    certificate_b_from_result,
    convert_b_to_a,
    dump_certificate,
    extract_b_from_a,
    load_certificate,
    lyapunov_values,
    scale_certificate,
    verify,
    verify_certificate_a,
    verify_certificate_b,
)
from dwellcert.cycles import enumerate_cycles
from dwellcert.errors import CertificateError
from dwellcert.lmi import build_condition_a, build_condition_b
from dwellcert.solver import solve_feasibility
from dwellcert.system import SwitchedSystem, random_admissible_signal


def _cert_b(sys_, L):
    fam = enumerate_cycles(sys_, L)
    res = solve_feasibility(build_condition_b(sys_, fam))
    assert res.feasible
    return fam, certificate_b_from_result(sys_, fam, res)


@pytest.fixture(scope="module")
def tau10(example):
    return _cert_b(example, 1)


@pytest.fixture(scope="module")
def ranged(example):
    s = example.with_dwell(10, 11)
    fam, cb = _cert_b(s, 2)
    return s, fam, cb, convert_b_to_a(s, fam, cb)


def test_solved_certificate_passes(example, tau10):
    fam, cert = tau10
    rep = verify_certificate_b(example, fam, cert)
    assert rep.passed and bool(rep)
    assert len(rep.checks) == 2 + 4
    assert not rep.failures()


def test_negative_identity_fails_positivity(example, tau10):
    fam, cert = tau10
    bad = CertificateB(1, (-np.eye(2), -np.eye(2)), cert.cycles, cert.meta)
    rep = verify_certificate_b(example, fam, bad)
    assert not rep.passed
    assert any(lbl[0] == "positive" for lbl, _ in rep.failures())


def test_identity_modes_always_fail():
    s = SwitchedSystem(np.stack([np.eye(2), np.eye(2)]), 2, 3)
    fam = enumerate_cycles(s, 1)
    rng = np.random.default_rng(0)
    for _ in range(50):
        P = []
        for _ in fam:
            R = rng.normal(size=(2, 2))
            P.append(R @ R.T + np.eye(2))
        cert = CertificateB(1, tuple(P), tuple((c.modes, c.durations) for c in fam))
        rep = verify_certificate_b(s, fam, cert)
        assert not rep.passed
        # the diagonal pair h = q gives P - P = 0 exactly
        assert any(lbl[0] == "pair" and lbl[1] == lbl[2] for lbl, _ in rep.failures())


def test_length_mismatch_is_an_error(example, tau10):
    fam, cert = tau10
    short = CertificateB(1, cert.P[:1], cert.cycles[:1], cert.meta)
    with pytest.raises(CertificateError, match="entries"):
        verify_certificate_b(example, fam, short)


def test_truncated_sequence_is_an_error(ranged):
    s, fam, _, ca = ranged
    seqs = (ca.P_seq[0][:-1],) + ca.P_seq[1:]
    with pytest.raises(CertificateError):
        verify_certificate_a(s, fam, CertificateA(ca.L, seqs, ca.cycles, ca.meta))


def test_convert_then_extract(example, tau10):
    fam, cb = tau10
    ca = convert_b_to_a(example, fam, cb)
    assert verify_certificate_a(example, fam, ca).passed
    assert [len(s) for s in ca.P_seq] == [11, 11]
    back = extract_b_from_a(example, fam, ca)
    for P, Q in zip(back.P, cb.P):
        np.testing.assert_array_equal(P, Q)
    assert verify_certificate_b(example, fam, back).passed


def test_convert_shrinks_a_huge_slack(example, tau10):
    fam, cb = tau10
    ca = convert_b_to_a(example, fam, cb, delta0=1e12)
    assert ca.meta["delta"] < 1e12
    assert verify_certificate_a(example, fam, ca).passed


def test_solved_condition_a_extracts(example):
    fam = enumerate_cycles(example, 1)
    res = solve_feasibility(build_condition_a(example, fam))
    assert res.feasible
    ca = certificate_a_from_result(example, fam, res)
    assert verify(example, fam, ca).passed
    assert verify(example, fam, extract_b_from_a(example, fam, ca)).passed


def test_lyapunov_decrease_on_random_signals(ranged):
    s, fam, _, ca = ranged
    rng = np.random.default_rng(7)
    for seed in range(100):
        sig = random_admissible_signal(s, seed, 30)
        x0 = rng.normal(size=2)
        V, X = lyapunov_values(s, fam, ca, sig, x0, 200)
        assert np.all(V > 0)
        assert np.all(np.diff(V) < 0)


def test_lyapunov_needs_condition_a(ranged):
    s, fam, cb, _ = ranged
    with pytest.raises(CertificateError):
        lyapunov_values(s, fam, cb, random_admissible_signal(s, 0, 10), [1.0, 0.0], 20)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 10.0))
def test_scaling_keeps_verdict(c):
    s = SwitchedSystem(np.stack([[[1, 0.1], [-0.2, 0.9]], [[1, 0.1], [-0.9, 0.9]]]), 10, 10)
    fam, cb = _CACHE.setdefault("b", _cert_b(s, 1))
    assert verify_certificate_b(s, fam, scale_certificate(cb, c)).passed
    ca = _CACHE.setdefault("a", convert_b_to_a(s, fam, cb))
    assert verify_certificate_a(s, fam, scale_certificate(ca, c)).passed


_CACHE = {}


def test_tampering_is_detected(example, tau10):
    fam, cb = tau10
    rep = verify_certificate_b(example, fam, cb)
    # push one pair past zero by adding the worst margin back on P_2
    worst = -rep.margin("pair")
    P = list(cb.P)
    P[1] = P[1] - 2 * worst * np.eye(2)
    assert not verify_certificate_b(example, fam, CertificateB(1, tuple(P), cb.cycles, cb.meta)).passed


def test_file_round_trip(example, tau10, ranged):
    fam, cb = tau10
    back = load_certificate(dump_certificate(cb), example)
    assert back.meta["system_hash"] == example.content_hash()
    for P, Q in zip(back.P, cb.P):
        np.testing.assert_array_equal(P, Q)
    s, fam2, _, ca = ranged
    back_a = load_certificate(dump_certificate(ca), s)
    assert back_a.meta["delta"] == ca.meta["delta"]
    assert verify_certificate_a(s, fam2, back_a).passed


def test_file_rejects_other_system(example, tau10):
    _, cb = tau10
    with pytest.raises(CertificateError, match="different system"):
        load_certificate(dump_certificate(cb), example.with_dwell(9))


@pytest.mark.parametrize("text", ["{", '{"condition": "c", "L": 1, "dwell": {}, "system_hash": "", "entries": []}'])
def test_file_rejects_garbage(text):
    with pytest.raises(CertificateError):
        load_certificate(text)


def test_lyapunov_horizon_on_window_boundary(example, tau10):
    fam, cb = tau10
    ca = convert_b_to_a(example, fam, cb)
    sig = random_admissible_signal(example, 0, 10)
    for horizon in (9, 10, 11, 20):
        V, X = lyapunov_values(example, fam, ca, sig, [1.0, 0.0], horizon)
        assert V.shape == (horizon + 1,) and X.shape == (horizon + 1, 2)
        assert np.all(np.diff(V) < 0)
