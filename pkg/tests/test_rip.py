import math

import numpy as np
import pytest

from oracles import delta_by_bisection, eig_extremes_bisection, theta11_pairwise
from sparsedecomp.errors import BudgetExceeded
from sparsedecomp.rip import (
    RipReport,
    delta_k,
    jacobi_eigh,
    rip_report,
    sym_eigen_extremes,
    theta_kk,
    verify_rip_by_sampling,
    witness_vectors,
)

R = 1 / math.sqrt(2)
PHI2 = np.array([[1.0, R], [0.0, R]])


def random_matrix(rng, n, p):
    A = rng.standard_normal((n, p))
    return A / np.linalg.norm(A, axis=0)


@pytest.mark.parametrize("A, expected", [
    (np.eye(3), (1.0, 1.0)),
    ([[1, R], [R, 1]], (1 - R, 1 + R)),
    (np.diag([0.8, 1.2]), (0.8, 1.2)),
    ([[2.0]], (2.0, 2.0)),
    (np.zeros((3, 3)), (0.0, 0.0)),
])
def test_sym_eigen_extremes(A, expected):
    assert sym_eigen_extremes(A) == pytest.approx(expected, abs=1e-14)


def test_jacobi_matches_bisection_oracle():
    rng = np.random.default_rng(0)
    for d in (2, 3, 5, 8, 16):
        B = rng.standard_normal((d, d))
        A = B + B.T
        w, V = jacobi_eigh(A)
        lo, hi = eig_extremes_bisection(A)
        assert w.min() == pytest.approx(lo, abs=1e-10)
        assert w.max() == pytest.approx(hi, abs=1e-10)
        np.testing.assert_allclose(A @ V, V * w, atol=1e-11)
        np.testing.assert_allclose(V.T @ V, np.eye(d), atol=1e-12)


def test_jacobi_rejects_bad_input():
    with pytest.raises(ValueError, match="symmetric"):
        jacobi_eigh([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        jacobi_eigh(np.eye(4), max_dim=3)
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))


def test_delta_examples():
    for k in (1, 2, 3):
        assert delta_k(np.eye(5), k)[0] == 0.0
    assert delta_k(PHI2, 1)[0] == pytest.approx(0.0, abs=1e-15)
    assert delta_k(PHI2, 2) == (pytest.approx(R, abs=1e-14), (0, 1))
    assert delta_k(np.diag([1.0, math.sqrt(1.2)]), 1) == (pytest.approx(0.2, abs=1e-14), (1,))


def test_delta_witness_tie_breaks_lexicographically():
    assert delta_k(np.diag([2.0, 1.0, 2.0]), 1)[1] == (0,)


def test_theta_examples():
    rng = np.random.default_rng(1)
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    for k, kp in [(1, 1), (2, 2), (1, 3), (3, 3)]:
        assert theta_kk(Q, k, kp)[0] == pytest.approx(0.0, abs=1e-14)
    theta, (T, Tp) = theta_kk(PHI2, 1, 1)
    assert theta == pytest.approx(R, abs=1e-15)
    assert (T, Tp) == ((0,), (1,))
    A = random_matrix(rng, 4, 6)
    assert theta_kk(A, 1, 1)[0] == pytest.approx(theta11_pairwise(A), abs=1e-12)


def test_theta_witness_disjoint_and_sized():
    rng = np.random.default_rng(2)
    A = random_matrix(rng, 4, 7)
    theta, (T, Tp) = theta_kk(A, 2, 3)
    assert len(T) == 2 and len(Tp) == 3 and not set(T) & set(Tp)
    assert theta == pytest.approx(np.linalg.norm(A[:, T].T @ A[:, Tp], 2), abs=1e-12)


def test_theta_rejects_oversized_supports():
    with pytest.raises(ValueError):
        theta_kk(np.eye(3), 2, 2)


def test_budget(monkeypatch):
    with pytest.raises(BudgetExceeded):
        delta_k(np.eye(10), 5, budget=100)
    monkeypatch.setenv("SPARSEDECOMP_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        theta_kk(np.eye(6), 1, 1)
    monkeypatch.setenv("SPARSEDECOMP_BUDGET", "1000")
    assert theta_kk(np.eye(6), 1, 1)[0] == 0.0


def test_rip_report_examples():
    r = rip_report(np.eye(4), 1)
    assert r.condition_value == 0.0 and r.condition_holds
    r = rip_report(PHI2, 1)
    assert r.delta == pytest.approx(0.0, abs=1e-15)
    assert r.theta == pytest.approx(R, abs=1e-15)
    assert r.condition_value == pytest.approx(R, abs=1e-14)
    assert r.condition_holds
    col = np.array([0.6, 0.8])
    dup = np.column_stack([col, col, [1.0, 0.0]])
    r = rip_report(dup, 1)
    assert r.theta == pytest.approx(1.0, abs=1e-15)
    assert not r.condition_holds
    assert r.condition_value == r.delta + r.theta


def test_rip_report_with_distinct_kprime():
    rng = np.random.default_rng(3)
    A = random_matrix(rng, 5, 7)
    r = rip_report(A, 2, 3)
    assert r.k_prime == 3
    assert r.theta == pytest.approx(theta_kk(A, 2, 3)[0])
    assert r.condition_value == pytest.approx(r.delta + theta_kk(A, 2, 2)[0])
    assert RipReport.from_dict(r.to_dict()) == r


def test_monotone_in_order():
    rng = np.random.default_rng(4)
    for _ in range(5):
        A = random_matrix(rng, 4, 7)
        d = [delta_k(A, k)[0] for k in (1, 2, 3)]
        assert d[0] <= d[1] + 1e-12 <= d[2] + 2e-12
        t = [theta_kk(A, k, 2)[0] for k in (1, 2, 3)]
        assert t[0] <= t[1] + 1e-12 <= t[2] + 2e-12


def test_witness_tightness():
    rng = np.random.default_rng(5)
    for k in (1, 2, 3):
        A = random_matrix(rng, 5, 7)
        delta, T = delta_k(A, k)
        c_min, c_max = witness_vectors(A, T)
        q = [float(np.sum((A @ c) ** 2)) for c in (c_min, c_max)]
        assert min(abs(q[0] - (1 - delta)), abs(q[1] - (1 + delta))) <= 1e-9


def test_sampling_oracle():
    rng = np.random.default_rng(6)
    assert verify_rip_by_sampling(np.eye(5), 2, 0.0, trials=500, seed=1)
    A = random_matrix(rng, 5, 8)
    delta, T = delta_k(A, 2)
    assert verify_rip_by_sampling(A, 2, delta, trials=10_000, seed=2)
    assert not verify_rip_by_sampling(A, 2, delta / 2, trials=0, witness=T)
    assert not verify_rip_by_sampling(A, 2, delta / 2, trials=10_000, seed=3)


def test_delta_matches_bisection_oracle():
    rng = np.random.default_rng(7)
    for _ in range(5):
        A = random_matrix(rng, 4, 6)
        for k in (1, 2, 3):
            assert delta_k(A, k)[0] == pytest.approx(delta_by_bisection(A, k), abs=1e-9)
