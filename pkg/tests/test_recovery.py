import numpy as np
import pytest

from oracles import lp_vertex_enumeration
from sparsedecomp.errors import LpFailure
from sparsedecomp.harness import gen_signal
from sparsedecomp.recovery import (
    LpProblem,
    LpStatus,
    build_bp_lp,
    proof_chain,
    recover,
    simplex_solve,
)
from sparsedecomp.rip import rip_report

PHI23 = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])


def test_build_bp_lp_layout():
    lp = build_bp_lp(PHI23, [1.0, 0.0])
    np.testing.assert_array_equal(lp.cost, np.ones(6))
    np.testing.assert_array_equal(lp.constraint_matrix, np.hstack([PHI23, -PHI23]))
    np.testing.assert_array_equal(lp.rhs, [1.0, 0.0])
    with pytest.raises(ValueError):
        build_bp_lp(PHI23, [1.0, 2.0, 3.0])


@pytest.mark.parametrize("phi, y, beta_hat, objective", [
    (np.eye(2), [1.0, -2.0], [1.0, -2.0], 3.0),
    (PHI23, [1.0, 0.0], [1.0, 0.0, 0.0], 1.0),
    (PHI23, [0.0, 0.0], [0.0, 0.0, 0.0], 0.0),
])
def test_recover_examples(phi, y, beta_hat, objective):
    res = recover(phi, y)
    np.testing.assert_allclose(res.beta_hat, beta_hat, atol=1e-12)
    assert res.l1_value == pytest.approx(objective, abs=1e-12)
    assert res.residual <= 1e-12
    assert res.exact is None


def test_vertex_oracle_on_worked_instance():
    lp = build_bp_lp(PHI23, [1.0, 0.0])
    best, x = lp_vertex_enumeration(lp.constraint_matrix, lp.rhs, lp.cost)
    assert best == pytest.approx(1.0)
    np.testing.assert_allclose(x[:3] - x[3:], [1, 0, 0], atol=1e-12)
    # the competing vertex through column 3 needs gamma_2 = -1
    assert lp.cost @ np.array([0, 0, 1, 0, 1, 0]) == 2.0


def test_simplex_statuses():
    sol = simplex_solve(build_bp_lp(np.zeros((2, 3)), [1.0, 0.0]))
    assert sol.status is LpStatus.INFEASIBLE
    with pytest.raises(LpFailure):
        recover(np.zeros((2, 3)), [1.0, 0.0])

    unbounded = LpProblem(np.array([-1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([1.0]))
    assert simplex_solve(unbounded).status is LpStatus.UNBOUNDED

    sol = simplex_solve(build_bp_lp(PHI23, [1.0, 2.0]), max_iters=1)
    assert sol.status is LpStatus.ITERATION_LIMIT


def test_redundant_rows_are_dropped():
    phi = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]])
    res = recover(phi, [2.0, 4.0, -1.0])
    np.testing.assert_allclose(res.beta_hat, [0.0, 1.0, -1.0], atol=1e-12)


def test_matches_vertex_enumeration_and_certificates():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 5))
        p = int(rng.integers(n, 7))
        phi = rng.standard_normal((n, p))
        y = rng.standard_normal(n)
        lp = build_bp_lp(phi, y)
        sol = simplex_solve(lp)
        assert sol.optimal
        best, _ = lp_vertex_enumeration(lp.constraint_matrix, lp.rhs, lp.cost)
        assert sol.objective == pytest.approx(best, abs=1e-8)
        # primal feasibility, dual feasibility, complementary slackness
        assert sol.x.min() >= -1e-10
        assert np.max(np.abs(lp.constraint_matrix @ sol.x - y)) <= 1e-8 * max(1, np.abs(y).max())
        assert sol.reduced_costs.min() >= -1e-9
        assert np.max(np.abs(sol.x * sol.reduced_costs)) <= 1e-8
        # split halves never both active
        assert np.max(sol.x[:p] * sol.x[p:]) <= 1e-9


def test_l1_never_exceeds_reference():
    rng = np.random.default_rng(12)
    for _ in range(30):
        phi = rng.standard_normal((3, 7))
        beta = gen_signal(7, 2, int(rng.integers(1 << 30)))
        res = recover(phi, phi @ beta, reference=beta)
        assert res.l1_value <= np.abs(beta).sum() + 1e-9


def test_identity_recovers_anything():
    rng = np.random.default_rng(13)
    beta = rng.standard_normal(6)
    res = recover(np.eye(6), beta, reference=beta)
    assert res.exact and res.error <= 1e-12


def test_duplicated_columns_make_the_optimum_ambiguous():
    col = np.array([0.6, 0.8])
    phi = np.column_stack([col, col])
    beta = np.array([0.0, 1.0])
    res = recover(phi, phi @ beta, reference=beta)
    assert res.l1_value == pytest.approx(1.0)
    assert res.exact is False
    np.testing.assert_allclose(res.beta_hat, [1.0, 0.0], atol=1e-12)


def test_recover_to_dict():
    d = recover(np.eye(2), [1.0, 0.0], reference=[1.0, 0.0]).to_dict()
    assert set(d) == {"beta_hat", "residual", "l1_value", "exact", "error"}


def test_proof_chain_zero_error():
    chain = proof_chain(np.eye(3), [1, 0, 0], [1, 0, 0], 1, 0.0, 0.0)
    assert chain.h_is_zero and chain.holds


def test_proof_chain_on_failed_recoveries():
    rng = np.random.default_rng(14)
    seen = 0
    for _ in range(60):
        phi = rng.standard_normal((3, 7))
        phi /= np.linalg.norm(phi, axis=0)
        beta = gen_signal(7, 2, int(rng.integers(1 << 30)))
        res = recover(phi, phi @ beta, reference=beta)
        if res.exact:
            continue
        rep = rip_report(phi, 2)
        chain = proof_chain(phi, beta, res.beta_hat, 2, rep.delta, rep.theta)
        assert not chain.h_is_zero
        assert chain.holds, chain.checks
        assert rep.condition_value >= 1
        assert chain.lower <= chain.upper + 1e-8
        seen += 1
    assert seen >= 10


def test_proof_chain_flags_a_non_minimiser():
    phi = np.eye(4)[:2]
    beta = np.array([1.0, 0.0, 0.0, 0.0])
    fake = np.array([1.1, 0.0, 1.0, -1.0])
    chain = proof_chain(phi, beta, fake, 1, 1.0, 0.0)
    assert not chain.checks["tail_l1_le_head_l1"]
    assert not chain.holds
