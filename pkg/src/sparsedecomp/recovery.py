"""Basis pursuit (min ||g||_1 s.t. phi g = y) through a dense two-phase simplex.

The free vector g is split as ``g = u - w`` with ``u, w >= 0``, giving the
standard-form LP ``min 1'(u + w)  s.t.  [phi, -phi] [u; w] = y``.
"""
import enum
from dataclasses import dataclass

import numpy as np

from .decomposition import decompose
from .errors import LpFailure
from .rip import as_matrix
from .vector_core import as_vector, l1_norm, l2_norm, linf_norm

PIVOT_TOL = 1e-11
COST_TOL = 1e-9
PHASE1_TOL = 1e-9


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


@dataclass
class LpProblem:
    """``min cost @ x  s.t.  constraint_matrix @ x == rhs,  x >= 0``."""

    cost: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective: float
    iterations: int
    basis: tuple = ()
    reduced_costs: np.ndarray = None

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def build_bp_lp(phi, y):
    phi = as_matrix(phi)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size != phi.shape[0]:
        raise ValueError(f"y has length {y.size}, expected {phi.shape[0]}")
    p = phi.shape[1]
    return LpProblem(cost=np.ones(2 * p), constraint_matrix=np.hstack([phi, -phi]), rhs=y)


class _Tableau:
    """Dense tableau ``[A | b]`` with a cost row, pivoting by Bland's rule."""

    def __init__(self, A, b, basis):
        self.T = np.hstack([A, b[:, None]])
        self.basis = list(basis)
        self.iterations = 0

    def pivot(self, row, col):
        T = self.T
        T[row] /= T[row, col]
        others = np.abs(T[:, col]) > 0
        others[row] = False
        T[others] -= np.outer(T[others, col], T[row])
        T[others, col] = 0.0
        self.basis[row] = col
        self.iterations += 1

    def reduced_costs(self, c):
        cb = c[self.basis]
        return c - cb @ self.T[:, :-1]

    def run(self, c, allowed, max_iters):
        """Minimise ``c @ x`` over columns in `allowed`; returns a status."""
        while True:
            if self.iterations >= max_iters:
                return LpStatus.ITERATION_LIMIT
            rc = self.reduced_costs(c)
            entering = next((j for j in allowed if rc[j] < -COST_TOL), None)
            if entering is None:
                return LpStatus.OPTIMAL
            col = self.T[:, entering]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return LpStatus.UNBOUNDED
            ratios = self.T[rows, -1] / col[rows]
            best = ratios.min()
            # Bland: among minimum ratios leave on the smallest basic index
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            leaving = min(ties, key=lambda r: self.basis[r])
            self.pivot(leaving, entering)


def simplex_solve(lp, max_iters=10_000):
    """Two-phase dense simplex with Bland's anti-cycling rule."""
    A = np.array(lp.constraint_matrix, dtype=np.float64)
    b = np.array(lp.rhs, dtype=np.float64)
    c = np.asarray(lp.cost, dtype=np.float64)
    m, nvar = A.shape

    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase I: artificial variables nvar..nvar+m-1 form the starting basis
    tab = _Tableau(np.hstack([A, np.eye(m)]), b, range(nvar, nvar + m))
    c1 = np.concatenate([np.zeros(nvar), np.ones(m)])
    status = tab.run(c1, range(nvar + m), max_iters)
    if status is LpStatus.ITERATION_LIMIT:
        return LpSolution(status, None, float("nan"), tab.iterations)
    infeasibility = float(tab.T[:, -1] @ c1[tab.basis])
    if infeasibility > PHASE1_TOL * max(1.0, float(np.max(b, initial=0.0))):
        return LpSolution(LpStatus.INFEASIBLE, None, float("nan"), tab.iterations)

    # drive zero-level artificials out of the basis; drop redundant rows
    row = 0
    while row < len(tab.basis):
        if tab.basis[row] >= nvar:
            cands = np.flatnonzero(np.abs(tab.T[row, :nvar]) > PIVOT_TOL)
            if cands.size:
                tab.pivot(row, int(cands[0]))
            else:
                tab.T = np.delete(tab.T, row, axis=0)
                del tab.basis[row]
                continue
        row += 1
    tab.T = np.delete(tab.T, np.s_[nvar:nvar + m], axis=1)

    status = tab.run(c, range(nvar), max_iters)
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, None, float("nan"), tab.iterations, tuple(tab.basis))

    # re-solve the basic system from the original data to shed pivot round-off
    x = np.zeros(nvar)
    B = list(tab.basis)
    if B:
        x_b, *_ = np.linalg.lstsq(A[:, B], b, rcond=None)
        x[B] = np.maximum(x_b, 0.0)
        duals, *_ = np.linalg.lstsq(A[:, B].T, c[B], rcond=None)
        rc = c - A.T @ duals
    else:
        rc = c.copy()
    return LpSolution(LpStatus.OPTIMAL, x, float(c @ x), tab.iterations, tuple(B), rc)


@dataclass
class RecoveryResult:
    beta_hat: np.ndarray
    residual: float
    l1_value: float
    exact: bool = None
    error: float = None

    def to_dict(self):
        return {
            "beta_hat": self.beta_hat.tolist(),
            "residual": self.residual,
            "l1_value": self.l1_value,
            "exact": self.exact,
            "error": self.error,
        }


def recover(phi, y, reference=None, tol=1e-6, max_iters=10_000):
    """l1-minimal solution of ``phi g = y``.

    With a `reference`, ``exact`` reports whether the minimiser matches it to
    within `tol` in every component.
    """
    phi = as_matrix(phi)
    sol = simplex_solve(build_bp_lp(phi, y), max_iters)
    if not sol.optimal:
        raise LpFailure(sol.status)
    p = phi.shape[1]
    beta_hat = sol.x[:p] - sol.x[p:]
    y = np.asarray(y, dtype=np.float64)
    result = RecoveryResult(
        beta_hat=beta_hat,
        residual=float(np.max(np.abs(phi @ beta_hat - y))),
        l1_value=l1_norm(beta_hat),
    )
    if reference is not None:
        reference = as_vector(reference, "reference")
        result.error = float(np.max(np.abs(beta_hat - reference)))
        result.exact = result.error <= tol
    return result


@dataclass
class ProofChain:
    """Quantities along the argument that a nonzero error h forces delta+theta >= 1.

    With T the k largest entries of |h| and S the rest, the chain is
    ``(1-delta)|h_T|^2 <= |phi h_T|^2 = |<phi h_T, phi h_S>|
    <= sum_j x_j |<phi h_T, phi w_j>| <= theta |h_T| sum_j x_j |w_j| <= theta |h_T|^2``
    where ``h_S = sum_j x_j w_j`` is a convex k-sparse decomposition with
    capacity ``||h_T||_1``.
    """

    h_is_zero: bool
    tail_l1: float = 0.0
    head_l1: float = 0.0
    max_term_l2: float = 0.0
    head_l2: float = 0.0
    lower: float = 0.0
    energy: float = 0.0
    cross: float = 0.0
    split_sum: float = 0.0
    theta_bound: float = 0.0
    upper: float = 0.0
    terms: int = 0
    checks: dict = None

    @property
    def holds(self):
        return self.h_is_zero or all(self.checks.values())


def proof_chain(phi, beta, beta_hat, k, delta, theta, zero_tol=1e-6, tol=1e-8):
    """Evaluate every inequality linking h = beta_hat - beta to delta_k and theta_{k,k}."""
    phi = as_matrix(phi)
    h = np.asarray(beta_hat, dtype=np.float64) - np.asarray(beta, dtype=np.float64)
    if linf_norm(h) <= zero_tol:
        return ProofChain(h_is_zero=True, checks={})

    order = np.argsort(-np.abs(h), kind="stable")
    T, S = order[:k], order[k:]
    h_T = np.zeros_like(h)
    h_T[T] = h[T]
    h_S = np.zeros_like(h)
    h_S[S] = h[S]
    head_l1, tail_l1 = l1_norm(h_T), l1_norm(h_S)
    head_l2 = l2_norm(h_T)

    # capacity ||h_T||_1, nudged up only if round-off in h breaks the hypotheses
    C = max(head_l1, tail_l1, k * linf_norm(h_S))
    if np.any(h_S):
        d = decompose(h_S, k, C)
        x = d.weights
        W = d.vectors
    else:
        x, W = np.ones(1), np.zeros((1, h.size))
    term_l2 = np.linalg.norm(W, axis=1)

    a = phi @ h_T
    energy = float(a @ a)
    cross = abs(float(a @ (phi @ h_S)))
    split_sum = float(x @ np.abs(W @ (phi.T @ a)))
    theta_bound = float(theta * head_l2 * (x @ term_l2))
    upper = theta * head_l2 ** 2
    lower = (1 - delta) * head_l2 ** 2
    scale = max(1.0, energy, head_l2 ** 2)

    checks = {
        "tail_l1_le_head_l1": tail_l1 <= head_l1 + tol,
        "terms_supported_off_head": bool(np.all(np.abs(W[:, T]) <= tol)),
        "term_l2_le_head_l2": float(term_l2.max()) <= head_l2 + tol,
        "lower_le_energy": lower <= energy + tol * scale,
        "energy_eq_cross": abs(energy - cross) <= tol * scale,
        "cross_le_split": cross <= split_sum + tol * scale,
        "split_le_theta_bound": split_sum <= theta_bound + tol * scale,
        "theta_bound_le_upper": theta_bound <= upper + tol * scale,
        "lower_le_upper": lower <= upper + tol * scale,
    }
    return ProofChain(
        h_is_zero=False, tail_l1=tail_l1, head_l1=head_l1,
        max_term_l2=float(term_l2.max()), head_l2=head_l2, lower=lower,
        energy=energy, cross=cross, split_sum=split_sum, theta_bound=theta_bound,
        upper=upper, terms=len(x), checks=checks,
    )
