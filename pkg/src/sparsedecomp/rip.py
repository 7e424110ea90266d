"""Exact restricted isometry and restricted orthogonality constants.

Both constants are computed by enumerating every support (or pair of disjoint
supports) and taking extreme eigenvalues of small Gram blocks, so the cost is
combinatorial in p and k.  Budgets guard against accidental blow-ups; the
environment variable ``SPARSEDECOMP_BUDGET`` raises or lowers them.
"""
import math
import os
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded, NoConvergence

SUPPORT_BUDGET = 10**6
PAIR_BUDGET = 10**8
MAX_EIGEN_DIM = 64


def as_matrix(phi):
    A = np.asarray(phi, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains NaN or Inf")
    return A


def _budgets(support_budget, pair_budget):
    env = os.environ.get("SPARSEDECOMP_BUDGET")
    if env:
        try:
            override = int(float(env))
        except ValueError:
            raise ValueError(f"SPARSEDECOMP_BUDGET must be an integer, got {env!r}") from None
        support_budget = support_budget or override
        pair_budget = pair_budget or override
    return support_budget or SUPPORT_BUDGET, pair_budget or PAIR_BUDGET


def jacobi_eigh(A, tol=1e-12, max_sweeps=100, max_dim=MAX_EIGEN_DIM):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns, in
    the order the diagonal ends up (unsorted).
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    d = A.shape[0]
    if d > max_dim:
        raise ValueError(f"dimension {d} exceeds the Jacobi kernel limit {max_dim}")
    scale = np.linalg.norm(A)
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-10 * max(1.0, scale):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(d)
    if scale == 0.0:
        return np.zeros(d), V

    threshold = tol * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < threshold:
            return np.diag(A).copy(), V
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                # rotation angle that annihilates A[p, q]
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def sym_eigen_extremes(A, tol=1e-12, max_sweeps=100, max_dim=MAX_EIGEN_DIM):
    """Smallest and largest eigenvalue of a symmetric matrix."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape == (1, 1):
        return float(A[0, 0]), float(A[0, 0])
    w, _ = jacobi_eigh(A, tol, max_sweeps, max_dim)
    return float(w.min()), float(w.max())


def _check_budget(count, budget, what):
    if count > budget:
        raise BudgetExceeded(f"{what}: {count} exceeds the enumeration budget {budget}")


def _isometry_defect(G):
    lo, hi = sym_eigen_extremes(G)
    return max(hi - 1.0, 1.0 - lo)


def delta_k(phi, k, budget=None):
    """Restricted isometry constant of order k and the support attaining it.

    Supports are 0-based index tuples; ties keep the lexicographically first.
    """
    phi = as_matrix(phi)
    p = phi.shape[1]
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")
    budget, _ = _budgets(budget, None)
    _check_budget(math.comb(p, k), budget, f"C({p},{k}) supports")

    G = phi.T @ phi
    best, witness = -math.inf, None
    for T in combinations(range(p), k):
        val = _isometry_defect(G[np.ix_(T, T)])
        if val > best:
            best, witness = val, T
    return max(best, 0.0), witness


def _spectral_norm(B):
    # largest singular value via the smaller of B B^T and B^T B
    M = B @ B.T if B.shape[0] <= B.shape[1] else B.T @ B
    _, hi = sym_eigen_extremes(M)
    return math.sqrt(max(hi, 0.0))


def theta_kk(phi, k, k_prime, budget=None):
    """Restricted orthogonality constant theta_{k,k'} and an attaining support pair."""
    phi = as_matrix(phi)
    p = phi.shape[1]
    if k < 1 or k_prime < 1:
        raise ValueError("k and k_prime must be positive")
    if k + k_prime > p:
        raise ValueError(f"k + k_prime = {k + k_prime} exceeds p = {p}")
    _, budget = _budgets(None, budget)
    pairs = math.comb(p, k) * math.comb(p - k, k_prime)
    _check_budget(pairs, budget, "disjoint support pairs")

    G = phi.T @ phi
    symmetric = k == k_prime
    best, witness = -math.inf, None
    for T in combinations(range(p), k):
        rest = [j for j in range(p) if j not in T]
        for Tp in combinations(rest, k_prime):
            if symmetric and Tp < T:
                continue
            val = _spectral_norm(G[np.ix_(T, Tp)])
            if val > best:
                best, witness = val, (T, Tp)
    return best, witness


@dataclass
class RipReport:
    k: int
    k_prime: int
    delta: float
    theta: float
    delta_witness: tuple
    theta_witness: tuple
    condition_value: float
    condition_holds: bool

    def to_dict(self):
        return {
            "k": self.k,
            "k_prime": self.k_prime,
            "delta": self.delta,
            "theta": self.theta,
            "delta_witness": list(self.delta_witness),
            "theta_witness": [list(self.theta_witness[0]), list(self.theta_witness[1])],
            "condition_value": self.condition_value,
            "condition_holds": self.condition_holds,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            k=int(data["k"]),
            k_prime=int(data["k_prime"]),
            delta=float(data["delta"]),
            theta=float(data["theta"]),
            delta_witness=tuple(data["delta_witness"]),
            theta_witness=tuple(tuple(s) for s in data["theta_witness"]),
            condition_value=float(data["condition_value"]),
            condition_holds=bool(data["condition_holds"]),
        )


def rip_report(phi, k, k_prime=None, budget=None):
    """delta_k, theta_{k,k'} and whether delta_k + theta_{k,k} < 1."""
    phi = as_matrix(phi)
    p = phi.shape[1]
    if 2 * k > p:
        raise ValueError(f"2k = {2 * k} exceeds p = {p}")
    k_prime = k if k_prime is None else k_prime
    delta, dw = delta_k(phi, k, budget)
    theta, tw = theta_kk(phi, k, k_prime, budget)
    theta_same = theta if k_prime == k else theta_kk(phi, k, k, budget)[0]
    value = delta + theta_same
    return RipReport(k, k_prime, delta, theta, dw, tw, value, bool(value < 1.0))


def witness_vectors(phi, support):
    """Unit coefficient vectors on `support` attaining the extreme Gram eigenvalues.

    Returns ``(c_min, c_max)`` as length-p arrays.
    """
    phi = as_matrix(phi)
    T = list(support)
    G = phi[:, T].T @ phi[:, T]
    if len(T) == 1:
        w, V = G.diagonal().copy(), np.ones((1, 1))
    else:
        w, V = jacobi_eigh(G)
    out = []
    for i in (int(np.argmin(w)), int(np.argmax(w))):
        c = np.zeros(phi.shape[1])
        c[T] = V[:, i] / np.linalg.norm(V[:, i])
        out.append(c)
    return tuple(out)


def verify_rip_by_sampling(phi, k, delta, trials=10_000, seed=0, witness=None, slack=1e-10):
    """Check (1-delta) <= ||phi c||^2 <= (1+delta) on random unit k-sparse c.

    If `witness` (a support) is given, its extremal eigenvectors are tested
    first, which makes an understated `delta` fail deterministically.
    """
    phi = as_matrix(phi)
    p = phi.shape[1]
    rng = np.random.default_rng(seed)
    coeffs = np.zeros((trials, p))
    if trials:
        supports = np.argsort(rng.random((trials, p)), axis=1)[:, :k]
        values = rng.standard_normal((trials, k))
        values /= np.linalg.norm(values, axis=1, keepdims=True)
        np.put_along_axis(coeffs, supports, values, axis=1)
    if witness is not None:
        coeffs = np.vstack([np.array(witness_vectors(phi, witness)), coeffs])
    energy = np.sum((coeffs @ phi.T) ** 2, axis=1)
    return bool(np.all(energy >= 1.0 - delta - slack) and np.all(energy <= 1.0 + delta + slack))
