"""Convex k-sparse decomposition with invariant l1 norm.

A vector ``v`` with ``||v||_1 <= C`` and ``||v||_inf <= C/k`` is written as
``v = sum_t x_t w_t`` where the weights ``x_t`` are a probability vector and
every ``w_t`` is k-sparse with ``||w_t||_1 == ||v||_1`` and
``||w_t||_inf <= C/k``.

The construction works on the sorted magnitudes of ``v``.  One expansion step
turns a vector with ``m > k`` positive entries into ``k + 1`` children with
``m - 1`` positive entries each; repeating ``m - k`` times yields k-sparse
leaves.  Leaves that share a support are merged, which caps the number of
terms at ``comb(n, k)``.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionViolated, SparseDecompError, TermBudgetExceeded
from .vector_core import (
    as_vector,
    canonicalize,
    decanonicalize,
    default_zero_tol,
    is_k_sparse,
    l1_norm,
    l2_norm,
    linf_norm,
    support,
)

# relative slack accepted on the capacity hypotheses
INPUT_SLACK = 1e-12
# tolerances used by verify_decomposition
TERM_TOL = 1e-10
WEIGHT_FLOOR = -1e-12
# y_0 may come out slightly negative from cancellation
Y0_GUARD = 1e-12


def default_capacity(v, k):
    """Smallest C for which (v, k, C) meets both capacity hypotheses."""
    v = as_vector(v)
    if not 1 <= k <= v.size:
        raise ValueError(f"k must lie in [1, {v.size}], got {k}")
    cap = max(l1_norm(v), k * linf_norm(v))
    if cap == 0.0:
        raise ValueError("capacity is undefined for the zero vector")
    return cap


@dataclass(frozen=True)
class DecompositionInput:
    v: np.ndarray
    k: int
    C: float = None

    def __post_init__(self):
        v = as_vector(self.v)
        object.__setattr__(self, "v", v)
        k = int(self.k)
        object.__setattr__(self, "k", k)
        if not 1 <= k <= v.size:
            raise PreconditionViolated(f"k must lie in [1, {v.size}], got {k}")
        C = self.C
        if C is None:
            C = default_capacity(v, k) if np.any(v) else 1.0
        C = float(C)
        if not C > 0 or not math.isfinite(C):
            raise PreconditionViolated(f"capacity must be positive and finite, got {C}")
        object.__setattr__(self, "C", C)
        if l1_norm(v) > C * (1 + INPUT_SLACK):
            raise PreconditionViolated(f"||v||_1 = {l1_norm(v)!r} exceeds C = {C!r}")
        if linf_norm(v) > C / k * (1 + INPUT_SLACK):
            raise PreconditionViolated(
                f"||v||_inf = {linf_norm(v)!r} exceeds C/k = {C / k!r}")

    @property
    def n(self):
        return self.v.size


@dataclass(frozen=True)
class SparseTerm:
    weight: float
    vector: np.ndarray

    def support(self, zero_tol=None):
        return support(self.vector, zero_tol)


@dataclass
class Decomposition:
    input: DecompositionInput
    terms: list = field(default_factory=list)

    @property
    def k(self):
        return self.input.k

    @property
    def C(self):
        return self.input.C

    @property
    def v(self):
        return self.input.v

    @property
    def weights(self):
        return np.array([t.weight for t in self.terms])

    @property
    def vectors(self):
        """Terms stacked as rows, shape (M, n)."""
        if not self.terms:
            return np.zeros((0, self.input.n))
        return np.vstack([t.vector for t in self.terms])

    def reconstruct(self):
        return self.weights @ self.vectors

    def __len__(self):
        return len(self.terms)

    def to_dict(self):
        return {
            "k": self.k,
            "C": self.C,
            "v": self.v.tolist(),
            "terms": [{"x": t.weight, "w": t.vector.tolist()} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data):
        for key in ("k", "C", "v", "terms"):
            if key not in data:
                raise ValueError(f"decomposition JSON is missing field {key!r}")
        inp = DecompositionInput(np.asarray(data["v"], dtype=float), data["k"], data["C"])
        terms = []
        for i, t in enumerate(data["terms"]):
            try:
                terms.append(SparseTerm(float(t["x"]), as_vector(t["w"], f"terms[{i}].w")))
            except KeyError as exc:
                raise ValueError(f"terms[{i}] is missing field {exc.args[0]!r}") from None
        return cls(inp, terms)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class ExpansionStep:
    """Children ``g_0..g_k`` (rows of `children`) and their convex weights."""

    children: np.ndarray
    weights: np.ndarray
    etas: np.ndarray
    lambdas: np.ndarray

    def combine(self):
        return self.weights @ self.children


def _check_capacity(u, k, C):
    slack = 1e-10
    if l1_norm(u) > C * (1 + slack):
        raise PreconditionViolated(f"||u||_1 = {l1_norm(u)!r} exceeds C = {C!r}")
    if linf_norm(u) > C / k * (1 + slack):
        raise PreconditionViolated(f"||u||_inf = {linf_norm(u)!r} exceeds C/k = {C / k!r}")


def expand_step(u, k, C):
    """One expansion of a sorted nonnegative vector with more than k positives.

    With ``m`` the number of positive entries, ``u[m-1]`` is the smallest one
    and gets redistributed: ``g_0`` drops it onto the first k entries in
    proportion to their headroom ``C/k - u[j]``; ``g_t`` (t >= 1) instead
    zeroes entry ``t-1`` and moves its boosted value to position ``m-1``.
    """
    u = as_vector(u, "u")
    n = u.size
    if not 1 <= k < n:
        raise PreconditionViolated(f"k must lie in [1, {n - 1}], got {k}")
    if np.any(u < 0) or np.any(np.diff(u) > 0):
        raise PreconditionViolated("u must be nonnegative and sorted in descending order")
    m = int(np.count_nonzero(u > 0))
    if m <= k:
        raise PreconditionViolated(f"u has {m} positive entries, need more than k = {k}")
    _check_capacity(u, k, C)

    etas = C / k - u[:k]
    etas = np.maximum(etas, 0.0)
    total = etas.sum()
    if not total > 0:
        raise PreconditionViolated("no headroom below C/k on the leading entries")
    lambdas = etas / total
    smallest = u[m - 1]
    boosted = u[:k] + lambdas * smallest

    base = u.copy()
    base[:k] = boosted
    children = np.tile(base, (k + 1, 1))
    children[0, m - 1] = 0.0
    t = np.arange(1, k + 1)
    children[t, t - 1] = 0.0
    children[t, m - 1] = boosted

    weights = np.empty(k + 1)
    weights[1:] = lambdas * smallest / boosted
    weights[0] = _guard_y0(1.0 - weights[1:].sum())
    return ExpansionStep(children, weights, etas, lambdas)


def _guard_y0(y0):
    if y0 < 0:
        if y0 < -Y0_GUARD:
            raise SparseDecompError(f"internal error: y_0 = {y0!r} is negative")
        return 0.0
    return min(y0, 1.0)


def _expand_level(U, k, C):
    """Vectorised `expand_step` over the rows of `U` (unsorted, same positive count).

    Returns children with shape (N, k+1, n) in the rows' own coordinates and
    weights with shape (N, k+1).
    """
    N, n = U.shape
    order = np.argsort(-U, axis=1, kind="stable")
    S = np.take_along_axis(U, order, axis=1)
    m = int(np.count_nonzero(S[0] > 0))
    cap = C / k
    etas = cap - S[:, :k]
    if etas.min() < -1e-10 * cap:
        raise PreconditionViolated("an entry exceeds C/k during expansion")
    etas = np.maximum(etas, 0.0)
    total = etas.sum(axis=1, keepdims=True)
    if not np.all(total > 0):
        raise PreconditionViolated("no headroom below C/k on the leading entries")
    lambdas = etas / total
    smallest = S[:, m - 1:m]
    boosted = S[:, :k] + lambdas * smallest

    base = S.copy()
    base[:, :k] = boosted
    G = np.repeat(base[:, None, :], k + 1, axis=1)
    G[:, 0, m - 1] = 0.0
    t = np.arange(1, k + 1)
    G[:, t, t - 1] = 0.0
    G[:, t, m - 1] = boosted

    Y = np.empty((N, k + 1))
    Y[:, 1:] = lambdas * smallest / boosted
    y0 = 1.0 - Y[:, 1:].sum(axis=1)
    if y0.min() < -Y0_GUARD:
        raise SparseDecompError(f"internal error: y_0 = {y0.min()!r} is negative")
    Y[:, 0] = np.clip(y0, 0.0, 1.0)

    out = np.empty_like(G)
    np.put_along_axis(out, np.broadcast_to(order[:, None, :], G.shape), G, axis=2)
    return out, Y


def _merge(vectors, weights):
    """Merge rows sharing a support into their weighted average."""
    keep = weights > 0
    vectors, weights = vectors[keep], weights[keep]
    masks = vectors > 0
    keys, inverse = np.unique(masks, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    merged_w = np.bincount(inverse, weights=weights, minlength=len(keys))
    acc = np.zeros((len(keys), vectors.shape[1]))
    np.add.at(acc, inverse, weights[:, None] * vectors)
    return acc / merged_w[:, None], merged_w


def _leaves_by_level(u, k, C):
    nodes = u[None, :]
    weights = np.ones(1)
    while np.count_nonzero(nodes[0] > 0) > k:
        children, Y = _expand_level(nodes, k, C)
        n = nodes.shape[1]
        nodes, weights = _merge(children.reshape(-1, n), (weights[:, None] * Y).ravel())
    return nodes, weights


def _leaves_depth_first(u, k, C):
    vecs, wts = [], []
    stack = [(u, 1.0)]
    while stack:
        node, x = stack.pop()
        if np.count_nonzero(node > 0) <= k:
            vecs.append(node)
            wts.append(x)
            continue
        order = np.argsort(-node, kind="stable")
        step = expand_step(node[order], k, C)
        for g, y in zip(step.children, step.weights):
            if y == 0.0:
                continue
            child = np.empty_like(g)
            child[order] = g
            stack.append((child, x * y))
    return _merge(np.vstack(vecs), np.array(wts))


def decompose(v, k=None, capacity=None, *, strategy="level", max_terms=None,
              prune_below=None):
    """Decompose `v` into a convex combination of k-sparse vectors.

    `v` may be a `DecompositionInput` or an array, in which case `k` is
    required and `capacity` defaults to `default_capacity(v, k)`.

    strategy="level" merges equal supports after every expansion level,
    which keeps the work polynomial for fixed k.  strategy="depth_first"
    expands every branch to a leaf and merges once at the end; its cost
    grows like (k+1)**(n-k).

    `prune_below` drops terms lighter than the threshold and renormalises the
    rest; reconstruction is then no longer exact.
    """
    inp = v if isinstance(v, DecompositionInput) else DecompositionInput(v, k, capacity)
    k, C, n = inp.k, inp.C, inp.n
    if max_terms is None:
        max_terms = math.comb(n, k)

    if is_k_sparse(inp.v, k, default_zero_tol(inp.v)):
        return Decomposition(inp, [SparseTerm(1.0, inp.v.copy())])

    canon = canonicalize(inp.v)
    if strategy == "level":
        leaves, weights = _leaves_by_level(canon.magnitudes, k, C)
    elif strategy == "depth_first":
        leaves, weights = _leaves_depth_first(canon.magnitudes, k, C)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    if len(weights) > max_terms:
        raise TermBudgetExceeded(f"{len(weights)} distinct supports exceed the cap of {max_terms}")

    if prune_below is not None:
        keep = weights >= prune_below
        leaves, weights = leaves[keep], weights[keep]
        weights = weights / weights.sum()

    terms = [SparseTerm(float(x), decanonicalize(canon, w)) for w, x in zip(leaves, weights)]
    terms.sort(key=lambda t: support(t.vector, 0.0))
    return Decomposition(inp, terms)


@dataclass
class DecompositionReport:
    reconstruction_residual: float
    weight_sum_residual: float
    min_weight: float
    max_support_size: int
    l1_deviation: float
    linf_excess: float
    distinct_supports: int
    support_limit: int
    reconstruction_ok: bool
    weights_ok: bool
    sparsity_ok: bool
    l1_ok: bool
    linf_ok: bool
    support_count_ok: bool

    @property
    def passed(self):
        return all((self.reconstruction_ok, self.weights_ok, self.sparsity_ok,
                    self.l1_ok, self.linf_ok, self.support_count_ok))

    def failures(self):
        return [name for name in ("reconstruction_ok", "weights_ok", "sparsity_ok",
                                  "l1_ok", "linf_ok", "support_count_ok")
                if not getattr(self, name)]


def verify_decomposition(d, tol=TERM_TOL):
    """Re-check a decomposition from scratch against its input.

    Nothing is trusted from the construction: residuals are recomputed from
    the stored weights and vectors.
    """
    v, k, C = d.v, d.k, d.C
    n = v.size
    x = np.array([float(t.weight) for t in d.terms])
    W = np.array([np.asarray(t.vector, dtype=float) for t in d.terms]).reshape(len(d.terms), n)
    v_l1 = l1_norm(v)
    zero_tol = default_zero_tol(v)

    residual = float(np.max(np.abs(x @ W - v))) if len(x) else linf_norm(v)
    weight_residual = abs(float(x.sum()) - 1.0)
    min_weight = float(x.min()) if len(x) else 0.0
    supports = [support(w, zero_tol) for w in W]
    max_support = max((len(s) for s in supports), default=0)
    l1_dev = max((abs(l1_norm(w) - v_l1) for w in W), default=0.0)
    linf_excess = max((linf_norm(w) for w in W), default=0.0) - C / k
    distinct = len(set(supports))
    limit = math.comb(n, k)

    return DecompositionReport(
        reconstruction_residual=residual,
        weight_sum_residual=weight_residual,
        min_weight=min_weight,
        max_support_size=max_support,
        l1_deviation=l1_dev,
        linf_excess=linf_excess,
        distinct_supports=distinct,
        support_limit=limit,
        reconstruction_ok=residual <= tol * max(1.0, linf_norm(v)),
        weights_ok=weight_residual <= tol and min_weight >= WEIGHT_FLOOR,
        sparsity_ok=max_support <= k,
        l1_ok=l1_dev <= tol * v_l1,
        linf_ok=linf_excess <= tol * C / k,
        support_count_ok=distinct <= limit,
    )


def l2_profile(d):
    """Return ``(||v||_2, sum_t x_t ||w_t||_2, C / sqrt(k))`` for a decomposition."""
    mixed = sum(t.weight * l2_norm(t.vector) for t in d.terms)
    return l2_norm(d.v), float(mixed), d.C / math.sqrt(d.k)


def l2_bound_check(inp, tol=TERM_TOL):
    """Decompose and test ``||v||_2 <= sum_t x_t ||w_t||_2 <= C/sqrt(k)``."""
    if not isinstance(inp, DecompositionInput):
        raise TypeError("expected a DecompositionInput")
    lo, mid, hi = l2_profile(decompose(inp))
    return lo <= mid + tol * max(1.0, mid) and mid <= hi + tol * hi
