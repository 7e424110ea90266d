"""Dense real vectors: norms, sparsity tests and the sign/sort reduction.

Vectors are plain 1-d float64 numpy arrays. ``canonicalize`` strips signs and
sorts magnitudes in descending order, which is the normal form the
decomposition engine works in; ``decanonicalize`` maps results back.
"""
from dataclasses import dataclass

import numpy as np


def as_vector(v, name="v"):
    """Return `v` as a finite 1-d float64 array of length >= 1."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def l1_norm(v):
    return float(np.sum(np.abs(v)))


def linf_norm(v):
    v = np.asarray(v, dtype=np.float64)
    return float(np.max(np.abs(v))) if v.size else 0.0


def l2_norm(v):
    return float(np.sqrt(np.sum(np.square(v))))


def default_zero_tol(v):
    return 1e-12 * max(1.0, linf_norm(v))


def support(v, zero_tol=None):
    """Sorted indices (0-based) of entries with magnitude above `zero_tol`."""
    v = np.asarray(v, dtype=np.float64)
    if zero_tol is None:
        zero_tol = default_zero_tol(v)
    return tuple(int(i) for i in np.flatnonzero(np.abs(v) > zero_tol))


def is_k_sparse(v, k, zero_tol=None):
    if k < 0:
        raise ValueError("k must be nonnegative")
    return len(support(v, zero_tol)) <= k


@dataclass(frozen=True)
class CanonicalVector:
    """Sorted magnitudes of a vector plus what is needed to undo the sort.

    ``magnitudes[i] == abs(original[permutation[i]])`` and ``signs`` is indexed
    by original position.
    """

    magnitudes: np.ndarray
    signs: np.ndarray
    permutation: np.ndarray
    zero_count: int

    def __len__(self):
        return self.magnitudes.size


def canonicalize(v, zero_tol=None):
    v = as_vector(v)
    if zero_tol is None:
        zero_tol = default_zero_tol(v)
    mags = np.abs(v)
    # stable sort on -|v| keeps ties in ascending original index
    perm = np.argsort(-mags, kind="stable")
    signs = np.where(v < 0, -1.0, 1.0)
    return CanonicalVector(
        magnitudes=mags[perm],
        signs=signs,
        permutation=perm,
        zero_count=int(np.count_nonzero(mags <= zero_tol)),
    )


def decanonicalize(c, w):
    """Place sorted-order values `w` back into original order and signs."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != c.magnitudes.shape:
        raise ValueError(
            f"length mismatch: canonical form has {c.magnitudes.size} entries, got {w.size}")
    out = np.empty_like(w)
    out[c.permutation] = w
    # + 0.0 turns -0.0 into 0.0
    return out * c.signs + 0.0
