"""Convex k-sparse decomposition of a vector.

Every vector with ||v||_1 <= C and ||v||_inf <= C/k is an average of k-sparse
vectors that all keep the l1 norm of v and stay below C/k entrywise.
"""
import math

import numpy as np

from sparsedecomp import decompose, expand_step, l2_profile, verify_decomposition

# %% One expansion step on (1/3, 1/3, 1/3) with k = 2, C = 1
step = expand_step([1 / 3, 1 / 3, 1 / 3], k=2, C=1.0)
print("children:\n", step.children)
print("weights:", step.weights)
print("recombined:", step.combine())

# %% Full decomposition; signs are carried through
d = decompose([-1 / 3, 1 / 3, -1 / 3], k=2, capacity=1.0)
for term in d.terms:
    print(f"{term.weight:.4f} * {term.vector}")

# %% A dense random vector: the number of terms never exceeds comb(n, k)
rng = np.random.default_rng(0)
v = rng.standard_normal(10)
for k in (1, 2, 3, 4):
    d = decompose(v, k)
    report = verify_decomposition(d)
    print(f"k={k}: {len(d):4d} terms (comb = {math.comb(10, k):4d}), "
          f"checks passed: {report.passed}, residual {report.reconstruction_residual:.1e}")

# %% Merging per level versus expanding every branch
v = rng.standard_normal(8)
for strategy in ("level", "depth_first"):
    d = decompose(v, 2, strategy=strategy)
    print(strategy, len(d), verify_decomposition(d).passed)

# %% The l2 comparison: ||v||_2 <= sum_t x_t ||w_t||_2 <= C / sqrt(k)
lo, mid, hi = l2_profile(decompose(v, 3))
print(f"{lo:.4f} <= {mid:.4f} <= {hi:.4f}")
