"""Seeded experiment: matrices with delta_k + theta_kk < 1 recover every k-sparse signal."""
import json

from sparsedecomp import ExperimentConfig, verify_theorem31

for n, p, k in ((10, 12, 1), (12, 14, 2)):
    cfg = ExperimentConfig(n, p, k, "partial_orthonormal", num_matrices=10, num_signals=10, seed=2024)
    verdict = verify_theorem31(cfg)
    print(f"n={n} p={p} k={k}:", json.dumps(verdict.summary()), "consistent:", verdict.consistent)
