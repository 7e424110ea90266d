"""l1 minimisation by linear programming, and what happens when recovery fails."""
import numpy as np

from sparsedecomp import proof_chain, recover, rip_report
from sparsedecomp.harness import gen_signal

# %% A tiny instance: the sparse solution wins
phi = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
res = recover(phi, [1.0, 0.0])
print("beta_hat =", res.beta_hat, "l1 =", res.l1_value)

# %% Too few measurements: recovery can fail, and then delta_2 + theta_22 >= 1
rng = np.random.default_rng(4)
phi = rng.standard_normal((3, 8))
phi /= np.linalg.norm(phi, axis=0)
rep = rip_report(phi, 2)
print(f"delta_2 + theta_22 = {rep.condition_value:.3f}")
for seed in range(10):
    beta = gen_signal(8, 2, seed)
    res = recover(phi, phi @ beta, reference=beta)
    if res.exact:
        continue
    chain = proof_chain(phi, beta, res.beta_hat, 2, rep.delta, rep.theta)
    print(f"signal {seed}: error {res.error:.3f}; "
          f"(1-delta)|h_T|^2 = {chain.lower:.3f} <= theta |h_T|^2 = {chain.upper:.3f}; "
          f"all steps hold: {chain.holds}")
