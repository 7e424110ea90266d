"""Seeded experiments checking that delta_k + theta_{k,k} < 1 implies exact recovery.

Every random draw is derived from ``(seed, matrix index[, signal index])``
through numpy's PCG64 generator, so a config reproduces its report exactly.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from .fileio import InputError, read_matrix
from .recovery import proof_chain, recover
from .rip import RipReport, rip_report
from .vector_core import l1_norm

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
ENSEMBLES = ("gaussian", "partial_orthonormal", "identity", "user_file")
MIN_SIGNAL_MAGNITUDE = 1e-3


@dataclass
class ExperimentConfig:
    n: int
    p: int
    k: int
    ensemble: str = "partial_orthonormal"
    num_matrices: int = 1
    num_signals: int = 1
    seed: int = 0
    recovery_tol: float = 1e-6
    budget: int = None
    matrix_file: str = None

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"ensemble must be one of {ENSEMBLES}, got {self.ensemble!r}")
        if self.ensemble == "user_file":
            if not self.matrix_file:
                raise ValueError("ensemble 'user_file' needs 'matrix_file'")
        else:
            if not 1 <= self.n <= self.p:
                raise ValueError(f"need 1 <= n <= p, got n={self.n}, p={self.p}")
            if self.ensemble == "identity" and self.n != self.p:
                raise ValueError("ensemble 'identity' needs n == p")
        if self.k < 1 or 2 * self.k > self.p:
            raise ValueError(f"need 1 <= k and 2k <= p, got k={self.k}, p={self.p}")
        if self.num_matrices < 1 or self.num_signals < 1:
            raise ValueError("num_matrices and num_signals must be positive")
        if not self.recovery_tol > 0:
            raise ValueError("recovery_tol must be positive")

    @classmethod
    def from_dict(cls, data, where="config"):
        if not isinstance(data, dict):
            raise InputError(f"{where}: expected a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known - {"tolerances"})
        if unknown:
            raise InputError(f"{where}: unknown field(s) {', '.join(unknown)}")
        kwargs = {key: data[key] for key in known if key in data}
        tolerances = data.get("tolerances", {})
        if "recovery" in tolerances:
            kwargs["recovery_tol"] = tolerances["recovery"]
        for key in ("n", "p", "k", "num_matrices", "num_signals", "seed"):
            if key in kwargs and (isinstance(kwargs[key], bool) or not isinstance(kwargs[key], int)):
                raise InputError(f"{where}: field {key!r} must be an integer")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InputError(f"{where}: {exc}") from None
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from None

    def to_dict(self):
        return asdict(self)


def gen_matrix(config, index):
    """Measurement matrix number `index` of the configured ensemble."""
    n, p = config.n, config.p
    if config.ensemble == "identity":
        return np.eye(n)
    if config.ensemble == "user_file":
        phi = read_matrix(config.matrix_file)
        if phi.shape != (n, p):
            raise InputError(f"{config.matrix_file}: matrix is {phi.shape[0]}x{phi.shape[1]}, "
                             f"config says {n}x{p}")
        return phi
    rng = np.random.default_rng([config.seed, index])
    if config.ensemble == "gaussian":
        A = rng.standard_normal((n, p))
        return A / np.linalg.norm(A, axis=0)
    # Haar orthogonal matrix: QR of a Gaussian with the R-diagonal signs folded in
    Q, R = np.linalg.qr(rng.standard_normal((p, p)))
    Q = Q * np.sign(np.diag(R))
    return Q[:n] * math.sqrt(p / n)


def gen_signal(p, k, seed):
    """k-sparse vector with a uniform random support and Gaussian values.

    Draws of magnitude below 1e-3 are redrawn.
    """
    if not 0 <= k <= p:
        raise ValueError(f"need 0 <= k <= p, got k={k}, p={p}")
    rng = np.random.default_rng(seed)
    beta = np.zeros(p)
    if k == 0:
        return beta
    idx = rng.choice(p, size=k, replace=False)
    values = rng.standard_normal(k)
    while np.any(small := np.abs(values) < MIN_SIGNAL_MAGNITUDE):
        values[small] = rng.standard_normal(int(small.sum()))
    beta[idx] = values
    return beta


@dataclass
class SignalOutcome:
    signal_index: int
    exact: bool
    error: float
    residual: float
    l1_value: float
    l1_reference: float
    proof_chain_holds: bool


@dataclass
class MatrixVerdict:
    index: int
    rip: RipReport
    signals: list = field(default_factory=list)

    @property
    def consistent(self):
        return not self.rip.condition_holds or all(s.exact for s in self.signals)

    def to_dict(self):
        return {
            "index": self.index,
            "rip": self.rip.to_dict(),
            "signals": [asdict(s) for s in self.signals],
            "consistent": self.consistent,
        }


@dataclass
class TheoremVerdict:
    config: ExperimentConfig
    matrices: list = field(default_factory=list)

    @property
    def consistent(self):
        return all(m.consistent for m in self.matrices)

    def summary(self):
        holding = [m for m in self.matrices if m.rip.condition_holds]
        signals = [s for m in self.matrices for s in m.signals]
        return {
            "matrices": len(self.matrices),
            "condition_holds": len(holding),
            "signals": len(signals),
            "exact": sum(s.exact for s in signals),
            "exact_under_condition": sum(s.exact for m in holding for s in m.signals),
            "signals_under_condition": sum(len(m.signals) for m in holding),
            "proof_chain_failures": sum(not s.proof_chain_holds for s in signals),
        }

    def to_dict(self, timestamp=True):
        out = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "consistent": self.consistent,
            "summary": self.summary(),
            "matrices": [m.to_dict() for m in self.matrices],
        }
        if timestamp:
            out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return out


def verify_theorem31(config):
    """Compute the RIP report of every matrix and try to recover every signal.

    The verdict is consistent unless some matrix satisfies the condition and
    still fails to recover a signal.
    """
    verdict = TheoremVerdict(config)
    for i in range(config.num_matrices):
        phi = gen_matrix(config, i)
        p = phi.shape[1]
        report = rip_report(phi, config.k, budget=config.budget)
        mv = MatrixVerdict(i, report)
        for j in range(config.num_signals):
            beta = gen_signal(p, config.k, [config.seed, i, j])
            res = recover(phi, phi @ beta, reference=beta, tol=config.recovery_tol)
            chain = proof_chain(phi, beta, res.beta_hat, config.k, report.delta, report.theta,
                                zero_tol=config.recovery_tol)
            mv.signals.append(SignalOutcome(
                signal_index=j, exact=res.exact, error=res.error, residual=res.residual,
                l1_value=res.l1_value, l1_reference=l1_norm(beta),
                proof_chain_holds=chain.holds,
            ))
        if not report.condition_holds:
            log.info("matrix %d: condition fails (delta+theta=%.4f), %d/%d exact",
                     i, report.condition_value, sum(s.exact for s in mv.signals),
                     len(mv.signals))
        elif not mv.consistent:
            log.error("matrix %d: condition holds but recovery failed", i)
        verdict.matrices.append(mv)
    return verdict


def check_report(data):
    """Re-derive consistency of a stored report; returns a list of problems."""
    problems = []
    if not isinstance(data, dict):
        return ["report must be a JSON object"]
    if data.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema_version must be {SCHEMA_VERSION!r}")
    matrices = data.get("matrices")
    if not isinstance(matrices, list):
        return problems + ["field 'matrices' missing or not a list"]
    for i, m in enumerate(matrices):
        try:
            rip = m["rip"]
            holds = bool(rip["condition_holds"])
            if holds != (float(rip["delta"]) + float(rip["theta"]) < 1.0) and rip["k"] == rip["k_prime"]:
                problems.append(f"matrices[{i}]: condition_holds disagrees with delta + theta")
            failed = [s["signal_index"] for s in m["signals"] if not s["exact"]]
        except (KeyError, TypeError) as exc:
            problems.append(f"matrices[{i}]: malformed entry ({exc})")
            continue
        if holds and failed:
            problems.append(f"matrices[{i}]: condition holds but signals {failed} were not recovered")
    if not problems and data.get("consistent") is False:
        problems.append("report declares itself inconsistent")
    return problems
