"""Convex k-sparse decompositions, exact RIP constants and basis-pursuit checks."""
from .decomposition import (
    Decomposition,
    DecompositionInput,
    ExpansionStep,
    SparseTerm,
    decompose,
    default_capacity,
    expand_step,
    l2_bound_check,
    l2_profile,
    verify_decomposition,
)
from .errors import (
    BudgetExceeded,
    LpFailure,
    NoConvergence,
    PreconditionViolated,
    SparseDecompError,
    TermBudgetExceeded,
)
from .harness import ExperimentConfig, gen_matrix, gen_signal, verify_theorem31
from .recovery import build_bp_lp, proof_chain, recover, simplex_solve
from .rip import delta_k, rip_report, sym_eigen_extremes, theta_kk, verify_rip_by_sampling
from .vector_core import (
    canonicalize,
    decanonicalize,
    is_k_sparse,
    l1_norm,
    l2_norm,
    linf_norm,
)

__version__ = "0.1.0"
