"""Entrywise thresholding of positive definite matrices with graph sparsity."""

from .certificates import (
    Certificate,
    Polynomial,
    characterize_full_map,
    characterize_offdiag_map,
    cond_number_certificate,
    correlation_class_certificate,
    degree_contraction_certificate,
    is_absolutely_monotonic,
    lambda_min_bound,
    rho_certificate,
    sparsity_impossibility,
    split_parts,
    truncate_series,
)
from .counterexamples import (
    CounterexampleReport,
    InductionState,
    build_cycle_counterexample,
    extend_candidate,
    seed_a3,
    verify_candidate,
)
from .errors import DomainError, InputError, NotPositiveDefiniteError, PdtError, ScheduleExhausted
from .graphs import (
    SparsityGraph,
    complete_graph,
    cycle_graph,
    is_disconnected_complete_union,
    is_member_pg,
    is_tree,
    is_union_disconnected_induced,
    path_graph,
    pattern_of,
    random_pg_matrix,
    random_tree,
    star_graph,
)
from .linalg import (
    PdVerdict,
    SymMatrix,
    cholesky_pd,
    hadamard,
    hadamard_power,
    lambda_max,
    lambda_min,
    schur_complement,
    sym_eigenvalues,
)
from .thresholds import (
    EntrywiseMap,
    apply_full,
    apply_offdiag,
    contraction_constant,
    graph_threshold,
    hard_threshold_matrix,
    soft_threshold_matrix,
)

__version__ = "0.1.0"
