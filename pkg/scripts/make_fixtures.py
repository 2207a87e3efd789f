"""Regenerate the files under fixtures/ (deterministic)."""

from pathlib import Path

import numpy as np

from pdt.counterexamples import build_cycle_counterexample, seed_a3
from pdt.fileio import write_matrix
from pdt.graphs import random_pg_matrix, random_tree, tight_pg_matrix, write_edge_list
from pdt.linalg import SymMatrix, sym_eigenvalues
from pdt.rng import SplitMix64
from pdt.thresholds import soft_threshold_matrix

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def correlation_fixture(n=5, seed=7, target_cond=5.0):
    """Seeded correlation matrix: random factor, normalized, then shrunk toward I until cond <= target."""
    rng = SplitMix64(seed)
    X = np.array([[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n + 2)])
    S = X.T @ X
    d = np.sqrt(np.diag(S))
    R = S / np.outer(d, d)
    for w in np.linspace(0.0, 1.0, 101):
        C = (1 - w) * R + w * np.eye(n)
        ev = sym_eigenvalues(SymMatrix(C))
        if ev[-1] / ev[0] <= target_cond:
            return SymMatrix(np.round(C, 6))
    raise RuntimeError("unreachable")


def main():
    OUT.mkdir(exist_ok=True)
    a3 = seed_a3()
    write_matrix(a3, OUT / "a3.mtx", comment="3x3 seed")
    tilde = a3.array.copy()
    tilde[0, 2] = tilde[2, 0] = 0.0
    write_matrix(SymMatrix(tilde), OUT / "a3_tilde.mtx", comment="seed with the (1,3) corner zeroed", sparse=False)
    write_matrix(soft_threshold_matrix(a3, 0.1), OUT / "a3_soft01.mtx", comment="seed soft-thresholded at 0.1")
    write_matrix(SymMatrix.identity(3), OUT / "identity3.mtx", comment="identity", sparse=False)

    tree = random_tree(7, 1)
    write_edge_list(tree, OUT / "tree7_seed1.edges")
    write_matrix(random_pg_matrix(tree, 1), OUT / "tree7_seed1_pg.mtx", comment="diagonally dominant member of P_G+")
    write_matrix(tight_pg_matrix(tree, 1), OUT / "tree7_seed1_tight.mtx", comment="member of P_G+ with lambda_min = 1e-3")

    for n in (4, 5):
        rep = build_cycle_counterexample(n, 0.1)
        write_matrix(rep.matrix, OUT / f"cycle{n}_eps01.mtx", comment=f"cycle counterexample n={n} eps=0.1 b={rep.b_used}")

    write_matrix(correlation_fixture(), OUT / "corr5.mtx", comment="seeded correlation matrix, cond <= 5", sparse=False)


if __name__ == "__main__":
    main()
