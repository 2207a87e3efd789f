"""Acceptance criteria 1-8.

Under pytest every criterion is a tagged test and the terminal summary prints
one PASS/FAIL line per criterion. ``python tests/test_acceptance.py`` runs the
same checks without pytest and prints the same lines.
"""

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from pdt import certificates as cert
from pdt.counterexamples import build_cycle_counterexample
from pdt.fileio import read_matrix
from pdt.graphs import (
    SparsityGraph,
    complete_graph,
    cycle_graph,
    induced_edges,
    is_disconnected_complete_union,
    is_member_pg,
    is_union_disconnected_induced,
    random_pg_matrix,
    random_tree,
    tight_pg_matrix,
)
from pdt.linalg import DEFAULT_TOL, SymMatrix, cholesky_pd, sym_eigenvalues
from pdt.rng import SplitMix64
from pdt.thresholds import (
    EntrywiseMap,
    apply_offdiag,
    contraction_constant,
    graph_threshold,
    soft_threshold_matrix,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
TOL = DEFAULT_TOL

TITLES = {
    1: "seed matrix: four properties",
    2: "cycle counterexamples for n=3..10, eps in {0.01, 0.1, 1}",
    3: "contraction maps preserve P_G+ on trees",
    4: "safe graph thresholding",
    5: "eigenvalue bounds and condition-number certificates are sound",
    6: "off-diagonal characterization arithmetic",
    7: "sparsity-inducing maps are not guaranteed",
    8: "Cholesky vs Jacobi agreement and spectral identities",
}

C2_NS = list(range(3, 11))
C2_EPS = [0.01, 0.1, 1.0]


def _tag(record_property, k):
    record_property("criterion", k)
    record_property("title", TITLES[k])


def _eig_min(a):
    return float(np.linalg.eigvalsh(a)[0])


# ---------------------------------------------------------------------------
# criterion 1


def check_criterion_1():
    t0 = time.perf_counter()
    A = read_matrix(FIXTURES / "a3.mtx")
    ev = sym_eigenvalues(A)
    assert ev[0] > 0, f"lambda_min(A3) = {ev[0]}"
    det = math.prod(ev)
    assert abs(det - 2.2e-4) <= 0.2 * 2.2e-4, f"det(A3) = {det}"
    tilde = A.array.copy()
    tilde[0, 2] = tilde[2, 0] = 0.0
    assert cholesky_pd(SymMatrix(tilde), TOL).is_pd, "A3 with corner zeroed is not PD"
    lam_soft = sym_eigenvalues(soft_threshold_matrix(A, 0.1))[0]
    assert lam_soft < -1e-6, f"lambda_min(eta_0.1(A3)) = {lam_soft}"
    partial = A.array.copy()
    partial[0, 2] = partial[2, 0] = A.array[0, 2] - 0.1
    assert cholesky_pd(SymMatrix(partial), TOL).is_pd, "corner-only soft threshold is not PD"
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"runtime {elapsed:.3f}s"
    return f"det={det:.4e}, lambda_min(eta)={lam_soft:.4f}, {elapsed * 1e3:.1f} ms"


def test_criterion_1(record_property):
    _tag(record_property, 1)
    check_criterion_1()


# ---------------------------------------------------------------------------
# criterion 2


def check_criterion_2_case(n, eps):
    rep = build_cycle_counterexample(n, eps)
    M = rep.matrix
    scale = M.scale()
    assert is_member_pg(M, cycle_graph(n), 1e-12 * scale, TOL), f"n={n} eps={eps}: output not in P_Cn+"
    assert all(M.array[i - 1, j - 1] != 0 for i, j in cycle_graph(n).edges)
    lam = sym_eigenvalues(soft_threshold_matrix(M, eps))[0]
    assert lam < -TOL * scale, f"n={n} eps={eps}: lambda_min(eta) = {lam:.3e} vs -tol*scale = {-TOL * scale:.3e}"
    for step in rep.steps:
        assert step.identity_residual <= 1e-9, f"identity residual {step.identity_residual} at n={step.n}"
    return rep


_c2_elapsed = []


@pytest.mark.parametrize("eps", C2_EPS)
@pytest.mark.parametrize("n", C2_NS)
def test_criterion_2(record_property, n, eps):
    _tag(record_property, 2)
    t0 = time.perf_counter()
    try:
        check_criterion_2_case(n, eps)
    finally:
        _c2_elapsed.append(time.perf_counter() - t0)


def test_criterion_2_runtime(record_property):
    _tag(record_property, 2)
    assert sum(_c2_elapsed) < 30.0, f"total {sum(_c2_elapsed):.1f}s"


# ---------------------------------------------------------------------------
# criterion 3


def _admissible_poly(rng: SplitMix64, a: float) -> EntrywiseMap:
    deg = 1 + rng.randbelow(5)
    coeffs = [0.0] + [rng.uniform(-1, 1) for _ in range(deg)]
    c = contraction_constant(EntrywiseMap.poly(coeffs), a).constant
    coeffs = [x / (c * 1.001) for x in coeffs] if c > 0 else coeffs
    return EntrywiseMap.poly(coeffs)


def check_criterion_3():
    t0 = time.perf_counter()
    rng = SplitMix64(2024)
    failures = []
    trials = 0
    for t in range(100):
        n = 3 + rng.randbelow(10)
        G = random_tree(n, 1000 + t)
        for s in range(10):
            seed = 10_000 * t + s
            A = random_pg_matrix(G, seed) if s < 5 else tight_pg_matrix(G, seed)
            off = np.abs(A.array[~np.eye(n, dtype=bool)])
            a = float(off.max())
            eps = rng.uniform(0.05, 1.0) * a
            maps = [EntrywiseMap.soft(eps), EntrywiseMap.hard(eps), _admissible_poly(rng, a)]
            for f in maps:
                trials += 1
                if not cholesky_pd(apply_offdiag(A, f), TOL).is_pd:
                    failures.append((t, s, f.to_dict()))
    elapsed = time.perf_counter() - t0
    assert not failures, f"{len(failures)} PD failures, first: {failures[:3]}"
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s"
    return f"{trials} trials, 0 failures, {elapsed:.1f}s"


def test_criterion_3(record_property):
    _tag(record_property, 3)
    check_criterion_3()


# ---------------------------------------------------------------------------
# criterion 4


def _random_graph(rng: SplitMix64, n: int, p: float) -> SparsityGraph:
    return SparsityGraph(n, frozenset((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < p))


def _random_partition(rng: SplitMix64, n: int, k: int):
    labels = [rng.randbelow(k) for _ in range(n)]
    return [[v + 1 for v in range(n) if labels[v] == b] for b in range(k)]


def _dense_tight_pd(rng: SplitMix64, n: int) -> SymMatrix:
    a = np.array([[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n)])
    a = (a + a.T) / 2
    lam = float(np.linalg.eigvalsh(a)[0])
    return SymMatrix(a + (1e-3 - lam) * np.eye(n))


def check_criterion_4():
    rng = SplitMix64(77)
    failures = []
    for t in range(100):
        n = 3 + rng.randbelow(8)
        G = _random_graph(rng, n, 0.5)
        blocks = _random_partition(rng, n, 1 + rng.randbelow(3))
        H = SparsityGraph(n, frozenset().union(*(induced_edges(G, b) for b in blocks)))
        assert is_union_disconnected_induced(H, G), f"pair {t}: generator broke the predicate"
        for s in range(5):
            A = random_pg_matrix(G, 100 * t + s) if s < 2 else tight_pg_matrix(G, 100 * t + s)
            if not cholesky_pd(graph_threshold(A, H), TOL).is_pd:
                failures.append(("induced", t, s))
    for t in range(100):
        n = 2 + rng.randbelow(9)
        blocks = [b for b in _random_partition(rng, n, 1 + rng.randbelow(4)) if b]
        G = SparsityGraph(n, frozenset((i, j) for b in blocks for i in b for j in b if i < j))
        assert is_disconnected_complete_union(G)
        assert is_union_disconnected_induced(G, complete_graph(n))
        A = _dense_tight_pd(rng, n)
        if not cholesky_pd(graph_threshold(A, G), TOL).is_pd:
            failures.append(("complete-union", t))
    assert not failures, f"{len(failures)} failures: {failures[:5]}"
    return "200 graph pairs, 0 failures"


def test_criterion_4(record_property):
    _tag(record_property, 4)
    check_criterion_4()


# ---------------------------------------------------------------------------
# criterion 5


def _geometric_map(beta: float):
    """f(x) = x - beta * sum_{k>=1} x^(2k+1) / 4^k = x - beta x^3 / (4 - x^2): |f(x)| <= |x| on [-1, 1] for beta <= 3."""
    K = 40
    coeffs = [0.0] * (2 * K + 2)
    coeffs[1] = 1.0
    for k in range(1, K + 1):
        coeffs[2 * k + 1] = -beta / 4 ** k
    remainder = beta * 4.0 ** (-K) / 3.0  # sum_{k>K} beta/4^k at r = 1
    exact = lambda x: x - beta * x ** 3 / (4.0 - x ** 2)
    return coeffs, remainder, exact


def check_criterion_5():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = math.inf
    for t in range(1000):
        n = int(rng.integers(2, 9))
        deg = int(rng.integers(1, 7))
        A = SymMatrix(_random_pd_np(rng, n))
        coeffs = [0.0] + list(rng.uniform(-1, 1, size=deg))
        if t % 10 == 0:
            coeffs = [0.0, 1.0]
        p = cert.Polynomial(coeffs)
        b1, b2 = cert.lambda_min_bound(p, A)
        lam = _eig_min(apply_offdiag(A, EntrywiseMap.poly(coeffs)).array)
        slack = lam - max(b1, b2) + 1e-8 * A.scale()
        worst = min(worst, slack)
        assert slack >= 0, f"pair {t}: lambda_min {lam} < bound {max(b1, b2)}"
        if coeffs == [0.0, 1.0]:
            assert abs(b1 - _eig_min(A.array)) <= 1e-10 * A.scale(), f"pair {t}: bound1 {b1} != lambda_min"

    unsound, guaranteed = [], 0
    for t in range(1000):
        n = int(rng.integers(2, 9))
        A = SymMatrix(_random_corr_np(rng, n, cond_max=float(rng.uniform(1.5, 30))))
        if t % 2 == 0:
            beta = float(rng.uniform(0.05, 3.0))
            coeffs, remainder, exact = _geometric_map(beta)
            f = cert.truncate_series(coeffs, 1.0, 1e-6, remainder)
            c = cert.cond_number_certificate(f, A, 1.0, TOL)
            off = ~np.eye(n, dtype=bool)
            out = A.array.copy()
            out[off] = exact(A.array[off])
            applied = SymMatrix(out)
        else:
            gamma = float(rng.uniform(0.01, 0.5))
            f = EntrywiseMap.poly([0.0, 1.0, 0.0, -gamma])
            c = cert.cond_number_certificate(f, A, 1.0, TOL)
            applied = apply_offdiag(A, f)
        if c.guaranteed:
            guaranteed += 1
            if not cholesky_pd(applied, TOL).is_pd:
                unsound.append(t)
    elapsed = time.perf_counter() - t0
    assert not unsound, f"unsound cond-number certificates: {unsound[:5]}"
    assert guaranteed >= 100, f"only {guaranteed} guaranteed verdicts; suite is vacuous"
    assert elapsed < 120.0, f"runtime {elapsed:.1f}s"
    return f"min slack {worst:.2e}, {guaranteed} guaranteed cond certificates, {elapsed:.1f}s"


def _random_pd_np(rng, n):
    X = rng.normal(size=(n, n + 2))
    return X @ X.T / (n + 2)


def _random_corr_np(rng, n, cond_max):
    S = _random_pd_np(rng, n)
    ev = np.linalg.eigvalsh(S)
    if ev[-1] / ev[0] > cond_max:
        S = S + (ev[-1] - cond_max * ev[0]) / (cond_max - 1) * np.eye(n)
    d = np.sqrt(np.diag(S))
    C = S / np.outer(d, d)
    np.fill_diagonal(C, 1.0)
    return np.clip((C + C.T) / 2, -1.0, 1.0)


def test_criterion_5(record_property):
    _tag(record_property, 5)
    check_criterion_5()


# ---------------------------------------------------------------------------
# criterion 6


def _criterion_oracle(coeffs, alpha) -> bool:
    q = [Fraction(c) for c in coeffs]
    while q and q[-1] == 0:
        q.pop()
    if q and q[0] != 0:
        return False
    if any(c < 0 for c in q):
        return False
    if alpha == math.inf:
        return len(q) <= 2 and (len(q) < 2 or q[1] <= 1)
    a = Fraction(alpha)
    return sum(c * a ** (k - 1) for k, c in enumerate(q) if k >= 1) <= 1


def _empirical_psd(coeffs, alpha, rng, count=500):
    """f*[A] for ``count`` random PSD matrices with entries in (-alpha, alpha); returns the worst scaled lambda_min."""
    n = int(rng.integers(2, 7))
    X = rng.normal(size=(count, n, int(rng.integers(1, n + 2))))
    A = X @ np.transpose(X, (0, 2, 1))
    bound = 10.0 if alpha == math.inf else alpha
    A *= (0.999 * bound / np.max(np.abs(A), axis=(1, 2)))[:, None, None]
    F = np.zeros_like(A)
    for c in reversed(coeffs):
        F = F * A + c
    idx = np.arange(n)
    F[:, idx, idx] = A[:, idx, idx]
    lam = np.linalg.eigvalsh(F)[:, 0]
    scale = np.maximum(1.0, np.max(np.abs(A[:, idx, idx]), axis=1))
    return float(np.min(lam / scale))


def _sweep_case(rng):
    alpha = [0.5, 1.0, 2.0, math.inf][int(rng.integers(0, 4))]
    kind = int(rng.integers(0, 6))
    if alpha == math.inf and kind < 3:
        a = float(rng.choice([0.0, 0.25, 0.5, 1.0, 1.5, float(rng.uniform(0, 1.2))]))
        coeffs = [0.0, a] + ([0.0] if kind == 1 else [])
        if kind == 2:
            coeffs = [0.0, a, float(rng.uniform(0, 0.1))]
        return coeffs, alpha
    deg = int(rng.integers(1, 6))
    coeffs = [0.0] + list(rng.uniform(0, 1, size=deg))
    if alpha != math.inf:
        total = sum(c * alpha ** (k - 1) for k, c in enumerate(coeffs) if k >= 1)
        coeffs = [c / total * float(rng.uniform(0.5, 1.5)) for c in coeffs]
    if kind == 3:
        coeffs[int(rng.integers(1, len(coeffs)))] *= -1
    elif kind == 4:
        coeffs[0] = float(rng.uniform(-0.1, 0.1))
    return coeffs, alpha


def check_criterion_6():
    rng = np.random.default_rng(6)
    mismatches, guaranteed, violations = [], 0, []
    fixed = [([0.0, 1.0], math.inf, True), ([0.0, 0.5], math.inf, True), ([0.0, 1.5], math.inf, False),
             ([0.0, 0.0, 1.0], math.inf, False), ([0.0, 0.5, 0.5], 1.0, True)]
    for coeffs, alpha, want in fixed:
        got = cert.characterize_offdiag_map(cert.Polynomial(coeffs), alpha).guaranteed
        assert got == want, f"{coeffs} at alpha={alpha}: {got}"
    for t in range(10_000):
        coeffs, alpha = _sweep_case(rng)
        got = cert.characterize_offdiag_map(cert.Polynomial(coeffs), alpha).guaranteed
        if got != _criterion_oracle(coeffs, alpha):
            mismatches.append((coeffs, alpha))
        if got:
            guaranteed += 1
            worst = _empirical_psd(coeffs, alpha, rng)
            if worst < -1e-9:
                violations.append((coeffs, alpha, worst))
    assert not mismatches, f"{len(mismatches)} mismatches: {mismatches[:3]}"
    assert not violations, f"{len(violations)} empirical violations: {violations[:3]}"
    assert guaranteed >= 500
    return f"10000 cases, {guaranteed} guaranteed and cross-checked"


def test_criterion_6(record_property):
    _tag(record_property, 6)
    check_criterion_6()


# ---------------------------------------------------------------------------
# criterion 7


def check_criterion_7():
    rng = np.random.default_rng(7)
    for _ in range(200):
        alpha = float(rng.uniform(0.1, 10))
        eps = float(rng.uniform(0.001, 0.999)) * alpha
        c = cert.sparsity_impossibility(EntrywiseMap.soft(eps), alpha)
        assert c.verdict == cert.IMPOSSIBLE, (eps, alpha, c)
        gamma = float(rng.uniform(0.001, 0.999)) * alpha
        c = cert.sparsity_impossibility(cert.Polynomial([0.0, -gamma, 1.0]), alpha)
        assert c.verdict == cert.IMPOSSIBLE, (gamma, alpha, c)
    for eps in (0.01, 0.1, 1.0):
        rep = build_cycle_counterexample(3, eps)
        M = rep.matrix
        assert is_member_pg(M, cycle_graph(3), 0.0, TOL)
        lam = _eig_min(soft_threshold_matrix(M, eps).array)
        assert lam < -TOL * M.scale(), f"eps={eps}: lambda_min {lam}"
    return "400 impossibility verdicts, explicit failing matrices for eps in {0.01, 0.1, 1}"


def test_criterion_7(record_property):
    _tag(record_property, 7)
    check_criterion_7()


# ---------------------------------------------------------------------------
# criterion 8


def check_criterion_8():
    rng = np.random.default_rng(8)
    disagreements, checked = [], 0
    for t in range(10_000):
        n = int(rng.integers(1, 9))
        X = rng.uniform(-1, 1, size=(n, n))
        a = (X + X.T) / 2
        if t % 2:
            # push toward the PD boundary so both verdicts occur
            a = a + (float(rng.uniform(-0.05, 0.05)) - float(np.linalg.eigvalsh(a)[0])) * np.eye(n)
        A = SymMatrix(a)
        ev = sym_eigenvalues(A)
        scale = A.scale()
        tr = float(np.trace(a))
        assert abs(sum(ev) - tr) <= 1e-10 * (1 + abs(tr)), f"case {t}: trace"
        det = float(np.linalg.det(a))
        prod = math.prod(ev)
        assert abs(prod - det) <= 1e-8 * abs(det) + 1e-300, f"case {t}: det {det} vs {prod}"
        if abs(ev[0]) > 10 * TOL * scale:
            checked += 1
            if cholesky_pd(A, TOL).is_pd != (ev[0] > 0):
                disagreements.append(t)
    assert not disagreements, f"{len(disagreements)} disagreements: {disagreements[:5]}"
    return f"{checked} decisive cases agree"


def test_criterion_8(record_property):
    _tag(record_property, 8)
    check_criterion_8()


# ---------------------------------------------------------------------------


def main() -> int:
    checks = {
        1: check_criterion_1,
        3: check_criterion_3,
        4: check_criterion_4,
        5: check_criterion_5,
        6: check_criterion_6,
        7: check_criterion_7,
        8: check_criterion_8,
    }
    failed = 0
    for k in range(1, 9):
        if k == 2:
            bad = []
            t0 = time.perf_counter()
            for n in C2_NS:
                for eps in C2_EPS:
                    try:
                        check_criterion_2_case(n, eps)
                    except Exception as exc:  # report, keep going
                        bad.append(f"n={n} eps={eps}: {type(exc).__name__}")
            elapsed = time.perf_counter() - t0
            ok = not bad and elapsed < 30
            detail = f"{len(bad)} of {len(C2_NS) * len(C2_EPS)} cases failed, {elapsed:.1f}s" + (f"; first: {bad[0]}" if bad else "")
        else:
            try:
                detail, ok = checks[k](), True
            except Exception as exc:
                detail, ok = f"{type(exc).__name__}: {exc}", False
        failed += not ok
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {TITLES[k]} ({detail})")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
