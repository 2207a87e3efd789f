"""Cycle-pattern matrices whose soft-thresholding is not positive definite.

Starting from a fixed 3x3 seed, the cycle is grown one vertex at a time by
bordering the matrix (with its wrap-around corner removed) with a new row
``(a_{n+1}, 0, ..., 0, b, b**3)``. The new corner value is chosen so that the
Schur complement of the last diagonal entry in the soft-thresholded matrix
reproduces the soft-thresholded predecessor, which therefore stays non-PD.

Each bordering step squares the dynamic range of the entries, so the
induction runs in exact rational arithmetic; the result is rounded to
binary64 only at the end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact
from .errors import DomainError, InputError, ScheduleExhausted
from .graphs import cycle_graph, default_pattern_tol, is_member_pg
from .linalg import DEFAULT_TOL, SymMatrix, cholesky_pd, lambda_min
from .thresholds import soft_threshold_matrix

EPS0 = Fraction(1, 10)
B_START = 10
MAX_DOUBLINGS = 20

_A3_TEXT = (
    ("9.0817", "1.1024", "1.1024"),
    ("1.1024", "0.23359", "0.10237"),
    ("1.1024", "0.10237", "0.14398"),
)


def seed_a3_exact() -> exact.Rows:
    """The 3x3 seed as exact decimals."""
    return tuple(tuple(Fraction(v) for v in row) for row in _A3_TEXT)


def seed_a3() -> SymMatrix:
    return SymMatrix([[float(v) for v in row] for row in _A3_TEXT])


def soft_scalar(r, eps):
    """``sgn(r) * max(|r| - eps, 0)``. Exact for Fractions, float otherwise."""
    if not eps > 0:
        raise InputError("epsilon must be positive")
    mag = abs(r) - eps
    if mag <= 0:
        return 0 * r
    return mag if r > 0 else -mag


@dataclass(frozen=True)
class Checks:
    in_cone: bool
    tilde_pd: bool
    thresholded_not_pd: bool
    partial_pd: bool

    @property
    def all(self) -> bool:
        return self.in_cone and self.tilde_pd and self.thresholded_not_pd and self.partial_pd

    def to_dict(self) -> dict:
        return {
            "in_cone": self.in_cone,
            "tilde_pd": self.tilde_pd,
            "thresholded_not_pd": self.thresholded_not_pd,
            "partial_pd": self.partial_pd,
        }


def _corner(n: int) -> tuple[int, int]:
    return 0, n - 1


def _with_corner(rows, value):
    n = len(rows)
    i, j = _corner(n)
    out = [list(r) for r in rows]
    out[i][j] = out[j][i] = value
    return tuple(tuple(r) for r in out)


def _soft_rows(rows, eps):
    return tuple(
        tuple(v if i == j else soft_scalar(v, eps) for j, v in enumerate(row)) for i, row in enumerate(rows)
    )


def _exact_checks(rows, eps) -> Checks:
    n = len(rows)
    i, j = _corner(n)
    pattern_ok = all(
        (rows[p][q] != 0) == (q - p == 1 or (p, q) == (i, j)) for p in range(n) for q in range(p + 1, n)
    )
    return Checks(
        in_cone=pattern_ok and exact.is_pd(rows),
        tilde_pd=exact.is_pd(_with_corner(rows, 0 * rows[0][0])),
        thresholded_not_pd=exact.has_negative_eigenvalue(_soft_rows(rows, eps)),
        partial_pd=exact.is_pd(_with_corner(rows, soft_scalar(rows[i][j], eps))),
    )


def _float_checks(M: SymMatrix, eps: float, tol: float) -> tuple[Checks, float]:
    n = M.n
    i, j = _corner(n)
    tilde = M.array.copy()
    tilde[i, j] = tilde[j, i] = 0.0
    partial = M.array.copy()
    partial[i, j] = partial[j, i] = soft_scalar(float(M.array[i, j]), eps)
    graph = cycle_graph(n)
    in_cone = is_member_pg(M, graph, default_pattern_tol(M), tol) and all(
        M.array[p - 1, q - 1] != 0.0 for p, q in graph.edges
    )
    thr = soft_threshold_matrix(M, eps)
    lam = lambda_min(thr)
    checks = Checks(
        in_cone=in_cone,
        tilde_pd=cholesky_pd(SymMatrix(tilde), tol).is_pd,
        thresholded_not_pd=lam < -tol * thr.scale(),
        partial_pd=cholesky_pd(SymMatrix(partial), tol).is_pd,
    )
    return checks, lam


@dataclass(frozen=True)
class InductionState:
    """A verified ``n x n`` cycle matrix at the base level ``eps0``."""

    n: int
    rows: exact.Rows
    eps0: Fraction = EPS0
    checks: Checks | None = None

    @property
    def a_n(self) -> Fraction:
        return self.rows[0][self.n - 1]

    @property
    def matrix(self) -> SymMatrix:
        return exact.to_sym(self.rows)

    @classmethod
    def seed(cls) -> "InductionState":
        rows = seed_a3_exact()
        return cls(3, rows, EPS0, _exact_checks(rows, EPS0))


def extend_candidate(state: InductionState, b) -> exact.Rows:
    """Border ``state`` with a new vertex joined to vertices 1 and n.

    Returns the exact ``(n+1) x (n+1)`` candidate; ``b`` is converted to the
    rational it represents.
    """
    if state.checks is None or not state.checks.all:
        raise InputError("only a fully verified state can be extended")
    b = Fraction(b)
    eps = state.eps0
    if not b > eps:
        raise InputError(f"b must exceed {float(eps)}")
    n = state.n
    alpha = b ** 3
    a_eps = soft_scalar(state.a_n, eps)
    b_eps = b - eps
    q = -alpha * a_eps / b_eps
    s = (q > 0) - (q < 0)
    a_next = q + s * eps

    rows = [list(r) for r in _with_corner(state.rows, Fraction(0))]
    rows[0][0] += soft_scalar(a_next, eps) ** 2 / alpha
    rows[n - 1][n - 1] += b_eps ** 2 / alpha
    for r in rows:
        r.append(Fraction(0))
    rows[0][n] = a_next
    rows[n - 1][n] = b
    last = [Fraction(0)] * (n + 1)
    last[0], last[n - 1], last[n] = a_next, b, alpha
    rows.append(last)
    return tuple(tuple(r) for r in rows)


def _to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def identity_residual(a_prev, a_next, b, eps) -> float:
    """Relative defect of ``-a_{n+1,eps} b_eps / alpha == a_{n,eps}``, evaluated in binary64.

    ``inf`` when the operands do not fit in binary64.
    """
    try:
        a_prev, a_next, b, eps = float(a_prev), float(a_next), float(b), float(eps)
        alpha = b ** 3
    except OverflowError:
        return math.inf
    lhs = -soft_scalar(a_next, eps) * (b - eps) / alpha
    rhs = soft_scalar(a_prev, eps)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def limit_residual(a_prev, a_next, b, eps) -> float:
    """``|a_{n+1} b / alpha + a_{n,eps}|``; tends to 0 as b grows."""
    a_prev, a_next, b, eps = Fraction(a_prev), Fraction(a_next), Fraction(b), Fraction(eps)
    return _to_float(abs(a_next * b / b ** 3 + soft_scalar(a_prev, eps)))


def verify_candidate(M, eps: float = 0.1, tol: float = DEFAULT_TOL) -> "CounterexampleReport":
    """Evaluate the four defining properties of ``M`` at level ``eps``.

    ``M`` may be a :class:`SymMatrix` (binary64 checks, with "not PD" meaning
    ``lambda_min < -tol * scale``) or exact rows (exact inertia). Failed checks
    are reported, never raised.
    """
    if isinstance(M, SymMatrix):
        checks, lam = _float_checks(M, float(eps), tol)
        return CounterexampleReport(M, M.n, float(eps), checks, None, lam)
    rows = exact.to_rows(M)
    eps_q = Fraction(eps)
    checks = _exact_checks(rows, eps_q)
    lam = exact.lambda_min(_soft_rows(rows, eps_q))
    return CounterexampleReport(exact.to_sym(rows), len(rows), float(eps), checks, None, lam)


@dataclass(frozen=True)
class StepRecord:
    n: int  # size after the step
    b_used: float
    identity_residual: float
    trajectory: tuple  # (b, limit residual, all four checks) per tried b

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "b_used": self.b_used,
            "identity_residual": self.identity_residual,
            "trajectory": [{"b": b, "limit_residual": r, "accepted": ok} for b, r, ok in self.trajectory],
        }


@dataclass(frozen=True)
class CounterexampleReport:
    matrix: SymMatrix
    n: int
    epsilon: float
    checks: Checks
    b_used: float | None
    lambda_min_after: float
    exact_checks: Checks | None = None
    steps: tuple = field(default=())

    @property
    def success(self) -> bool:
        return self.checks.in_cone and self.checks.thresholded_not_pd

    def to_dict(self) -> dict:
        d = {
            "matrix": self.matrix.tolist(),
            "n": self.n,
            "epsilon": self.epsilon,
            "b_used": self.b_used,
            "lambda_min_after": self.lambda_min_after,
            **self.checks.to_dict(),
            "success": self.success,
        }
        if self.exact_checks is not None:
            d["exact_checks"] = self.exact_checks.to_dict()
        if self.steps:
            d["steps"] = [s.to_dict() for s in self.steps]
        return d

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _grow(state: InductionState, max_doublings: int) -> tuple[InductionState, StepRecord]:
    trajectory = []
    for k in range(max_doublings + 1):
        b = Fraction(B_START * 2 ** k)
        cand = extend_candidate(state, b)
        checks = _exact_checks(cand, state.eps0)
        a_next = cand[0][state.n]
        trajectory.append((_to_float(b), limit_residual(state.a_n, a_next, b, state.eps0), checks.all))
        if checks.all:
            rec = StepRecord(state.n + 1, _to_float(b), identity_residual(state.a_n, a_next, b, state.eps0), tuple(trajectory))
            return InductionState(state.n + 1, cand, state.eps0, checks), rec
    raise ScheduleExhausted(
        f"no b in {B_START}*2^0..{B_START}*2^{max_doublings} extends the cycle from n={state.n} to n={state.n + 1}",
        {
            "from_n": state.n,
            "max_doublings": max_doublings,
            "tried": [{"b": b, "limit_residual": r, "accepted": ok} for b, r, ok in trajectory],
        },
    )


@lru_cache(maxsize=None)
def _chain(n: int, max_doublings: int) -> tuple[InductionState, tuple]:
    if n == 3:
        return InductionState.seed(), ()
    prev, steps = _chain(n - 1, max_doublings)
    state, rec = _grow(prev, max_doublings)
    return state, steps + (rec,)


def build_cycle_counterexample(
    n: int, eps: float, max_doublings: int = MAX_DOUBLINGS, tol: float = DEFAULT_TOL
) -> CounterexampleReport:
    """Matrix with cycle pattern ``C_n`` whose soft-thresholding at ``eps`` is not PD.

    The induction runs at the base level 0.1 and the result is rescaled by
    ``eps / 0.1``; soft-thresholding commutes with that rescaling. Raises
    :class:`ScheduleExhausted` if some step needs ``b > 10 * 2**max_doublings``
    and :class:`DomainError` if the final matrix does not fit in binary64.
    """
    if int(n) != n or n < 3:
        raise InputError("a cycle counterexample needs n >= 3")
    if not eps > 0:
        raise InputError("epsilon must be positive")
    state, steps = _chain(int(n), int(max_doublings))
    factor = Fraction(repr(float(eps))) / state.eps0  # decimal intent: 0.2 means 1/5
    rows = exact.scaled(state.rows, factor)
    try:
        M = exact.to_sym(rows)
    except OverflowError:
        raise DomainError(f"the n={n} construction has entries beyond the binary64 range") from None
    checks, _ = _float_checks(M, float(eps), tol)
    exact_checks = Checks(**state.checks.to_dict())  # invariant under positive rescaling
    lam = float(factor) * exact.lambda_min(_soft_rows(state.rows, state.eps0))
    b_used = steps[-1].b_used if steps else None
    return CounterexampleReport(M, int(n), float(eps), checks, b_used, lam, exact_checks, steps)


def scaled_counterexample(report: CounterexampleReport, eps: float) -> SymMatrix:
    """Rescale a report's matrix to level ``eps``."""
    return SymMatrix(np.asarray(report.matrix.array) * (eps / report.epsilon))
