"""Exact rational arithmetic on small symmetric matrices.

The cycle construction produces matrices whose entries span hundreds of orders
of magnitude while the quantities that matter stay O(1), so binary64 cannot
decide its positivity checks. Matrices here are tuples of tuples of
:class:`fractions.Fraction`; decisions are exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .linalg import SymMatrix

Rows = tuple  # tuple[tuple[Fraction, ...], ...]


def to_rows(values) -> Rows:
    """Exact copy of a matrix; floats convert to the rational they represent."""
    return tuple(tuple(Fraction(v) for v in row) for row in values)


def to_sym(rows: Rows) -> SymMatrix:
    """Round to binary64. Raises ``OverflowError`` if an entry does not fit."""
    return SymMatrix(np.array([[float(v) for v in row] for row in rows], dtype=np.float64))


def scaled(rows: Rows, c: Fraction) -> Rows:
    return tuple(tuple(c * v for v in row) for row in rows)


def shifted(rows: Rows, t: Fraction) -> Rows:
    """``rows - t I``."""
    return tuple(tuple(v - t if i == j else v for j, v in enumerate(row)) for i, row in enumerate(rows))


def ldl_pivots(rows: Rows, stop_at_nonpositive: bool = True) -> list[Fraction]:
    """Pivots of unpivoted LDL^T.

    With ``stop_at_nonpositive`` the factorization halts at the first pivot
    <= 0 (which is then the last element); otherwise it halts only at a zero
    pivot.
    """
    n = len(rows)
    a = [list(r) for r in rows]
    piv = []
    for k in range(n):
        d = a[k][k]
        piv.append(d)
        if d == 0 or (stop_at_nonpositive and d < 0):
            return piv
        for i in range(k + 1, n):
            lik = a[i][k] / d
            if lik:
                rk = a[k]
                ri = a[i]
                for j in range(k + 1, i + 1):
                    ri[j] -= lik * rk[j]
        for i in range(k + 1, n):
            for j in range(k + 1, i):
                a[j][i] = a[i][j]
    return piv


def is_pd(rows: Rows) -> bool:
    piv = ldl_pivots(rows)
    return len(piv) == len(rows) and all(p > 0 for p in piv)


def count_below(rows: Rows, t: Fraction) -> int | None:
    """Number of eigenvalues strictly below ``t`` (Sylvester inertia).

    Returns ``None`` when a zero pivot makes the count undecidable at this ``t``.
    """
    piv = ldl_pivots(shifted(rows, t), stop_at_nonpositive=False)
    if len(piv) < len(rows) or any(p == 0 for p in piv):
        return None
    return sum(1 for p in piv if p < 0)


def _count(rows, t):
    c = count_below(rows, t)
    k = 1
    while c is None:  # nudge off an exact eigenvalue of a leading block
        t = t + Fraction(1, 10 ** (30 + k))
        c = count_below(rows, t)
        k += 1
    return c, t


def has_negative_eigenvalue(rows: Rows) -> bool:
    """Exact certificate that ``lambda_min < 0``."""
    piv = ldl_pivots(rows)
    if piv[-1] < 0:
        return True
    if len(piv) == len(rows) and piv[-1] > 0:
        return False
    # zero pivot: probe just below zero
    t = Fraction(-1, 10 ** 40)
    floor = -Fraction(1, 2 ** 1100)
    while t < floor:
        c = count_below(rows, t)
        if c is not None and c > 0:
            return True
        t /= 2
    return False


def lambda_min(rows: Rows, rel: float = 1e-13) -> float:
    """Smallest eigenvalue to relative accuracy ``rel`` by exact bisection on inertia.

    The bracket ``[lo, hi]`` always satisfies: no eigenvalue below ``lo`` and
    at least one below ``hi``. It is first narrowed to a factor of two by
    halving/doubling, then bisected.
    """
    n = len(rows)
    top = min(rows[i][i] for i in range(n))  # lambda_min <= min diagonal
    if _count(rows, Fraction(0))[0] == 0:
        if top <= 0 or _count(rows, top)[0] == 0:
            return float(top)
        hi = top
        while _count(rows, hi / 2)[0] > 0:
            hi /= 2
        lo = hi / 2
    else:
        lo = Fraction(-1)
        while _count(rows, lo)[0] > 0:
            lo *= 2
        floor = -Fraction(1, 2 ** 1100)  # below the smallest subnormal: report 0
        while lo < floor and _count(rows, lo / 2)[0] == 0:
            lo /= 2
        if lo >= floor:
            return 0.0
        hi = lo / 2
    tol = Fraction(rel)
    while hi - lo > tol * abs(hi):
        mid = (lo + hi) / 2
        if _count(rows, mid)[0] > 0:
            hi = mid
        else:
            lo = mid
    return float((lo + hi) / 2)
