"""Dense symmetric matrices and the numeric primitives built on them.

Everything here is deliberately small-scale: matrices are stored densely, the
eigensolver is a cyclic Jacobi iteration and positive definiteness is decided by
an unpivoted Cholesky (LDL^T) factorization with an eigenvalue fallback near the
decision boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotPositiveDefiniteError

DEFAULT_TOL = 1e-10
ASYMMETRY_RTOL = 1e-12
JACOBI_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 30


class SymMatrix:
    """Immutable dense symmetric real matrix.

    The upper triangle of ``values`` is authoritative and is mirrored into the
    lower one, so ``a[i, j] == a[j, i]`` holds bit-for-bit. Inputs whose
    asymmetry exceeds ``rtol * max|a_ij|`` are rejected rather than silently
    symmetrized.
    """

    __slots__ = ("_a",)

    def __init__(self, values, *, rtol: float = ASYMMETRY_RTOL):
        a = np.array(values, dtype=np.float64, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InputError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("matrix has non-finite entries")
        amax = float(np.max(np.abs(a)))
        if amax > 0.0 and float(np.max(np.abs(a - a.T))) > rtol * amax:
            raise InputError("matrix is not symmetric")
        iu = np.triu_indices(a.shape[0], 1)
        a.T[iu] = a[iu]
        a.setflags(write=False)
        self._a = a

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, d) -> "SymMatrix":
        return cls(np.diag(np.asarray(d, dtype=np.float64)))

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    def diag(self) -> np.ndarray:
        return np.diagonal(self._a).copy()

    def scale(self) -> float:
        """``max(1, max_i |a_ii|)``, the yardstick for all tolerances."""
        return max(1.0, float(np.max(np.abs(np.diagonal(self._a)))))

    def __getitem__(self, idx):
        return self._a[idx]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a.copy()
        return self._a.astype(dtype)

    def __mul__(self, c: float) -> "SymMatrix":
        return SymMatrix(self._a * float(c))

    __rmul__ = __mul__

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        _check_same_dim(self, other)
        return SymMatrix(self._a + other._a)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        _check_same_dim(self, other)
        return SymMatrix(self._a - other._a)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._a, other._a))

    __hash__ = None

    def tolist(self) -> list[list[float]]:
        return self._a.tolist()

    def __repr__(self):
        return f"SymMatrix({self._a.tolist()!r})"


def _check_same_dim(a: SymMatrix, b: SymMatrix) -> None:
    if a.n != b.n:
        raise InputError(f"dimension mismatch: {a.n} vs {b.n}")


@dataclass(frozen=True)
class PdVerdict:
    """Outcome of :func:`cholesky_pd`.

    ``lambda_min_estimate`` is the smallest Cholesky pivot (an upper bound on
    the smallest eigenvalue) unless ``method == "eigen"``, in which case it is
    the Jacobi estimate of the smallest eigenvalue itself.
    """

    is_pd: bool
    lambda_min_estimate: float
    tolerance_used: float
    scale: float
    method: str = "cholesky"


def _ldl_min_pivot(a: np.ndarray, threshold: float) -> float:
    """Run unpivoted LDL^T and return the first pivot <= threshold, or the min pivot."""
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    dmin = math.inf
    for k in range(n):
        d = a[k, k]
        if d < dmin:
            dmin = d
        if d <= threshold:
            return float(d)
        if k + 1 < n:
            row = a[k, k + 1:]
            a[k + 1:, k + 1:] -= np.outer(row / d, row)
    return float(dmin)


def cholesky_pd(A: SymMatrix, tol: float = DEFAULT_TOL) -> PdVerdict:
    """Decide strict positive definiteness: every pivot must exceed ``tol * scale``.

    Verdicts whose deciding pivot lies within ``10 * tol * scale`` of the
    boundary are re-decided by the eigensolver.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    scale = A.scale()
    boundary = tol * scale
    pivot = _ldl_min_pivot(A.array, boundary)
    if abs(pivot - boundary) <= 10.0 * boundary:
        lam = sym_eigenvalues(A)[0]
        return PdVerdict(lam > boundary, lam, tol, scale, "eigen")
    return PdVerdict(pivot > boundary, pivot, tol, scale, "cholesky")


def is_pd(A: SymMatrix, tol: float = DEFAULT_TOL) -> bool:
    return cholesky_pd(A, tol).is_pd


def is_psd(A: SymMatrix, tol: float = DEFAULT_TOL) -> bool:
    """PSD test: ``lambda_min >= -tol * scale``."""
    return sym_eigenvalues(A)[0] >= -tol * A.scale()


def _jacobi_eigenvalues(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    if n == 1:
        return a[0].copy()
    fro = float(np.linalg.norm(a))
    if fro == 0.0:
        return np.zeros(n)
    target = JACOBI_RTOL * fro
    iu = np.triu_indices(n, 1)
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= target:
            break
        # Early sweeps skip small entries (threshold Jacobi); later ones rotate everything.
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0 or abs(apq) <= thresh:
                    continue
                app, aqq = a[p, p], a[q, q]
                g = 100.0 * abs(apq)
                if sweep > 3 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                h = aqq - app
                if abs(h) + g == abs(h):  # tiny apq: t = apq/h avoids overflowing theta
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p].copy()
                rq = a[q].copy()
                a[p] = c * rp - s * rq
                a[q] = s * rp + c * rq
                a[:, p] = a[p]
                a[:, q] = a[q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diagonal(a).copy())


def sym_eigenvalues(A: SymMatrix) -> list[float]:
    """Eigenvalues in nondecreasing order, by cyclic threshold Jacobi."""
    return _jacobi_eigenvalues(A.array).tolist()


def lambda_min(A: SymMatrix) -> float:
    return sym_eigenvalues(A)[0]


def lambda_max(A: SymMatrix) -> float:
    return sym_eigenvalues(A)[-1]


def hadamard(A: SymMatrix, B: SymMatrix) -> SymMatrix:
    _check_same_dim(A, B)
    return SymMatrix(A.array * B.array)


def hadamard_power(A: SymMatrix, k: int) -> SymMatrix:
    if int(k) != k or k < 1:
        raise InputError("Hadamard power needs an integer k >= 1")
    out = A.array.copy()
    for _ in range(int(k) - 1):
        out = out * A.array
    return SymMatrix(out)


def schur_complement(M: SymMatrix, split: int, tol: float = DEFAULT_TOL) -> SymMatrix:
    """Schur complement of the trailing block ``D = M[split:, split:]``.

    Returns ``A - B D^{-1} B^T`` where ``A = M[:split, :split]`` and
    ``B = M[:split, split:]``.
    """
    n = M.n
    if not 1 <= split < n:
        raise InputError(f"split must lie in [1, {n - 1}]")
    a = M.array
    D = SymMatrix(a[split:, split:])
    if not cholesky_pd(D, tol).is_pd:
        raise NotPositiveDefiniteError("trailing block is not positive definite")
    A = a[:split, :split]
    B = a[:split, split:]
    L = np.linalg.cholesky(D.array)
    W = np.linalg.solve(L, B.T)
    S = A - W.T @ W
    return SymMatrix(0.5 * (S + S.T))


def condition_number(A: SymMatrix, tol: float = DEFAULT_TOL) -> float:
    ev = sym_eigenvalues(A)
    if not ev[0] > tol * A.scale():
        raise NotPositiveDefiniteError("condition number needs a positive definite matrix")
    return ev[-1] / ev[0]
