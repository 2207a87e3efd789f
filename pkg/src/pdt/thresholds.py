"""Entrywise maps and the matrix operators built from them.

An :class:`EntrywiseMap` describes a scalar function ``f``; matrices are
transformed either off the diagonal only (:func:`apply_offdiag`, the regularizer
used in practice) or everywhere (:func:`apply_full`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .graphs import SparsityGraph
from .linalg import SymMatrix

KINDS = ("hard", "soft", "poly", "series")
CONTRACTION_GRID = 4096


def horner(coeffs, x):
    """Evaluate ``sum(c_k x**k)`` with ``coeffs[0]`` the constant term. Works on arrays."""
    acc = np.zeros_like(np.asarray(x, dtype=np.float64)) if np.ndim(x) else 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class EntrywiseMap:
    kind: str
    epsilon: float | None = None
    coeffs: tuple = ()
    radius: float | None = None
    tail: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown map kind {self.kind!r}")
        if self.kind in ("hard", "soft"):
            if self.epsilon is None or not self.epsilon > 0 or not math.isfinite(self.epsilon):
                raise InputError(f"{self.kind} threshold needs epsilon > 0")
        else:
            cs = tuple(float(c) for c in self.coeffs)
            if not all(math.isfinite(c) for c in cs):
                raise InputError("coefficients must be finite")
            object.__setattr__(self, "coeffs", cs)
        if self.kind == "series":
            if self.radius is None or not self.radius > 0:
                raise InputError("series needs radius > 0")
            if not self.tail >= 0:
                raise InputError("series tail bound must be >= 0")

    @classmethod
    def hard(cls, eps: float) -> "EntrywiseMap":
        return cls("hard", epsilon=float(eps))

    @classmethod
    def soft(cls, eps: float) -> "EntrywiseMap":
        return cls("soft", epsilon=float(eps))

    @classmethod
    def poly(cls, coeffs) -> "EntrywiseMap":
        return cls("poly", coeffs=tuple(coeffs))

    @classmethod
    def series(cls, coeffs, radius: float, tail: float = 0.0) -> "EntrywiseMap":
        return cls("series", coeffs=tuple(coeffs), radius=float(radius), tail=float(tail))

    @property
    def is_threshold(self) -> bool:
        return self.kind in ("hard", "soft")

    def __call__(self, x):
        return eval_map(self, x)

    def to_dict(self) -> dict:
        if self.kind in ("hard", "soft"):
            return {"kind": self.kind, "epsilon": self.epsilon}
        if self.kind == "poly":
            return {"kind": "poly", "coeffs": list(self.coeffs)}
        return {"kind": "series", "coeffs": list(self.coeffs), "radius": self.radius, "tail": self.tail}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "EntrywiseMap":
        try:
            kind = d["kind"]
            if kind in ("hard", "soft"):
                return cls(kind, epsilon=float(d["epsilon"]))
            if kind == "poly":
                return cls.poly(d["coeffs"])
            if kind == "series":
                return cls.series(d["coeffs"], d["radius"], d.get("tail", 0.0))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed map spec: {exc}") from None
        raise InputError(f"unknown map kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "EntrywiseMap":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"map spec is not valid JSON: {exc}") from None


def soft_scalar(x, eps: float):
    """``sgn(x) * max(|x| - eps, 0)``; exactly 0 on ``|x| <= eps``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.maximum(np.abs(x) - eps, 0.0)
    return float(out) if out.ndim == 0 else out


def hard_scalar(x, eps: float):
    """Keeps ``x`` iff ``|x| > eps`` (strict)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(np.abs(x) > eps, x, 0.0)
    return float(out) if out.ndim == 0 else out


def eval_map(f: EntrywiseMap, x):
    if f.kind == "soft":
        return soft_scalar(x, f.epsilon)
    if f.kind == "hard":
        return hard_scalar(x, f.epsilon)
    if f.kind == "series":
        xa = np.asarray(x, dtype=np.float64)
        if np.any(np.abs(xa) > f.radius):
            raise DomainError(f"argument outside [-{f.radius}, {f.radius}]")
    out = horner(f.coeffs, np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def _map_offdiag(A: SymMatrix, fn) -> SymMatrix:
    a = A.array
    out = np.asarray(fn(a), dtype=np.float64).copy()
    np.fill_diagonal(out, np.diagonal(a))
    return SymMatrix(out)


def soft_threshold_matrix(A: SymMatrix, eps: float) -> SymMatrix:
    if not eps > 0:
        raise InputError("epsilon must be positive")
    return _map_offdiag(A, lambda a: soft_scalar(a, eps))


def hard_threshold_matrix(A: SymMatrix, eps: float) -> SymMatrix:
    if not eps > 0:
        raise InputError("epsilon must be positive")
    return _map_offdiag(A, lambda a: hard_scalar(a, eps))


def graph_threshold(A: SymMatrix, H: SparsityGraph) -> SymMatrix:
    """Keep the diagonal and the entries on edges of ``H``; zero everything else."""
    if A.n != H.n:
        raise InputError(f"dimension mismatch: matrix {A.n}, graph {H.n}")
    keep = np.eye(A.n, dtype=bool)
    for i, j in H.edges:
        keep[i - 1, j - 1] = keep[j - 1, i - 1] = True
    return SymMatrix(np.where(keep, A.array, 0.0))


def apply_offdiag(A: SymMatrix, f: EntrywiseMap) -> SymMatrix:
    """``f*[A]``: apply ``f`` to every off-diagonal entry, keep the diagonal."""
    if f.kind == "series":
        n = A.n
        off = A.array[~np.eye(n, dtype=bool)]
        if off.size and float(np.max(np.abs(off))) > f.radius:
            raise DomainError(f"off-diagonal entry outside [-{f.radius}, {f.radius}]")
        return _map_offdiag(A, lambda a: horner(f.coeffs, a))
    return _map_offdiag(A, lambda a: eval_map(f, a))


def apply_full(A: SymMatrix, f: EntrywiseMap) -> SymMatrix:
    """``f[A]``: apply ``f`` to every entry, diagonal included."""
    return SymMatrix(np.asarray(eval_map(f, A.array), dtype=np.float64))


@dataclass(frozen=True)
class ContractionEstimate:
    """Sampled estimate of ``sup |f(x)| / |x|`` over ``[-a, a]``."""

    constant: float
    interval: float
    grid: int
    method: str = "sampled"

    def to_dict(self) -> dict:
        return {"constant": self.constant, "interval": self.interval, "grid": self.grid, "method": self.method}


def contraction_constant(f: EntrywiseMap, a: float, grid: int = CONTRACTION_GRID) -> ContractionEstimate:
    """Estimate the smallest ``c`` with ``|f(x)| <= c|x|`` on ``[-a, a]``.

    Thresholds are exact (``c <= 1``; ``c = 1`` as soon as ``a > eps``). For
    polynomials the ratio is sampled on ``grid`` points of each half-interval
    plus the endpoints; a nonzero constant term gives ``inf``.
    """
    if not a > 0:
        raise InputError("interval half-width must be positive")
    if f.is_threshold:
        c = 1.0 if a > f.epsilon else 0.0
        return ContractionEstimate(c, a, 0, "exact")
    cs = f.coeffs
    if cs and cs[0] != 0.0:
        return ContractionEstimate(math.inf, a, 0, "exact")
    q = cs[1:]  # f(x)/x
    if not q:
        return ContractionEstimate(0.0, a, 0, "exact")
    x = np.linspace(a / grid, a, grid)
    x = np.concatenate([-x[::-1], x])
    vals = np.abs(horner(q, x))
    c = max(float(np.max(vals)), abs(q[0]), abs(float(horner(q, a))), abs(float(horner(q, -a))))
    return ContractionEstimate(c, a, grid)


def is_contraction(f: EntrywiseMap, a: float, grid: int = CONTRACTION_GRID) -> bool:
    return contraction_constant(f, a, grid).constant <= 1.0
