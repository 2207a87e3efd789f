"""Certificates that an entrywise map keeps a matrix (or a class of matrices) PD.

Two families live here:

* exact characterizations over all dimensions, decided by rational arithmetic
  on coefficients (absolute monotonicity, the ``f(x) = x g(x)`` criterion and
  the "zeros other than the origin" impossibility test);
* per-matrix eigenvalue lower bounds for ``p*[A]`` built from the split
  ``p = p_plus - p_minus`` and Schur-product eigenvalue estimates.

A ``guaranteed`` verdict from a bound-based rule always carries a bound that
clears ``tol * scale``, so it survives a floating-point PD check.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, InputError
from .graphs import SparsityGraph, max_degree
from .linalg import DEFAULT_TOL, SymMatrix, sym_eigenvalues
from .thresholds import EntrywiseMap, contraction_constant, horner

GUARANTEED = "guaranteed"
NOT_GUARANTEED = "not-guaranteed"
IMPOSSIBLE = "impossible"

RULES = (
    "abs-monotone-full",
    "xg-characterization",
    "degree-contraction",
    "spectral-bound-1",
    "spectral-bound-2",
    "rho-bound",
    "correlation-class",
    "cond-number",
    "sparsity-impossible",
)


@dataclass(frozen=True)
class Polynomial:
    """``sum(coeffs[k] * x**k)``; trailing zeros are dropped."""

    coeffs: tuple = ()

    def __post_init__(self):
        cs = [float(c) for c in self.coeffs]
        if not all(math.isfinite(c) for c in cs):
            raise InputError("coefficients must be finite")
        while cs and cs[-1] == 0.0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> float:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

    def __call__(self, x):
        return horner(self.coeffs, x) if self.coeffs else 0.0 * np.asarray(x, dtype=np.float64)

    def exact(self) -> list[Fraction]:
        return [Fraction(c) for c in self.coeffs]


def split_parts(p: Polynomial) -> tuple[Polynomial, Polynomial]:
    """``(p_plus, p_minus)`` with nonnegative coefficients and ``p == p_plus - p_minus``."""
    plus = tuple(c if c > 0 else 0.0 for c in p.coeffs)
    minus = tuple(-c if c < 0 else 0.0 for c in p.coeffs)
    return Polynomial(plus), Polynomial(minus)


def is_absolutely_monotonic(p: Polynomial) -> bool:
    return all(c >= 0.0 for c in p.coeffs)


@dataclass(frozen=True)
class Certificate:
    rule: str
    verdict: str
    bound: float | None = None
    threshold: float | None = None
    details: dict = field(default_factory=dict)
    inputs_digest: str = ""

    def __post_init__(self):
        if self.rule not in RULES:
            raise InputError(f"unknown rule {self.rule!r}")
        if self.verdict not in (GUARANTEED, NOT_GUARANTEED, IMPOSSIBLE):
            raise InputError(f"unknown verdict {self.verdict!r}")

    @property
    def guaranteed(self) -> bool:
        return self.verdict == GUARANTEED

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "verdict": self.verdict,
            "bound": _jsonable(self.bound),
            "threshold": _jsonable(self.threshold),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
            "inputs_digest": self.inputs_digest,
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _jsonable(v):
    """JSON has no infinities; they travel as the strings ``"inf"``/``"-inf"``."""
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def digest(**inputs) -> str:
    """Short stable hash of the certificate inputs."""
    text = json.dumps({k: _jsonable(v) for k, v in inputs.items()}, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _map_digest(f) -> dict:
    return f.to_dict() if isinstance(f, EntrywiseMap) else {"kind": "poly", "coeffs": list(f.coeffs)}


def _as_poly(f) -> tuple[Polynomial, float, float | None]:
    """``(polynomial part, tail bound, radius)`` of a polynomial-like map."""
    if isinstance(f, Polynomial):
        return f, 0.0, None
    if isinstance(f, EntrywiseMap):
        if f.kind == "poly":
            return Polynomial(f.coeffs), 0.0, None
        if f.kind == "series":
            return Polynomial(f.coeffs), f.tail, f.radius
        raise InputError(f"a {f.kind} threshold is not a polynomial")
    return Polynomial(tuple(f)), 0.0, None


def _check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise InputError("alpha must be positive")
    return alpha


# ---------------------------------------------------------------------------
# exact characterizations


def _strip_zero_roots(cs: list[Fraction]) -> list[Fraction]:
    k = 0
    while k < len(cs) and cs[k] == 0:
        k += 1
    return cs[k:]


def _trim(cs):
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _poly_rem(a, b):
    a = _trim(a)
    b = _trim(b)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a = _trim(a)
    return a


def _poly_div(a, b):
    a = _trim(a)
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a = _trim(a)
    return _trim(q)


def _derivative(cs):
    return [k * c for k, c in enumerate(cs)][1:]


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_rem(a, b)
    return a


def _eval(cs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_roots_in(coeffs, lo: Fraction, hi: Fraction | None) -> int:
    """Number of distinct real roots in the open interval ``(lo, hi)`` (``hi=None`` is +inf).

    Exact Sturm-sequence count on the square-free part of the polynomial.
    """
    cs = _trim([Fraction(c) for c in coeffs])
    if len(cs) <= 1:
        return 0
    g = _gcd(cs, _derivative(cs))
    sq = _poly_div(cs, g) if len(g) > 1 else cs
    seq = [sq, _derivative(sq)]
    while True:
        r = _poly_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])

    def v_at(x):
        if x is None:
            return _sign_changes([p[-1] for p in seq])
        return _sign_changes([_eval(p, x) for p in seq])

    # Sturm counts roots in (lo, hi]; drop a root sitting exactly at hi.
    n = v_at(lo) - v_at(hi)
    if hi is not None and _eval(sq, hi) == 0:
        n -= 1
    return n


def sparsity_impossibility(f, alpha) -> Certificate:
    """``impossible`` iff ``f`` vanishes at 0 and somewhere in ``(0, alpha)`` without vanishing identically."""
    alpha = _check_alpha(alpha)
    dig = digest(map=_map_digest(f), alpha=alpha)
    if isinstance(f, EntrywiseMap) and f.is_threshold:
        eps = f.epsilon
        if alpha <= eps:
            return Certificate(
                "sparsity-impossible", NOT_GUARANTEED, None, eps,
                {"reason": "map vanishes on the whole domain"}, dig,
            )
        gamma = eps / 2.0 if alpha > eps else alpha / 2.0
        return Certificate(
            "sparsity-impossible", IMPOSSIBLE, None, eps,
            {"reason": "map is zero on (0, epsilon]", "zero_at": gamma}, dig,
        )
    p, _, _ = _as_poly(f)
    if p.is_zero:
        return Certificate("sparsity-impossible", NOT_GUARANTEED, None, None, {"reason": "zero map excluded"}, dig)
    cs = p.exact()
    if cs[0] != 0:
        return Certificate("sparsity-impossible", NOT_GUARANTEED, None, None, {"reason": "f(0) != 0"}, dig)
    hi = None if math.isinf(alpha) else Fraction(alpha)
    roots = count_roots_in(_strip_zero_roots(cs), Fraction(0), hi)
    verdict = IMPOSSIBLE if roots > 0 else NOT_GUARANTEED
    return Certificate("sparsity-impossible", verdict, None, None, {"roots_in_interval": roots}, dig)


def characterize_full_map(f, alpha) -> Certificate:
    """``f[A]`` stays PSD for all PSD ``A`` with entries in ``(-alpha, alpha)`` iff ``f`` has nonnegative coefficients."""
    alpha = _check_alpha(alpha)
    if isinstance(f, EntrywiseMap) and f.is_threshold:
        cert = sparsity_impossibility(f, alpha)
        if cert.verdict == IMPOSSIBLE:
            return cert
        # f vanishes on the whole domain, so f[A] = 0
        return Certificate("abs-monotone-full", GUARANTEED, None, None, {"reason": "map is identically zero"}, cert.inputs_digest)
    p, _, _ = _as_poly(f)
    ok = is_absolutely_monotonic(p)
    negative = [k for k, c in enumerate(p.coeffs) if c < 0]
    return Certificate(
        "abs-monotone-full", GUARANTEED if ok else NOT_GUARANTEED, None, None,
        {"negative_coefficients": negative}, digest(map=_map_digest(f), alpha=alpha, rule="full"),
    )


def characterize_offdiag_map(f, alpha) -> Certificate:
    """``f*[A]`` stays PSD for every PSD ``A`` of every size with entries in ``(-alpha, alpha)``.

    For ``f(x) = x g(x)`` with ``g`` given by nonnegative coefficients the
    supremum of ``|g|`` on the disc of radius ``alpha`` is ``sum a_k alpha**(k-1)``,
    so the test is exact arithmetic on coefficients. With ``alpha = inf`` only
    ``f(x) = a x`` with ``0 <= a <= 1`` qualifies.
    """
    alpha = _check_alpha(alpha)
    dig = digest(map=_map_digest(f), alpha=alpha, rule="offdiag")
    if isinstance(f, EntrywiseMap) and f.is_threshold:
        cert = sparsity_impossibility(f, alpha)
        if cert.verdict == IMPOSSIBLE:
            return cert
        return Certificate("xg-characterization", GUARANTEED, None, None, {"reason": "map is identically zero"}, dig)
    p, tail, _ = _as_poly(f)
    cs = p.exact()
    details: dict = {}
    if cs and cs[0] != 0:
        details["reason"] = "f(0) != 0"
        ok = False
    elif any(c < 0 for c in cs):
        details["reason"] = "negative coefficient"
        ok = False
    elif math.isinf(alpha):
        ok = len(cs) <= 2 and (len(cs) < 2 or cs[1] <= 1)
        if not ok:
            details["reason"] = "only a*x with 0 <= a <= 1 is admissible on the whole line"
    else:
        a = Fraction(alpha)
        total = sum((c * a ** (k - 1) for k, c in enumerate(cs) if k >= 1), Fraction(0))
        details["sup_g"] = float(total)
        ok = total <= 1
        if not ok:
            details["reason"] = "sup of g on the disc exceeds 1"
    if tail:
        details["tail"] = tail
        ok = False
        details["reason"] = "truncated series: the characterization needs exact coefficients"
    return Certificate("xg-characterization", GUARANTEED if ok else NOT_GUARANTEED, None, None, details, dig)


def degree_contraction_certificate(c: float, G: SparsityGraph) -> Certificate:
    """``|f(x)| <= c|x|`` with ``c < 1/max_degree(G)`` keeps every matrix of ``P_G^+`` PD."""
    c = float(c)
    if not c >= 0:
        raise InputError("contraction constant must be nonnegative")
    delta = max_degree(G)
    dig = digest(c=c, n=G.n, edges=[list(e) for e in G.sorted_edges()])
    if delta == 0:
        return Certificate("degree-contraction", GUARANTEED, math.inf, math.inf, {"max_degree": 0}, dig)
    thr = 1.0 / delta
    ok = c < thr
    return Certificate(
        "degree-contraction", GUARANTEED if ok else NOT_GUARANTEED, thr - c, thr,
        {"max_degree": delta, "c": c}, dig,
    )


# ---------------------------------------------------------------------------
# eigenvalue bounds


def _diag_term(p: Polynomial, d: np.ndarray) -> float:
    return float(np.min(d - p(d)))


def _require_p0_zero(p: Polynomial):
    if p.coeff(0) != 0.0:
        raise DomainError("the bound needs p(0) = 0")


def lambda_min_bound(p, A: SymMatrix) -> tuple[float, float]:
    """Two lower bounds on ``lambda_min(p*[A])``, valid for PSD ``A``.

    The second needs a positive diagonal and is ``-inf`` otherwise.
    """
    p, _, _ = _as_poly(p)
    _require_p0_zero(p)
    ev = sym_eigenvalues(A)
    return _bounds_from(p, A, ev[0], ev[-1])


def _bounds_from(p: Polynomial, A: SymMatrix, lmin: float, lmax: float) -> tuple[float, float]:
    plus, minus = split_parts(p)
    d = A.diag()
    dterm = _diag_term(p, d)
    b1 = float(plus(lmin) - minus(lmax)) + dterm
    dmin, dmax = float(np.min(d)), float(np.max(d))
    if dmin > 0:
        b2 = lmin * float(plus(dmin)) / dmin - lmax * float(minus(dmax)) / dmax + dterm
    else:
        b2 = -math.inf
    return b1, b2


def _verdict(ok: bool, bound: float, A: SymMatrix, tol: float) -> str:
    return GUARANTEED if ok and bound > tol * A.scale() else NOT_GUARANTEED


def _check_domain(A: SymMatrix, radius):
    if radius is None:
        return
    off = A.array[~np.eye(A.n, dtype=bool)]
    if off.size and float(np.max(np.abs(off))) > radius:
        raise DomainError(f"off-diagonal entry outside the series radius {radius}")


def spectral_bound_certificates(f, A: SymMatrix, tol: float = DEFAULT_TOL) -> list[Certificate]:
    p, tail, radius = _as_poly(f)
    _require_p0_zero(p)
    _check_domain(A, radius)
    ev = sym_eigenvalues(A)
    psd = ev[0] >= 0.0
    b1, b2 = _bounds_from(p, A, ev[0], ev[-1])
    slack = A.n * tail
    dig = digest(map=_map_digest(f), matrix=A.tolist(), tol=tol)
    out = []
    for rule, b in (("spectral-bound-1", b1), ("spectral-bound-2", b2)):
        b = b - slack
        details = {"lambda_min": ev[0], "lambda_max": ev[-1], "psd": psd}
        if slack:
            details["tail_slack"] = slack
        out.append(Certificate(rule, _verdict(psd, b, A, tol), b, None, details, dig))
    return out


def rho_certificate(f, A: SymMatrix, tol: float = DEFAULT_TOL) -> Certificate:
    """``min(a_ii - p(a_ii)) >= p_minus(rho(A))`` for PSD ``A``."""
    p, tail, radius = _as_poly(f)
    _require_p0_zero(p)
    _check_domain(A, radius)
    ev = sym_eigenvalues(A)
    rho = max(abs(ev[0]), abs(ev[-1]))
    _, minus = split_parts(p)
    lhs = _diag_term(p, A.diag())
    rhs = float(minus(rho))
    b1, _ = _bounds_from(p, A, ev[0], ev[-1])
    b1 -= A.n * tail
    psd = ev[0] >= 0.0
    ok = psd and lhs >= rhs
    return Certificate(
        "rho-bound", _verdict(ok, b1, A, tol), b1, rhs,
        {"rho": rho, "min_diag_gap": lhs, "p_minus_rho": rhs, "psd": psd},
        digest(map=_map_digest(f), matrix=A.tolist(), tol=tol, rule="rho"),
    )


def correlation_class_certificate(f, n: int) -> Certificate:
    """Every PD ``n x n`` correlation matrix stays PD when ``p_minus(n) <= 1 - p(1)``.

    ``p_minus`` is nondecreasing on ``(0, n)``, so testing the closure point is
    exact and conservative. The condition-number threshold ``p_plus(1) / p_minus(1)``
    is reported alongside.
    """
    if int(n) != n or n < 1:
        raise InputError("n must be a positive integer")
    p, tail, _ = _as_poly(f)
    _require_p0_zero(p)
    cs = p.exact()
    plus_1 = sum((c for c in cs if c > 0), Fraction(0))
    minus_1 = -sum((c for c in cs if c < 0), Fraction(0))
    minus_n = -sum((c * Fraction(int(n)) ** k for k, c in enumerate(cs) if c < 0), Fraction(0))
    margin = 1 - sum(cs, Fraction(0)) - minus_n - int(n) * Fraction(tail)
    cond_thr = math.inf if minus_1 == 0 else float(plus_1 / minus_1)
    ok = margin >= 0
    return Certificate(
        "correlation-class", GUARANTEED if ok else NOT_GUARANTEED, float(margin), cond_thr,
        {"n": int(n), "p_minus_n": float(minus_n), "one_minus_p1": float(1 - sum(cs, Fraction(0))), "cond_threshold": cond_thr},
        digest(map=_map_digest(f), n=int(n)),
    )


def cond_threshold(p: Polynomial, dmin: float, dmax: float) -> float:
    """``p_plus(dmin) / p_minus(dmax) * dmax / dmin``; ``inf`` when ``p_minus(dmax) == 0``."""
    plus, minus = split_parts(p)
    pm = float(minus(dmax))
    if pm == 0.0:
        return math.inf
    return float(plus(dmin)) / pm * dmax / dmin


def _check_contraction(f, p: Polynomial, tail: float, a: float):
    if isinstance(f, EntrywiseMap) and f.kind == "series":
        if a > f.radius:
            raise DomainError(f"entry bound {a} exceeds the series radius {f.radius}")
        x = np.linspace(-a, a, 8193)
        if np.any(np.abs(p(x)) > np.abs(x) + tail + 1e-15 * a):
            raise DomainError("map is not a contraction on [-a, a]")
        return
    est = contraction_constant(EntrywiseMap.poly(p.coeffs) if p.coeffs else EntrywiseMap.poly([0.0]), a)
    if est.constant > 1.0:
        raise DomainError(f"|f(x)| <= |x| fails on [-{a}, {a}] (ratio up to {est.constant:.6g})")


def cond_number_certificate(f, A: SymMatrix, a: float | None = None, tol: float = DEFAULT_TOL) -> Certificate:
    """PD of ``f*[A]`` from a condition-number bound.

    ``f`` must satisfy ``|f(x)| <= |x|`` on ``[-a, a]`` and the entries of ``A``
    must lie in ``[-a, a]`` (``a`` defaults to ``max|a_ij|``). For a truncated
    series the implied eigenvalue bound is lowered by ``n * tail``.
    """
    p, tail, _ = _as_poly(f)
    arr = A.array
    amax = float(np.max(np.abs(arr)))
    a = amax if a is None else float(a)
    if not a > 0:
        raise InputError("entry bound a must be positive")
    if amax > a:
        raise DomainError(f"matrix entries exceed the bound a = {a}")
    _check_contraction(f, p, tail, a)
    d = A.diag()
    dmin, dmax = float(np.min(d)), float(np.max(d))
    dig = digest(map=_map_digest(f), matrix=A.tolist(), a=a, tol=tol, rule="cond")
    if not dmin > 0:
        raise DomainError("the condition-number rule needs a positive diagonal")
    ev = sym_eigenvalues(A)
    thr = cond_threshold(p, dmin, dmax)
    details = {"d_min": dmin, "d_max": dmax, "a": a}
    if tail:
        details["tail_slack"] = A.n * tail
    if not ev[0] > 0:
        details["reason"] = "matrix is not positive definite"
        return Certificate("cond-number", NOT_GUARANTEED, None, thr, details, dig)
    cond = ev[-1] / ev[0]
    details["cond"] = cond
    _, b2 = _bounds_from(p, A, ev[0], ev[-1])
    b2 -= A.n * tail
    return Certificate("cond-number", _verdict(cond <= thr, b2, A, tol), b2, thr, details, dig)


def cond_number_sequence_certificate(polys, A: SymMatrix, tol: float = DEFAULT_TOL) -> Certificate:
    """Condition-number rule for a map known only as the limit of ``polys``.

    The upper limit of the thresholds is estimated by the maximum over the
    second half of the sequence; the running maximum is reported in the details.
    """
    polys = [_as_poly(q)[0] for q in polys]
    if not polys:
        raise InputError("need at least one polynomial")
    d = A.diag()
    dmin, dmax = float(np.min(d)), float(np.max(d))
    if not dmin > 0:
        raise DomainError("the condition-number rule needs a positive diagonal")
    thresholds = [cond_threshold(q, dmin, dmax) for q in polys]
    running = list(np.maximum.accumulate(thresholds))
    estimate = max(thresholds[len(thresholds) // 2:])
    ev = sym_eigenvalues(A)
    details = {"thresholds": thresholds, "running_max": running, "estimate": "max over second half"}
    dig = digest(polys=[list(q.coeffs) for q in polys], matrix=A.tolist(), tol=tol, rule="cond-seq")
    if not ev[0] > tol * A.scale():
        details["reason"] = "matrix is not positive definite"
        return Certificate("cond-number", NOT_GUARANTEED, None, estimate, details, dig)
    cond = ev[-1] / ev[0]
    details["cond"] = cond
    return Certificate("cond-number", GUARANTEED if cond <= estimate else NOT_GUARANTEED, None, estimate, details, dig)


def truncate_series(coeffs, r: float, target_tail: float, remainder: float = 0.0) -> EntrywiseMap:
    """Shortest prefix of a power series whose dropped part is at most ``target_tail`` on ``[-r, r]``.

    ``remainder`` bounds ``sum |a_k| r**k`` over the coefficients that were not
    supplied at all. The returned series map records the achieved tail.
    """
    r = float(r)
    if not r > 0:
        raise InputError("radius must be positive")
    if not target_tail >= 0 or not remainder >= 0:
        raise InputError("tail bounds must be nonnegative")
    if remainder > target_tail:
        raise InputError("target tail is unreachable: the unsupplied remainder alone exceeds it")
    cs = [float(c) for c in coeffs]
    weights = [abs(c) * r ** k for k, c in enumerate(cs)]
    if not all(math.isfinite(w) for w in weights):
        raise InputError("series does not converge absolutely on the radius")
    # suffix[d] = sum of weights[d:]
    suffix = [0.0] * (len(cs) + 1)
    for k in range(len(cs) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + weights[k]
    for d in range(len(cs) + 1):
        tail = suffix[d] + remainder
        if tail <= target_tail:
            return EntrywiseMap.series(cs[:d], r, tail)
    raise AssertionError("unreachable")  # d = len(cs) always qualifies
