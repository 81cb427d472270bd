"""Power-series side of forbidden-factor avoidance.

For a forbidden set with profile ``a_j`` over ``m`` letters the denominator
is ``A(x) = 1 - m x + sum a_j x^j``. If ``1/A`` has positive coefficients
``g_n`` then at least ``g_n`` strings of length ``n`` avoid the set, and
``1/A`` is positive exactly when ``A`` has a positive real root.

All series arithmetic is exact. Root location bisects on exact dyadic
rationals, and an exact Sturm count settles the cases where the probes
cannot (a tangent or very narrow dip below zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .avoidance import ForbiddenSet
from .errors import GuardError, IntegrityError

DEFAULT_ORDER = 200
ENUMERATION_GUARD = 10**8


@dataclass(frozen=True)
class Series:
    """Truncated power series ``c_0 + c_1 x + ... + c_N x^N`` with rational coefficients."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a series needs at least the constant term")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def __mul__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return Series(tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n + 1)))

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_json(self) -> list:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, items: list) -> "Series":
        return cls(tuple(Fraction(s) for s in items))


def denominator(fs: ForbiddenSet, N: int) -> Series:
    """``1 - m x + a_2 x^2 + ... `` truncated at order ``N``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    c = [Fraction(0)] * (N + 1)
    c[0], c[1] = Fraction(1), Fraction(-fs.m)
    for j, a in fs.profile.items():
        if j <= N:
            c[j] = Fraction(a)
    return Series(tuple(c))


def invert(A: Series, N: int) -> Series:
    """Coefficients of ``1/A`` up to order ``N``, checked by exact multiplication."""
    c = A.coeffs
    if c[0] == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    g = [1 / c[0]]
    for n in range(1, N + 1):
        s = sum(c[i] * g[n - i] for i in range(1, min(n, A.order) + 1))
        g.append(-s / c[0])
    G = Series(tuple(g))
    padded = Series(tuple(c[:N + 1]) + (Fraction(0),) * max(0, N - A.order))
    prod = padded * G
    if prod.coeffs[0] != 1 or any(prod.coeffs[1:]):
        raise IntegrityError("A * invert(A) is not 1 to the requested order")
    return G


# --- counting allowed strings -------------------------------------------------------


def _count_dp(fs: ForbiddenSet, n_max: int) -> list:
    keep = max(fs.max_length - 1, 0)
    states = {(): 1}
    out = [1]
    for _ in range(n_max):
        nxt = {}
        for tail, cnt in states.items():
            for a in range(fs.m):
                t = tail + (a,)
                if fs.forbidden_suffix(t) is not None:
                    continue
                t = t[-keep:] if keep else ()
                nxt[t] = nxt.get(t, 0) + cnt
        states = nxt
        out.append(sum(states.values()))
    return out


def _count_enumerate(fs: ForbiddenSet, n_max: int) -> list:
    m = fs.m
    codes = {j: np.array(sorted(sum(a * m ** (j - 1 - t) for t, a in enumerate(w)) for w in ws),
                         dtype=np.int64)
             for j, ws in fs.by_length.items()}
    out = [1]
    for n in range(1, n_max + 1):
        idx = np.arange(m**n, dtype=np.int64)
        digits = np.stack([(idx // m ** (n - 1 - i)) % m for i in range(n)], axis=1)
        bad = np.zeros(len(idx), dtype=bool)
        for j, cs in codes.items():
            for i in range(n - j + 1):
                window = np.zeros(len(idx), dtype=np.int64)
                for t in range(j):
                    window = window * m + digits[:, i + t]
                bad |= np.isin(window, cs)
        out.append(int((~bad).sum()))
    return out


def count_allowed(fs: ForbiddenSet, n_max: int, method: str = "auto") -> list:
    """Exact counts ``s_0 .. s_{n_max}`` of strings with no forbidden factor.

    ``method`` is ``"enumerate"`` (every string, guarded by ``m**n_max <= 1e8``),
    ``"dp"`` (counts over the last ``L-1`` letters) or ``"auto"``.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if method == "auto":
        method = "dp"
    if method == "enumerate":
        if fs.m**n_max > ENUMERATION_GUARD:
            raise GuardError(f"{fs.m}**{n_max} strings exceed the enumeration guard; "
                             "use a smaller n_max or method='dp'")
        return _count_enumerate(fs, n_max)
    if method == "dp":
        return _count_dp(fs, n_max)
    raise ValueError(f"unknown method {method!r}")


def recurrence_residuals(fs: ForbiddenSet, s: Sequence[int]) -> list:
    """Coefficients of ``(sum s_n x^n) * A`` for degrees ``1 .. len(s)-1``."""
    a = fs.profile
    out = []
    for d in range(1, len(s)):
        v = s[d] - fs.m * s[d - 1] + sum(a.get(j, 0) * s[d - j] for j in range(2, d + 1))
        out.append(v)
    return out


def check_recurrence(fs: ForbiddenSet, s: Sequence[int]) -> bool:
    """``s_{k+1} >= m s_k - a_2 s_{k-1} - ... - a_{k+1} s_0`` for every k in range."""
    return all(v >= 0 for v in recurrence_residuals(fs, s))


# --- exact polynomial helpers --------------------------------------------------------


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _deriv(p):
    return _trim([i * p[i] for i in range(1, len(p))] or [Fraction(0)])


def _rem(a, b):
    a, b = list(a), _trim(b)
    while len(a) >= len(b) and not (len(a) == 1 and a[0] == 0):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
        if not a:
            return [Fraction(0)]
        a = _trim(a)
    return _trim(a)


def _sturm(p):
    seq = [_trim(p), _deriv(p)]
    while len(seq[-1]) > 1 or seq[-1][0] != 0:
        r = _rem(seq[-2], seq[-1])
        if len(r) == 1 and r[0] == 0:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(seq, x):
    signs = [v for v in (_peval(q, x) for q in seq) if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u > 0) != (v > 0))


def distinct_roots(p, lo, hi) -> int:
    """Number of distinct real roots of ``p`` in ``(lo, hi]`` (Sturm's theorem)."""
    seq = _sturm([Fraction(c) for c in p])
    return _sign_changes(seq, Fraction(lo)) - _sign_changes(seq, Fraction(hi))


# --- positive root -------------------------------------------------------------------


@dataclass(frozen=True)
class RootReport:
    """Smallest positive root of a denominator-shaped polynomial, if any.

    ``bracket`` is an exact interval of width at most ``tolerance`` holding
    the root; ``min_value`` is ``A`` at the located minimizer.
    """

    has_root: bool
    root: float | None
    bracket: tuple | None
    tolerance: float
    minimizer: float | None
    min_value: float | None
    exact_root: Fraction | None = None

    def as_dict(self):
        return {
            "has_root": self.has_root,
            "root": self.root,
            "bracket": None if self.bracket is None else [str(b) for b in self.bracket],
            "tolerance": self.tolerance,
            "minimizer": self.minimizer,
            "min_value": self.min_value,
            "exact_root": None if self.exact_root is None else str(self.exact_root),
        }


def _as_poly(A) -> list:
    coeffs = A.coeffs if isinstance(A, Series) else tuple(Fraction(c) for c in A)
    return _trim(coeffs)


def find_positive_root(A, tol: float = 1e-12) -> RootReport:
    """Locate the smallest positive root of ``A = c_0 + c_1 x + ...``.

    Requires ``c_0 > 0``, ``c_1 < 0`` and ``c_j >= 0`` for ``j >= 2``, which
    makes ``A`` convex on ``x >= 0``.
    """
    p = _as_poly(A)
    if len(p) < 2 or p[0] <= 0 or p[1] >= 0 or any(c < 0 for c in p[2:]):
        raise ValueError("expected c_0 > 0, c_1 < 0 and c_j >= 0 for j >= 2")
    if any(j * (j - 1) * p[j] < 0 for j in range(2, len(p))):
        raise IntegrityError("second derivative has a negative coefficient")
    tol_q = Fraction(tol)
    if len(p) == 2:
        r = -p[0] / p[1]
        return RootReport(True, float(r), (r, r), tol, None, None, r)
    dp = _deriv(p)
    hi = Fraction(1)
    while _peval(dp, hi) < 0:
        hi *= 2
    lo = Fraction(0)
    probe = None
    while hi - lo > tol_q:
        mid = (lo + hi) / 2
        if probe is None and _peval(p, mid) <= 0:
            probe = mid
        if _peval(dp, mid) < 0:
            lo = mid
        else:
            hi = mid
    xmin = (lo + hi) / 2
    vmin = _peval(p, xmin)
    if probe is None:
        for x in (lo, hi, xmin):
            if _peval(p, x) <= 0:
                probe = x
                break
    if probe is None:
        # every probe is positive; only an exact count can rule out a tangent or a narrow dip
        if distinct_roots(p, lo, hi) == 0:
            return RootReport(False, None, None, tol, float(xmin), float(vmin))
        return RootReport(True, float(xmin), (lo, hi), tol, float(xmin), float(vmin))
    if _peval(p, probe) == 0 and distinct_roots(p, 0, probe) == 1:
        return RootReport(True, float(probe), (probe, probe), tol, float(xmin), float(vmin), probe)
    a, b = Fraction(0), probe
    while b - a > tol_q:
        mid = (a + b) / 2
        v = _peval(p, mid)
        if v == 0:
            a = b = mid
            break
        if v > 0:
            a = mid
        else:
            b = mid
    exact = b if _peval(p, b) == 0 and a == b else None
    return RootReport(True, float((a + b) / 2), (a, b), tol, float(xmin), float(vmin), exact)


# --- positivity criterion ------------------------------------------------------------


@dataclass(frozen=True)
class PiontkovskyReport:
    """Both sides of the positivity criterion at truncation ``N``.

    ``verdict`` is ``"positive"`` (root found, all ``g_n > 0``),
    ``"nonpositive"`` (no root, some ``g_n <= 0``), ``"inconclusive"`` (no
    root and no nonpositive coefficient up to ``N``) or ``"contradiction"``.
    """

    N: int
    root: RootReport
    first_nonpositive: int | None
    verdict: str

    @property
    def has_root(self) -> bool:
        return self.root.has_root

    @property
    def consistent(self) -> bool:
        return self.verdict != "contradiction"

    def as_dict(self):
        return {"N": self.N, "has_root": self.has_root, "first_nonpositive_g_index": self.first_nonpositive,
                "verdict": self.verdict, "root": self.root.as_dict()}


def check_piontkovsky(fs: ForbiddenSet, N: int = DEFAULT_ORDER) -> PiontkovskyReport:
    A = denominator(fs, max(N, fs.max_length, 1))
    root = find_positive_root(A)
    g = invert(A, N)
    bad = next((n for n, v in enumerate(g.coeffs) if v <= 0), None)
    if root.has_root:
        verdict = "positive" if bad is None else "contradiction"
    else:
        verdict = "nonpositive" if bad is not None else "inconclusive"
    return PiontkovskyReport(N, root, bad, verdict)


def remainder_invariants(A, alpha, steps: int) -> bool:
    """Run ``steps`` rounds of long division of 1 by ``A`` and check every remainder.

    ``R^(0) = 1`` and ``R^(k+1) = R^(k) - (R^(k)_k / a_0) A x^k``. Each
    remainder must equal 1 at ``alpha``, have a positive lowest coefficient
    and no positive coefficient after it.
    """
    p = _as_poly(A)
    alpha = Fraction(alpha)
    if _peval(p, alpha) != 0:
        raise ValueError(f"{alpha} is not an exact root")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if p[0] <= 0 or any(c < 0 for c in p[2:]):
        raise ValueError("expected a_0 > 0 and a_j >= 0 for j >= 2")
    r = {0: Fraction(1)}
    for k in range(steps + 1):
        if sum(c * alpha**i for i, c in r.items()) != 1:
            return False
        if r.get(k, 0) <= 0:
            return False
        if any(c > 0 for i, c in r.items() if i > k):
            return False
        if k == steps:
            break
        q = r.get(k, 0) / p[0]
        for i, c in enumerate(p):
            r[k + i] = r.get(k + i, 0) - q * c
        r.pop(k)
        r = {i: c for i, c in r.items() if c != 0}
    return True


def division_quotients(A, steps: int) -> list:
    """Quotient digits ``R^(k)_k / a_0`` of the long division; they equal the ``g_k``."""
    p = _as_poly(A)
    r = {0: Fraction(1)}
    out = []
    for k in range(steps):
        q = r.get(k, 0) / p[0]
        out.append(q)
        for i, c in enumerate(p):
            r[k + i] = r.get(k + i, 0) - q * c
        r.pop(k, None)
    return out


def rational_root_instance(alpha, tail: dict) -> list:
    """Denominator-shaped polynomial with exact root ``alpha``.

    ``tail`` gives the coefficients ``a_j >= 0`` for ``j >= 2``; the linear
    coefficient is chosen as ``-(1 + sum a_j alpha^j) / alpha``.
    """
    alpha = Fraction(alpha)
    deg = max(tail, default=1)
    p = [Fraction(0)] * (deg + 1)
    p[0] = Fraction(1)
    for j, a in tail.items():
        if j < 2 or a < 0:
            raise ValueError("tail needs j >= 2 and a_j >= 0")
        p[j] = Fraction(a)
    p[1] = -(1 + sum(Fraction(a) * alpha**j for j, a in tail.items())) / alpha
    return p


def s_at_least_g(s: Sequence[int], g: Series) -> list:
    """Per-index flags ``s_n >= g_n`` over the common range."""
    return [si >= gi for si, gi in zip(s, g.coeffs)]


__all__ = [
    "Series", "denominator", "invert", "count_allowed", "check_recurrence",
    "recurrence_residuals", "find_positive_root", "RootReport", "check_piontkovsky",
    "PiontkovskyReport", "remainder_invariants", "division_quotients",
    "rational_root_instance", "distinct_roots", "s_at_least_g",
]
