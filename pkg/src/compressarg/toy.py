"""Two small compression arguments, made executable.

A Boolean matrix with a monochromatic k x k minor is written with the
minor's rows, columns and color followed by the other ``n^2 - k^2`` bits.
A bit string that nearly equals one of its rotations is written as the
shift, the first ``k`` bits, and the arithmetic-coded XOR of the rest with
itself shifted.

Bit strings are ``str`` of ``'0'``/``'1'`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import entropy_coding
from .entropy_coding import C_SLACK, SymbolModel, binary_entropy
from .errors import GuardError, ParseError

MINOR_GUARD = 10**8
COUNT_GUARD = 2**25


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def _bitstr(bits) -> str:
    if isinstance(bits, str):
        if bits.strip("01"):
            raise ValueError("bit strings may only contain '0' and '1'")
        return bits
    return "".join("1" if b else "0" for b in bits)


# --- matrices --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BitMatrix:
    bits: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.bits, dtype=np.uint8)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.size and a.max() > 1:
            raise ValueError("matrix entries must be 0 or 1")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "bits", a)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    def __eq__(self, other):
        return isinstance(other, BitMatrix) and np.array_equal(self.bits, other.bits)

    def to_text(self) -> str:
        return "\n".join("".join(map(str, row)) for row in self.bits.tolist()) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        rows = [r.strip() for r in text.splitlines() if r.strip()]
        for i, r in enumerate(rows, 1):
            if r.strip("01"):
                raise ParseError("matrix rows may only contain 0 and 1", i)
            if len(r) != len(rows):
                raise ParseError(f"row has {len(r)} entries, expected {len(rows)}", i)
        return cls(np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(len(rows), len(rows)))


@dataclass(frozen=True)
class MinorWitness:
    rows: tuple
    cols: tuple
    color: int

    def as_dict(self):
        return {"rows": list(self.rows), "cols": list(self.cols), "color": self.color}


def is_witness(M: BitMatrix, w: MinorWitness, k: int) -> bool:
    if len(w.rows) != k or len(w.cols) != k or w.color not in (0, 1):
        return False
    for idx in (w.rows, w.cols):
        if list(idx) != sorted(set(idx)) or any(not 0 <= i < M.n for i in idx):
            return False
    return bool((M.bits[np.ix_(w.rows, w.cols)] == w.color).all())


def find_monochromatic_minor(M: BitMatrix, k: int):
    """Lexicographically first monochromatic k x k minor (rows, then cols, then color), or None."""
    n = M.n
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if math.comb(n, k) ** 2 > MINOR_GUARD:
        raise GuardError(f"C({n},{k})^2 exceeds the exhaustive-search guard")
    for rows in combinations(range(n), k):
        sub = M.bits[list(rows)]
        best = None
        for color, mask in ((0, ~sub.any(axis=0)), (1, sub.all(axis=0))):
            cols = tuple(int(c) for c in np.flatnonzero(mask)[:k])
            if len(cols) == k and (best is None or cols < best[0]):
                best = (cols, color)
        if best is not None:
            return MinorWitness(rows, best[0], best[1])
    return None


def minor_code_length(n: int, k: int) -> int:
    """``2k ceil(log2 n) + 1 + n^2 - k^2``"""
    return 2 * k * _ceil_log2(n) + 1 + n * n - k * k


def compress_minor(M: BitMatrix, w: MinorWitness, k: int) -> str:
    if not is_witness(M, w, k):
        raise ValueError("not a monochromatic minor of this matrix")
    width = _ceil_log2(M.n)
    parts = [format(i, f"0{width}b") if width else "" for i in w.rows + w.cols]
    parts.append(str(w.color))
    inside = np.zeros((M.n, M.n), dtype=bool)
    inside[np.ix_(w.rows, w.cols)] = True
    parts.append("".join(map(str, M.bits[~inside].tolist())))
    bits = "".join(parts)
    assert len(bits) == minor_code_length(M.n, k)
    return bits


def decompress_minor(bits: str, n: int, k: int) -> BitMatrix:
    if len(bits) != minor_code_length(n, k):
        raise ValueError(f"expected {minor_code_length(n, k)} bits, got {len(bits)}")
    width = _ceil_log2(n)
    idx = [int(bits[i * width:(i + 1) * width], 2) if width else 0 for i in range(2 * k)]
    rows, cols = tuple(idx[:k]), tuple(idx[k:])
    for part in (rows, cols):
        if list(part) != sorted(set(part)) or any(i >= n for i in part):
            raise ValueError("row/column indices must be strictly increasing and below n")
    pos = 2 * k * width
    color = int(bits[pos])
    inside = np.zeros((n, n), dtype=bool)
    inside[np.ix_(rows, cols)] = True
    out = np.full((n, n), color, dtype=np.uint8)
    out[~inside] = np.frombuffer(bits[pos + 1:].encode(), dtype=np.uint8) - ord("0")
    return BitMatrix(out)


@dataclass(frozen=True)
class BadMatrixCount:
    n: int
    k: int
    exact_count: int
    union_bound: int

    @property
    def total(self) -> int:
        return 2 ** (self.n * self.n)

    def as_dict(self):
        return {"n": self.n, "k": self.k, "exact_count": self.exact_count,
                "union_bound": self.union_bound, "total": self.total,
                "within_bound": self.exact_count <= self.union_bound}


def union_bound(n: int, k: int) -> int:
    """``n^(2k) * 2^(n^2 - k^2 + 1)``"""
    return n ** (2 * k) * 2 ** (n * n - k * k + 1)


def count_bad_matrices(n: int, k: int) -> BadMatrixCount:
    """Count n x n matrices with a monochromatic k x k minor, over all ``2^(n^2)`` of them.

    Rows are n-bit integers. A set of k rows is bad when at least k columns
    are all-zero or all-one on it; that test is tabulated once over k-tuples
    of row values, then ORed over every choice of k row positions with
    numpy broadcasting over the full ``(2^n)^n`` grid of matrices.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if 2 ** (n * n) > COUNT_GUARD:
        raise GuardError(f"2^{n * n} matrices exceed the exhaustive guard 2^25")
    R = 1 << n
    vals = np.arange(R, dtype=np.int64)
    pop = np.array([bin(v).count("1") for v in range(R)], dtype=np.int64)

    def axis(i, dims):
        shape = [1] * dims
        shape[i] = R
        return vals.reshape(shape)

    all1 = np.full((1,) * k, R - 1, dtype=np.int64)
    any1 = np.zeros((1,) * k, dtype=np.int64)
    for i in range(k):
        all1 = all1 & axis(i, k)
        any1 = any1 | axis(i, k)
    tuple_bad = (pop[all1] >= k) | (pop[(R - 1) & ~any1] >= k)
    bad = np.zeros((R,) * n, dtype=bool)
    for rows in combinations(range(n), k):
        bad |= tuple_bad[tuple(axis(i, n) for i in rows)]
    return BadMatrixCount(n, k, int(bad.sum()), union_bound(n, k))


# --- rotations -------------------------------------------------------------------


@dataclass(frozen=True)
class CyclicWitness:
    k: int
    distance: int


def shift_distance(x, k: int) -> int:
    a = np.frombuffer(_bitstr(x).encode(), dtype=np.uint8)
    return int((a != np.roll(a, -k)).sum())


def min_shift_distance(x) -> CyclicWitness:
    """Shift ``k`` in ``1..n-1`` with the fewest positions where ``x_i != x_{i+k mod n}``."""
    x = _bitstr(x)
    n = len(x)
    if n < 2:
        raise ValueError("need at least two bits")
    a = np.frombuffer(x.encode(), dtype=np.uint8)
    best = None
    for k in range(1, n):
        d = int((a != np.roll(a, -k)).sum())
        if best is None or d < best.distance:
            best = CyclicWitness(k, d)
    return best


def _eps(eps) -> Fraction:
    e = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    if not 0 < e <= Fraction(1, 4):
        raise ValueError("eps must lie in (0, 1/4]")
    return e


def _xor_model(eps: Fraction) -> SymbolModel:
    return SymbolModel((1 - 2 * eps, 2 * eps))


@dataclass(frozen=True)
class RotationCode:
    bits: str
    n: int
    k: int
    header_bits: int
    prefix_bits: int
    tail_bits: int
    eps: Fraction

    @property
    def total_bits(self) -> int:
        return self.header_bits + self.prefix_bits + self.tail_bits

    @property
    def bound(self) -> float:
        """``ceil(log2 n) + k + (n-k) H(2 eps) + C_SLACK``"""
        return self.header_bits + self.k + (self.n - self.k) * binary_entropy(2 * self.eps) + C_SLACK

    def as_dict(self):
        return {"n": self.n, "k": self.k, "eps": str(self.eps), "header_bits": self.header_bits,
                "prefix_bits": self.prefix_bits, "tail_bits": self.tail_bits,
                "total_bits": self.total_bits, "bound": self.bound, "saving": self.n - self.total_bits}


def compress_rotation(x, w: CyclicWitness, eps) -> RotationCode:
    """Describe ``x`` by the shift, its first ``k`` bits, and the coded XOR stream."""
    x = _bitstr(x)
    n = len(x)
    e = _eps(eps)
    if not 1 <= w.k < n or shift_distance(x, w.k) != w.distance:
        raise ValueError("witness does not describe a shift of x")
    if w.distance >= e * n:
        raise ValueError(f"shift distance {w.distance} >= eps*n = {float(e * n)}: not compressible here")
    k = w.k if 2 * w.k <= n else n - w.k
    width = _ceil_log2(n)
    head = format(k, f"0{width}b") if width else ""
    xor = [int(x[k + i] != x[i]) for i in range(n - k)]
    tail = entropy_coding.encode(_xor_model(e), xor).bits
    return RotationCode(head + x[:k] + tail, n, k, len(head), k, len(tail), e)


def decompress_rotation(bits: str, n: int, eps) -> str:
    e = _eps(eps)
    width = _ceil_log2(n)
    if len(bits) < width:
        raise ValueError("code shorter than its shift field")
    k = int(bits[:width], 2) if width else 0
    if not 1 <= k or 2 * k > n or len(bits) < width + k:
        raise ValueError(f"invalid shift {k} for n={n}")
    out = list(bits[width:width + k])
    xor = entropy_coding.decode(_xor_model(e), bits[width + k:], n - k)
    for i, d in enumerate(xor):
        out.append(str(int(out[i]) ^ d))
    return "".join(out)


def random_bits(n: int, rng: np.random.Generator) -> str:
    return "".join(map(str, rng.integers(0, 2, size=n).tolist()))


def shift_test(n: int, eps, trials: int, seed: int) -> dict:
    """How often a random n-bit string has every rotation at distance >= eps*n."""
    rng = np.random.default_rng(seed)
    e = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    passed = 0
    for _ in range(trials):
        if min_shift_distance(random_bits(n, rng)).distance >= e * n:
            passed += 1
    return {"n": n, "eps": str(e), "trials": trials, "passed": passed}
