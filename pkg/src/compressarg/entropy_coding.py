"""Exact arithmetic coding over finite rational symbol models.

The coder keeps the current interval as integers scaled by ``D**t`` where
``D`` is the common denominator of the model, so no fraction reduction
happens inside the loop. The emitted code is the shortest binary fraction
``k / 2**b`` that falls into the final interval; since the decoder is told
the symbol count, no terminator is needed and the code is at most
``ceil(sum(-log2 q_s))`` bits long.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DecodeError

#: Fixed bound on the coding overhead above the ideal information content.
C_SLACK = 16


def binary_entropy(p) -> float:
    """Shannon entropy, in bits, of a Bernoulli(p) source.

    Uses the convention ``0 * log(1/0) = 0``.

    >>> binary_entropy(0.5)
    1.0
    """
    p = Fraction(p) if not isinstance(p, float) else p
    if not 0 <= p <= 1:
        raise ValueError(f"probability out of range: {p}")
    q = 1 - p
    h = 0.0
    for t in (p, q):
        if t > 0:
            h -= float(t) * math.log2(t)
    return min(max(h, 0.0), 1.0)


@dataclass(frozen=True)
class SymbolModel:
    """Fixed probabilities ``q_0 .. q_{M-1}`` for dense symbol ids ``0 .. M-1``.

    The total may be below one; the leftover mass is never coded into.
    """

    probs: tuple

    def __post_init__(self):
        probs = tuple(Fraction(q) for q in self.probs)
        if not probs:
            raise ValueError("model needs at least one symbol")
        if any(q <= 0 for q in probs):
            raise ValueError("every symbol probability must be positive")
        if sum(probs) > 1:
            raise ValueError(f"probabilities sum to {sum(probs)} > 1")
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return len(self.probs)

    @cached_property
    def denominator(self) -> int:
        return math.lcm(*(q.denominator for q in self.probs))

    @cached_property
    def numerators(self) -> tuple:
        d = self.denominator
        return tuple(q.numerator * (d // q.denominator) for q in self.probs)

    @cached_property
    def cumulative(self) -> tuple:
        """``C[i] = sum(numerators[:i])``, with ``len(C) == M + 1``."""
        out = [0]
        for v in self.numerators:
            out.append(out[-1] + v)
        return tuple(out)

    def information(self, symbols: Iterable[int]) -> float:
        """Ideal code length ``sum(-log2 q_s)`` in bits."""
        return sum(-math.log2(self.probs[s]) for s in symbols)


@dataclass(frozen=True)
class CodeBits:
    """A finite bit string, stored as text of ``'0'``/``'1'``."""

    bits: str = ""

    def __post_init__(self):
        if self.bits.strip("01"):
            raise ValueError("CodeBits may only contain '0' and '1'")

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self):
        return len(self.bits)


def _interval(model: SymbolModel, symbols: Sequence[int]):
    d, nums, cum = model.denominator, model.numerators, model.cumulative
    low, width = 0, 1
    for s in symbols:
        if not (isinstance(s, int) and 0 <= s < len(nums)):
            raise ValueError(f"unknown symbol id {s!r} for a {len(nums)}-symbol model")
        low = low * d + width * cum[s]
        width *= nums[s]
    return low, width, d ** len(symbols)


def _point_at(low: int, width: int, scale: int, b: int):
    # smallest k with k / 2**b >= low / scale; None if it leaves the interval
    k = -((-low << b) // scale)
    if k * scale < (low + width) << b:
        return k
    return None


def encode(model: SymbolModel, symbols: Sequence[int]) -> CodeBits:
    """Code ``symbols`` as the shortest binary fraction inside their interval."""
    low, width, scale = _interval(model, symbols)
    # a point always exists once 2**-b <= width / scale
    hi = max(0, scale.bit_length() - width.bit_length() + 1)
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if _point_at(low, width, scale, mid) is None:
            lo = mid + 1
        else:
            hi = mid
    k = _point_at(low, width, scale, lo)
    return CodeBits(format(k, f"0{lo}b") if lo else "")


def decode(model: SymbolModel, bits: CodeBits | str, count: int) -> list:
    """Inverse of :func:`encode`.

    Raises :class:`DecodeError` if the bits are not exactly what ``encode``
    would emit for some ``count``-symbol sequence.
    """
    if isinstance(bits, CodeBits):
        bits = bits.bits
    if count < 0:
        raise ValueError("count must be non-negative")
    d, nums, cum = model.denominator, model.numerators, model.cumulative
    p = int(bits, 2) if bits else 0
    q = 1 << len(bits)
    out = []
    for _ in range(count):
        t = p * d
        v = t // q
        if v >= cum[-1]:
            raise DecodeError("code point falls into unassigned model mass")
        s = bisect_right(cum, v) - 1
        out.append(s)
        p = t - cum[s] * q
        q *= nums[s]
    # the encoder is canonical, so any other bit string is corrupt
    if encode(model, out).bits != bits:
        raise DecodeError("bits are not the canonical code of any sequence of this length")
    return out
