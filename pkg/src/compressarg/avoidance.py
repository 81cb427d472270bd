"""Tetris-style construction of strings avoiding forbidden factors.

Letters are appended one at a time; whenever a forbidden string shows up as
a suffix it is deleted at once. The record of the run (``+`` or
``+<deleted>`` per letter) together with the final string determines every
letter drawn, and coding the record with the probabilities below is shorter
than ``letters * log2(m)`` by ``c`` bits per letter of final length.

Strings are tuples of ints in ``0 .. m-1``. In text they are written with
one base-36 digit per letter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import entropy_coding
from .errors import IntegrityError, ParseError
from .lll_sat import BitSource

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def word_to_text(word: Sequence[int]) -> str:
    return "".join(_DIGITS[a] for a in word)


def text_to_word(text: str, m: int) -> tuple:
    out = []
    for ch in text.strip().lower():
        i = _DIGITS.find(ch)
        if i < 0 or i >= m:
            raise ValueError(f"letter {ch!r} is not in the alphabet 0..{m - 1}")
        out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class ForbiddenSet:
    """Alphabet size ``m`` and forbidden strings grouped by length (all of length >= 2)."""

    m: int
    by_length: Mapping

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("alphabet needs at least two letters")
        groups = {}
        for j, words in self.by_length.items():
            for w in words:
                w = tuple(int(a) for a in w)
                if len(w) != j:
                    raise ValueError(f"string {w} filed under length {j}")
                if len(w) < 2:
                    raise ValueError("forbidden strings must have length >= 2")
                if any(not 0 <= a < self.m for a in w):
                    raise ValueError(f"string {w} uses letters outside 0..{self.m - 1}")
                groups.setdefault(j, set()).add(w)
        object.__setattr__(self, "by_length",
                           {j: frozenset(groups[j]) for j in sorted(groups)})

    @classmethod
    def from_strings(cls, m: int, words: Iterable) -> "ForbiddenSet":
        groups = {}
        for w in words:
            w = text_to_word(w, m) if isinstance(w, str) else tuple(w)
            groups.setdefault(len(w), set()).add(w)
        return cls(m, groups)

    @property
    def profile(self) -> dict:
        """``{j: a_j}``"""
        return {j: len(ws) for j, ws in self.by_length.items()}

    @property
    def max_length(self) -> int:
        return max(self.by_length, default=0)

    def words(self) -> list:
        """All forbidden strings, by length then lexicographically."""
        return [w for j in self.by_length for w in sorted(self.by_length[j])]

    def __contains__(self, word) -> bool:
        word = tuple(word)
        return word in self.by_length.get(len(word), ())

    def forbidden_suffix(self, s: Sequence[int]):
        """Shortest forbidden suffix of ``s``, or None."""
        for j, ws in self.by_length.items():
            if j <= len(s) and tuple(s[-j:]) in ws:
                return tuple(s[-j:])
        return None

    def has_factor(self, s: Sequence[int]) -> bool:
        s = tuple(s)
        return any(s[i:i + j] in ws for j, ws in self.by_length.items()
                   for i in range(len(s) - j + 1))


def parse_forbidden(text: str) -> ForbiddenSet:
    """Read ``alphabet m`` then one forbidden string per line; ``#`` starts a comment."""
    m = None
    words = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "alphabet":
                raise ParseError(f"expected 'alphabet m', got {line!r}", lineno)
            try:
                m = int(parts[1])
            except ValueError:
                raise ParseError(f"bad alphabet size {parts[1]!r}", lineno) from None
            if not 2 <= m <= 36:
                raise ParseError("alphabet size must be in 2..36", lineno)
            continue
        try:
            w = text_to_word(line, m)
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
        if len(w) < 2:
            raise ParseError("forbidden strings must have length >= 2", lineno)
        words.append(w)
    if m is None:
        raise ParseError("missing 'alphabet m' line")
    return ForbiddenSet.from_strings(m, words)


def format_forbidden(fs: ForbiddenSet) -> str:
    return "\n".join([f"alphabet {fs.m}"] + [word_to_text(w) for w in fs.words()]) + "\n"


class LetterSource:
    """Uniform letters from a seeded bit stream, by rejection when ``m`` is not a power of two."""

    def __init__(self, m: int, seed: int):
        self.m = m
        self.bits = BitSource(seed)
        self.width = (m - 1).bit_length()
        self.log = []

    def draw(self) -> int:
        while True:
            v = 0
            for b in self.bits.take(self.width):
                v = (v << 1) | b
            if v < self.m:
                self.log.append(v)
                return v


# --- the process -----------------------------------------------------------------


@dataclass(frozen=True)
class Record:
    """One entry per letter drawn: ``None`` for ``+``, the deleted string for ``+<s>``."""

    events: tuple = ()

    def __len__(self):
        return len(self.events)

    @property
    def deletions(self) -> int:
        return sum(e is not None for e in self.events)

    def to_json(self) -> list:
        return [{"op": "+"} if e is None else {"op": "+", "del": word_to_text(e)}
                for e in self.events]

    @classmethod
    def from_json(cls, items: list, m: int) -> "Record":
        return cls(tuple(text_to_word(d["del"], m) if "del" in d else None for d in items))


@dataclass(frozen=True)
class ProcessState:
    current: tuple
    record: Record
    letters_drawn: int
    exhausted: bool = False


def run_tetris(fs: ForbiddenSet, letters: LetterSource, target_len: int,
               max_steps: int, check: bool = False) -> ProcessState:
    """Grow a factor-free string until it reaches ``target_len`` or ``max_steps`` letters are drawn.

    When several forbidden suffixes appear, the shortest is deleted.
    """
    if target_len < 0 or max_steps < target_len:
        raise ValueError("need 0 <= target_len <= max_steps")
    if letters.m != fs.m:
        raise ValueError("letter source and forbidden set disagree on the alphabet")
    cur = []
    events = []
    plain = shrink = 0
    while len(cur) < target_len:
        if len(events) == max_steps:
            return ProcessState(tuple(cur), Record(tuple(events)), len(events), True)
        cur.append(letters.draw())
        s = fs.forbidden_suffix(cur)
        if s is not None:
            del cur[-len(s):]
            shrink += len(s) - 1
        else:
            plain += 1
        events.append(s)
        if check:
            if fs.has_factor(cur):
                raise IntegrityError(f"forbidden factor survived step {len(events)}")
            if len(cur) != plain - shrink:
                raise IntegrityError("length bookkeeping broken")
    return ProcessState(tuple(cur), Record(tuple(events)), len(events))


def reconstruct_letters(fs: ForbiddenSet, final: Sequence[int], record: Record) -> list:
    """Replay the record backward: re-append each deleted string, then pop the drawn letter."""
    cur = list(final)
    if fs.has_factor(cur):
        raise IntegrityError("final string contains a forbidden factor")
    out = []
    for step, e in zip(range(len(record), 0, -1), reversed(record.events)):
        if e is not None:
            if e not in fs:
                raise IntegrityError(f"event {step}: deleted string {e} is not forbidden")
            cur.extend(e)
            if fs.forbidden_suffix(cur) != e:
                raise IntegrityError(f"event {step}: {e} is not the deletion the process would make")
        elif fs.forbidden_suffix(cur) is not None:
            raise IntegrityError(f"event {step}: plain '+' left a forbidden suffix")
        if not cur:
            raise IntegrityError(f"event {step}: nothing to pop")
        out.append(cur.pop())
    if cur:
        raise IntegrityError("record does not account for the whole string")
    out.reverse()
    return out


# --- Miller's condition ----------------------------------------------------------


def _poly(fs: ForbiddenSet, x):
    """``f(x) = sum a_j x^j - m x + 1``"""
    return sum(a * x**j for j, a in fs.profile.items()) - fs.m * x + 1


def _dpoly(fs: ForbiddenSet, x):
    return sum(j * a * x ** (j - 1) for j, a in fs.profile.items()) - fs.m


@dataclass(frozen=True)
class MillerReport:
    """Outcome of testing ``sum a_j x^j < m x - 1``.

    ``witness_x`` is a rational with positive ``margin = m x - 1 - sum a_j x^j``
    and ``c = -log2(witness_x)`` is the per-letter saving of the record code.
    """

    holds: bool
    witness_x: Fraction | None
    margin: Fraction | None
    c: float | None
    minimizer: float
    min_value: float

    def as_dict(self):
        return {
            "holds": self.holds,
            "witness_x": None if self.witness_x is None else str(self.witness_x),
            "witness_x_float": None if self.witness_x is None else float(self.witness_x),
            "margin": None if self.margin is None else str(self.margin),
            "c": self.c,
            "minimizer": self.minimizer,
            "min_value": self.min_value,
        }


def miller_at(fs: ForbiddenSet, x) -> MillerReport:
    """Report for a caller-chosen ``x`` (exact rational)."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    margin = -_poly(fs, x)
    ok = margin > 0
    return MillerReport(ok, x if ok else None, margin if ok else None,
                        0.0 - math.log2(x) if ok else None, float(x), float(-margin))


def check_miller(fs: ForbiddenSet, tol: float = 1e-15, max_denominator: int = 10**6) -> MillerReport:
    """Decide whether some ``x > 0`` satisfies Miller's inequality.

    ``f(x) = sum a_j x^j - m x + 1`` is convex on ``x >= 0``, so its minimum
    is found by bisection on ``f'``; the verdict is then confirmed exactly at
    a nearby rational.
    """
    if not fs.by_length:
        return miller_at(fs, 1)
    hi = max(1.0, float(fs.max_length))
    while _dpoly(fs, hi) < 0:
        hi *= 2
    lo = 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if _dpoly(fs, mid) < 0:
            lo = mid
        else:
            hi = mid
    xstar = (lo + hi) / 2
    fmin = float(_poly(fs, xstar))
    exact = Fraction(xstar)
    for cand in [exact.limit_denominator(d) for d in (max_denominator, 10**3, 10**9)] + [exact]:
        if cand > 0 and _poly(fs, cand) < 0:
            rep = miller_at(fs, cand)
            return MillerReport(True, rep.witness_x, rep.margin, rep.c, xstar, fmin)
    return MillerReport(False, None, None, None, xstar, fmin)


# --- record coding ------------------------------------------------------------------


@dataclass(frozen=True)
class RecordModel:
    """Symbol model for records: id 0 is ``+``, ids ``1..`` follow ``fs.words()``."""

    model: entropy_coding.SymbolModel
    symbols: dict
    words: tuple
    x: Fraction

    def symbol(self, event) -> int:
        return 0 if event is None else self.symbols[tuple(event)]

    def event(self, sym: int):
        return None if sym == 0 else self.words[sym - 1]


def record_model(fs: ForbiddenSet, report: MillerReport) -> RecordModel:
    """``p_0 = 1/(m x)`` for ``+``; each forbidden string of length ``j`` gets ``x^j/(m x)``."""
    if not report.holds:
        raise ValueError("Miller's condition does not hold; no record model exists")
    x = report.witness_x
    words = tuple(fs.words())
    probs = [1 / (fs.m * x)] + [x ** len(w) / (fs.m * x) for w in words]
    if sum(probs) >= 1:
        raise IntegrityError("record model mass is not below one")
    return RecordModel(entropy_coding.SymbolModel(tuple(probs)),
                       {w: i + 1 for i, w in enumerate(words)}, words, x)


def event_inequalities(fs: ForbiddenSet, report: MillerReport) -> dict:
    """Check the per-event cost bounds exactly, in rationals.

    ``log(1/p_0) <= log m - c``  is  ``1/p_0 <= m x``, and
    ``log(1/p_j) + log a_j <= log m + c (j-1)``  is  ``a_j/p_j <= m x^(1-j)``.
    """
    x = report.witness_x
    m = fs.m
    p0 = 1 / (m * x)
    out = {"plus": 1 / p0 <= m * x}
    for j, a in fs.profile.items():
        pj = a * x**j / (m * x)
        out[j] = a / pj <= m * x ** (1 - j)
    return out


@dataclass(frozen=True)
class RecordCodeReport:
    total_bits: int
    letters_drawn: int
    final_length: int
    m: int
    c: float

    @property
    def naive_bits(self) -> float:
        return self.letters_drawn * math.log2(self.m)

    @property
    def saved(self) -> float:
        return self.naive_bits - self.total_bits

    @property
    def bound(self) -> float:
        """``letters * log2 m - c * |final| + C_SLACK``"""
        return self.naive_bits - self.c * self.final_length + entropy_coding.C_SLACK

    def as_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(naive_bits=self.naive_bits, saved=self.saved, bound=self.bound,
                 within_bound=self.total_bits <= self.bound)
        return d


def encode_record(fs: ForbiddenSet, record: Record, report: MillerReport, final_length=None):
    """Arithmetic-code the record; return ``(CodeBits, RecordCodeReport)``."""
    rm = record_model(fs, report)
    for e in record.events:
        if e is not None and e not in fs:
            raise ValueError(f"record deletes {e}, which is not forbidden")
    bits = entropy_coding.encode(rm.model, [rm.symbol(e) for e in record.events])
    if final_length is None:
        final_length = len(record) - sum(len(e) for e in record.events if e is not None)
    return bits, RecordCodeReport(bits.length, len(record), final_length, fs.m, report.c)


def decode_record(fs: ForbiddenSet, bits, count: int, report: MillerReport) -> Record:
    rm = record_model(fs, report)
    return Record(tuple(rm.event(s) for s in entropy_coding.decode(rm.model, bits, count)))
