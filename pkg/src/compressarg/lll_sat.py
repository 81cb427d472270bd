"""Resampling solver for n-uniform CNF with bounded clause neighborhoods.

``solve`` runs the recursive ``Fix``/``Resample`` procedure on an explicit
stack, logging every random bit it draws. ``reconstruct_bits`` recovers the
resampling bits from the final assignment and the clause sequence alone,
and ``encode_walk`` writes the recursion walk in about ``n - 1`` bits per
resample, which is where the compression comes from.

Variables are 0-based internally; DIMACS text uses 1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import IntegrityError, ParseError

DEFAULT_MAX_RESAMPLES = 10**6


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals ``(variable, polarity)``; polarity True is a positive literal."""

    literals: tuple

    def __post_init__(self):
        lits = tuple((int(v), bool(p)) for v, p in self.literals)
        vars_ = [v for v, _ in lits]
        if len(set(vars_)) != len(vars_):
            raise ValueError(f"clause repeats a variable: {lits}")
        object.__setattr__(self, "literals", lits)

    @property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.literals)

    def falsifying(self) -> tuple:
        """The unique values of ``variables`` that make the clause false."""
        return tuple(not p for _, p in self.literals)

    def is_true(self, values: Sequence[bool]) -> bool:
        return any(values[v] == p for v, p in self.literals)


@dataclass(frozen=True)
class Cnf:
    var_count: int
    clauses: tuple
    n: int
    neighbor_lists: tuple = field(init=False, repr=False)

    def __post_init__(self):
        clauses = tuple(c if isinstance(c, Clause) else Clause(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for i, c in enumerate(clauses):
            if len(c.literals) != self.n:
                raise ValueError(f"clause {i} has {len(c.literals)} literals, expected {self.n}")
            for v in c.variables:
                if not 0 <= v < self.var_count:
                    raise ValueError(f"clause {i} uses variable {v} outside 0..{self.var_count - 1}")
        occurs = [[] for _ in range(self.var_count)]
        for i, c in enumerate(clauses):
            for v in c.variables:
                occurs[v].append(i)
        nbrs = []
        for c in clauses:
            s = set()
            for v in c.variables:
                s.update(occurs[v])
            nbrs.append(tuple(sorted(s)))
        object.__setattr__(self, "neighbor_lists", tuple(nbrs))

    @property
    def max_neighborhood(self) -> int:
        """Largest neighbor list, the clause itself included."""
        return max((len(x) for x in self.neighbor_lists), default=0)


def evaluate(cnf: Cnf, assignment: Sequence[bool]) -> bool:
    if len(assignment) != cnf.var_count:
        raise ValueError("assignment does not cover every variable")
    return all(c.is_true(assignment) for c in cnf.clauses)


# --- DIMACS -----------------------------------------------------------------


def parse_dimacs(text: str) -> Cnf:
    """Parse the uniform-width DIMACS subset: ``p cnf V C``, ``c`` comments, 0-terminated clauses."""
    header = None
    clauses = []
    pending = []
    pending_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError("negative counts in header", lineno)
            continue
        if header is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        for lit in nums:
            if pending_line is None:
                pending_line = lineno
            if lit == 0:
                clauses.append((pending, pending_line))
                pending, pending_line = [], None
                continue
            if abs(lit) > header[0]:
                raise ParseError(f"literal {lit} exceeds variable count {header[0]}", lineno)
            pending.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if pending:
        raise ParseError("last clause is not terminated by 0", pending_line)
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    width = None
    out = []
    for lits, lineno in clauses:
        vars_ = [abs(x) for x in lits]
        if len(set(vars_)) != len(vars_):
            raise ParseError("clause repeats a variable", lineno)
        if width is None:
            width = len(lits)
        elif len(lits) != width:
            raise ParseError(f"clause has {len(lits)} literals, expected {width}", lineno)
        out.append(Clause(tuple((abs(x) - 1, x > 0) for x in lits)))
    return Cnf(header[0], tuple(out), width if width is not None else 0)


def emit_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.var_count} {len(cnf.clauses)}"]
    for c in cnf.clauses:
        lits = [str(v + 1) if p else str(-(v + 1)) for v, p in c.literals]
        lines.append(" ".join(lits + ["0"]))
    return "\n".join(lines) + "\n"


# --- premise -----------------------------------------------------------------


@dataclass(frozen=True)
class PremiseReport:
    """Neighborhood bound check.

    ``max_neighbors`` counts *other* clauses sharing a variable; the bound
    ``2**(n-3)`` is applied to that count. ``max_neighborhood`` includes the
    clause itself and is what the walk code's rank field must index.
    """

    max_neighbors: int
    max_neighborhood: int
    bound: float
    holds: bool
    note: str = "max_neighbors excludes the clause itself"

    def as_dict(self):
        return {
            "max_neighbors": self.max_neighbors,
            "max_neighborhood": self.max_neighborhood,
            "bound": self.bound,
            "holds": self.holds,
            "note": self.note,
        }


def check_premise(cnf: Cnf) -> PremiseReport:
    others = max((len(x) - 1 for x in cnf.neighbor_lists), default=0)
    if not cnf.clauses:
        return PremiseReport(0, 0, 2.0 ** (cnf.n - 3), True, "no clauses: holds vacuously")
    if cnf.n < 3:
        return PremiseReport(others, cnf.max_neighborhood, 2.0 ** (cnf.n - 3), False,
                             f"n={cnf.n} < 3: bound is fractional, premise cannot hold")
    bound = 2 ** (cnf.n - 3)
    return PremiseReport(others, cnf.max_neighborhood, bound, others <= bound)


# --- random bits ---------------------------------------------------------------


class BitSource:
    """Seeded stream of fair bits that keeps a log of everything drawn."""

    block = 4096

    def __init__(self, seed: int):
        self.seed = int(seed) & (2**64 - 1)
        self._rng = np.random.default_rng(self.seed)
        self._buf = np.empty(0, dtype=np.uint8)
        self._pos = 0
        self.log = bytearray()

    @property
    def consumed(self) -> int:
        return len(self.log)

    def _draw_block(self) -> np.ndarray:
        return self._rng.integers(0, 2, size=self.block, dtype=np.uint8)

    def take(self, count: int) -> list:
        out = []
        while len(out) < count:
            if self._pos == len(self._buf):
                self._buf = self._draw_block()
                self._pos = 0
            step = min(count - len(out), len(self._buf) - self._pos)
            out.extend(self._buf[self._pos:self._pos + step].tolist())
            self._pos += step
        self.log.extend(out)
        return out


class ReplayBitSource(BitSource):
    """Serves a fixed bit sequence; used to re-run a solve from reconstructed bits."""

    def __init__(self, bits: Iterable[int]):
        self.seed = None
        self._bits = [int(b) for b in bits]
        self._pos = 0
        self.log = bytearray()

    def take(self, count):
        if self._pos + count > len(self._bits):
            raise IntegrityError("replay ran past the reconstructed bits")
        out = self._bits[self._pos:self._pos + count]
        self._pos += count
        self.log.extend(out)
        return out


# --- solver ----------------------------------------------------------------------

ROOT, UP, DOWN = "root", "up", "down"


@dataclass(frozen=True)
class ResampleTrace:
    """What one ``solve`` run did.

    ``walk`` is a tuple of steps ``("root", clause)``, ``("up", rank)`` and
    ``("down",)``. A root starts a driver-level ``Fix``; an up step enters
    the neighbor at position ``rank`` of the parent's neighbor list. Both
    resample, so ``len(events)`` equals the number of root and up steps.
    """

    events: tuple
    walk: tuple
    final_assignment: tuple
    bits_consumed: int

    @property
    def resamples(self) -> int:
        return len(self.events)

    def as_dict(self):
        return {
            "events": list(self.events),
            "walk": [list(s) for s in self.walk],
            "final_assignment": [int(v) for v in self.final_assignment],
            "bits_consumed": self.bits_consumed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["events"]), tuple(tuple(s) for s in d["walk"]),
                   tuple(bool(v) for v in d["final_assignment"]), d["bits_consumed"])


@dataclass(frozen=True)
class SolveResult:
    trace: ResampleTrace
    exhausted: bool

    @property
    def ok(self) -> bool:
        return not self.exhausted

    @property
    def assignment(self) -> tuple:
        return self.trace.final_assignment


class _Budget(Exception):
    pass


def solve(cnf: Cnf, bits: BitSource, max_resamples: int = DEFAULT_MAX_RESAMPLES,
          check: bool = False) -> SolveResult:
    """Draw a random assignment, then ``Fix`` every false clause in index order.

    With ``check=True`` every completed ``Fix(C)`` is verified to leave ``C``
    true and not to falsify any clause that was true when it started.
    """
    if max_resamples <= 0:
        raise ValueError("max_resamples must be positive")
    clauses = cnf.clauses
    nbrs = cnf.neighbor_lists
    values = [bool(b) for b in bits.take(cnf.var_count)]
    events = []
    walk = []

    def false(i):
        for v, p in clauses[i].literals:
            if values[v] == p:
                return False
        return True

    def true_set():
        return {i for i in range(len(clauses)) if not false(i)}

    def resample(i):
        if len(events) >= max_resamples:
            raise _Budget
        vs = clauses[i].variables
        for v, b in zip(vs, bits.take(len(vs))):
            values[v] = bool(b)
        events.append(i)

    def fix(root):
        entry = true_set() if check else None
        resample(root)
        walk.append((ROOT, root))
        stack = [[root, 0, entry]]
        while stack:
            frame = stack[-1]
            c, pos = frame[0], frame[1]
            lst = nbrs[c]
            while pos < len(lst) and not false(lst[pos]):
                pos += 1
            if pos == len(lst):
                stack.pop()
                walk.append((DOWN,))
                if check:
                    _check_post(c, frame[2])
                continue
            frame[1] = pos + 1
            child = lst[pos]
            entry = true_set() if check else None
            resample(child)
            walk.append((UP, pos))
            stack.append([child, 0, entry])

    def _check_post(c, before):
        if false(c):
            raise IntegrityError(f"Fix({c}) returned with the clause still false")
        lost = before - true_set()
        if lost:
            raise IntegrityError(f"Fix({c}) falsified previously true clauses {sorted(lost)}")

    exhausted = False
    try:
        for i in range(len(clauses)):
            if false(i):
                fix(i)
    except _Budget:
        exhausted = True
    trace = ResampleTrace(tuple(events), tuple(walk), tuple(values), bits.consumed)
    if not exhausted and not evaluate(cnf, trace.final_assignment):
        raise IntegrityError("solver finished with a false clause")
    return SolveResult(trace, exhausted)


# --- reconstruction -----------------------------------------------------------------


def rewind(cnf: Cnf, trace: ResampleTrace):
    """Undo the resamples backward; return ``(initial_assignment, resample_bits)``.

    Before each ``Resample(C)`` the variables of ``C`` held its unique
    falsifying tuple, and after it they held the drawn bits.
    """
    if len(trace.final_assignment) != cnf.var_count:
        raise IntegrityError("final assignment has the wrong length")
    values = list(trace.final_assignment)
    chunks = []
    for i in reversed(trace.events):
        if not 0 <= i < len(cnf.clauses):
            raise IntegrityError(f"trace names unknown clause {i}")
        c = cnf.clauses[i]
        chunks.append([int(values[v]) for v in c.variables])
        for v, val in zip(c.variables, c.falsifying()):
            values[v] = val
    out = []
    for chunk in reversed(chunks):
        out.extend(chunk)
    return tuple(values), out


def reconstruct_bits(cnf: Cnf, trace: ResampleTrace, verify: bool = True) -> list:
    """Recover the ``N * n`` resampling bits from the final assignment and clause sequence.

    With ``verify`` the recovered bits are fed back through :func:`solve`,
    which must reproduce the same trace, walk included.
    """
    initial, out = rewind(cnf, trace)
    if verify:
        src = ReplayBitSource([int(v) for v in initial] + out)
        again = solve(cnf, src, max_resamples=max(trace.resamples, 1))
        if again.trace != trace:
            raise IntegrityError("replaying the reconstructed bits does not reproduce the trace")
    return out


# --- walk code --------------------------------------------------------------------


class WalkEncodingError(ValueError):
    pass


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def root_width(cnf: Cnf) -> int:
    return max(1, _ceil_log2(len(cnf.clauses)))


def rank_width(cnf: Cnf) -> int:
    return _ceil_log2(cnf.max_neighborhood)


@dataclass(frozen=True)
class WalkReport:
    total_bits: int
    resamples: int
    roots: int
    ups: int
    downs: int
    rank_bits: int
    root_bits: int
    n: int
    var_count: int

    @property
    def resample_bits(self) -> int:
        """Random bits spent on resampling, ``N * n``."""
        return self.resamples * self.n

    @property
    def bound(self) -> int:
        """``N (n-1) + roots * root_bits``; holds whenever ``rank_bits <= n - 3``."""
        return self.resamples * (self.n - 1) + self.roots * self.root_bits

    @property
    def compresses(self) -> bool:
        """Walk code plus the final assignment is shorter than the resampling bits."""
        return self.total_bits + self.var_count < self.resample_bits

    def as_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(resample_bits=self.resample_bits, bound=self.bound, compresses=self.compresses)
        return d


def encode_walk(trace: ResampleTrace, cnf: Cnf, rank_bits: int | None = None):
    """Write the recursion walk as bits; return ``(bits, WalkReport)``.

    Inside a tree a step is ``0`` (down) or ``1`` plus a fixed-width neighbor
    rank (up). At the top level, a root is written as a fixed-width clause
    index. The decoder knows which case it is in from the stack depth.
    """
    if rank_bits is None:
        rank_bits = rank_width(cnf)
    rw = root_width(cnf)
    out = []
    depth = 0
    stack = []
    roots = ups = downs = 0
    for idx, step in enumerate(trace.walk):
        kind = step[0]
        if kind == ROOT:
            if depth:
                raise WalkEncodingError(f"step {idx}: root inside an open tree")
            out.append(format(step[1], f"0{rw}b"))
            stack.append(step[1])
            depth, roots = 1, roots + 1
        elif kind == UP:
            if not depth:
                raise WalkEncodingError(f"step {idx}: up step outside a tree")
            rank = step[1]
            parent = stack[-1]
            if not 0 <= rank < len(cnf.neighbor_lists[parent]):
                raise WalkEncodingError(f"step {idx}: rank {rank} is not a neighbor of clause {parent}")
            if rank >= 1 << rank_bits:
                raise WalkEncodingError(
                    f"step {idx}: neighbor rank {rank} overflows {rank_bits} bits (premise violated)")
            out.append("1" + (format(rank, f"0{rank_bits}b") if rank_bits else ""))
            stack.append(cnf.neighbor_lists[parent][rank])
            depth, ups = depth + 1, ups + 1
        elif kind == DOWN:
            if not depth:
                raise WalkEncodingError(f"step {idx}: down step outside a tree")
            out.append("0")
            stack.pop()
            depth, downs = depth - 1, downs + 1
        else:
            raise WalkEncodingError(f"step {idx}: unknown step {step!r}")
    bits = "".join(out)
    report = WalkReport(len(bits), roots + ups, roots, ups, downs, rank_bits, rw,
                        cnf.n, cnf.var_count)
    return bits, report


def decode_walk(bits: str, cnf: Cnf, rank_bits: int | None = None) -> tuple:
    if rank_bits is None:
        rank_bits = rank_width(cnf)
    rw = root_width(cnf)
    walk = []
    stack = []
    i = 0
    while i < len(bits):
        if not stack:
            if i + rw > len(bits):
                raise WalkEncodingError("truncated root field")
            c = int(bits[i:i + rw], 2)
            if c >= len(cnf.clauses):
                raise WalkEncodingError(f"root index {c} out of range")
            i += rw
            walk.append((ROOT, c))
            stack.append(c)
        elif bits[i] == "0":
            i += 1
            walk.append((DOWN,))
            stack.pop()
        else:
            if i + 1 + rank_bits > len(bits):
                raise WalkEncodingError("truncated rank field")
            rank = int(bits[i + 1:i + 1 + rank_bits], 2) if rank_bits else 0
            i += 1 + rank_bits
            lst = cnf.neighbor_lists[stack[-1]]
            if rank >= len(lst):
                raise WalkEncodingError(f"rank {rank} exceeds neighbor list of clause {stack[-1]}")
            walk.append((UP, rank))
            stack.append(lst[rank])
    return tuple(walk)


def walk_events(cnf: Cnf, walk: Sequence) -> tuple:
    """Clause sequence ``C_1 .. C_N`` implied by a walk."""
    stack = []
    events = []
    for step in walk:
        if step[0] == ROOT:
            stack.append(step[1])
            events.append(step[1])
        elif step[0] == UP:
            c = cnf.neighbor_lists[stack[-1]][step[1]]
            stack.append(c)
            events.append(c)
        else:
            stack.pop()
    return tuple(events)


# --- instance generation ------------------------------------------------------------


def random_cnf(var_count: int, n: int, max_neighbors: int, rng: np.random.Generator,
               attempts: int = 2000, clause_limit: int | None = None,
               positive_only: bool = False) -> Cnf:
    """Random n-uniform CNF where no clause has more than ``max_neighbors`` other neighbors.

    Candidate clauses are drawn uniformly and kept when they respect the
    bound; generation stops after ``attempts`` candidates or ``clause_limit``
    accepted clauses.
    """
    if n > var_count:
        raise ValueError("clause width exceeds variable count")
    clauses = []
    occurs = [[] for _ in range(var_count)]
    others = []
    for _ in range(attempts):
        if clause_limit is not None and len(clauses) >= clause_limit:
            break
        vs = rng.choice(var_count, size=n, replace=False)
        touched = set()
        for v in vs:
            touched.update(occurs[v])
        if len(touched) > max_neighbors or any(others[j] + 1 > max_neighbors for j in touched):
            continue
        pols = np.ones(n, dtype=bool) if positive_only else rng.integers(0, 2, size=n).astype(bool)
        idx = len(clauses)
        clauses.append(Clause(tuple((int(v), bool(p)) for v, p in zip(vs, pols))))
        for j in touched:
            others[j] += 1
        others.append(len(touched))
        for v in vs:
            occurs[v].append(idx)
    return Cnf(var_count, tuple(clauses), n)
