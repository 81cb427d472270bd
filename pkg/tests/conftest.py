import numpy as np
import pytest
from hypothesis import settings

from compressarg.lll_sat import BitSource

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

_ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


class BiasedBitSource(BitSource):
    """Bits that come up 0 with probability ``p_zero``; makes resampling unlucky on positive clauses."""

    def __init__(self, seed, p_zero=0.9):
        super().__init__(seed)
        self.p_zero = p_zero

    def _draw_block(self):
        return (self._rng.random(self.block) >= self.p_zero).astype(np.uint8)


def brute_force_models(cnf):
    """Boolean vector over all 2**V assignments (variable v is bit v of the index)."""
    V = cnf.var_count
    idx = np.arange(1 << V, dtype=np.uint32)
    bit = [((idx >> v) & 1).astype(bool) for v in range(V)]
    sat = np.ones(1 << V, dtype=bool)
    for c in cnf.clauses:
        ct = np.zeros(1 << V, dtype=bool)
        for v, p in c.literals:
            ct |= bit[v] if p else ~bit[v]
        sat &= ct
    return sat


def assignment_index(values):
    return sum(1 << v for v, b in enumerate(values) if b)


@pytest.fixture
def two_clause_cnf_text():
    return "p cnf 4 2\n-1 2 4 0\n-2 3 -4 0"
