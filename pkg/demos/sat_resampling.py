"""Resampling a sparse CNF until it is satisfied, and why that must stop.

Every random bit the solver uses can be rebuilt from the final assignment
and the list of resampled clauses. The list itself, written as a walk over
the recursion tree, costs about n - 1 bits per resample while each
resample consumed n random bits; a long run would therefore compress
random data, which is impossible.
"""

import numpy as np

from compressarg.lll_sat import (BitSource, check_premise, encode_walk, parse_dimacs, random_cnf,
                                 reconstruct_bits, solve)

cnf = parse_dimacs("p cnf 4 2\n-1 2 4 0\n-2 3 -4 0")
src = BitSource(3)
res = solve(cnf, src)
print(f"two-clause example: satisfied by {[int(v) for v in res.assignment]} "
      f"after {res.trace.resamples} resamples")

rng = np.random.default_rng(0)
cnf = random_cnf(30, 5, 3, rng)
print(f"\nrandom 5-CNF: {len(cnf.clauses)} clauses over {cnf.var_count} variables, "
      f"premise {check_premise(cnf).as_dict()}")

for seed in range(5):
    src = BitSource(seed)
    res = solve(cnf, src, check=True)
    bits = reconstruct_bits(cnf, res.trace)
    code, rep = encode_walk(res.trace, cnf)
    print(f"  seed {seed}: N={rep.resamples:3d}  rebuilt {len(bits)} resample bits exactly="
          f"{bits == list(src.log[cnf.var_count:])}  walk {rep.total_bits} bits vs {rep.resample_bits}")


class Unlucky(BitSource):
    """A source that mostly emits zeros, to force long runs on positive clauses."""

    def _draw_block(self):
        return (self._rng.random(self.block) >= 0.995).astype(np.uint8)


cnf = random_cnf(25, 5, 3, rng, positive_only=True)
res = solve(cnf, Unlucky(1), max_resamples=500)
code, rep = encode_walk(res.trace, cnf)
print(f"\nunlucky source: N={rep.resamples} resamples ({rep.resample_bits} random bits), "
      f"walk {rep.total_bits} bits + final assignment {cnf.var_count} bits")
print(f"  the run is described in {rep.total_bits + cnf.var_count} bits: compresses={rep.compresses}")
