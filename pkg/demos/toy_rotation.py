"""Strings close to one of their rotations are compressible.

Most random strings differ from every rotation of themselves in many
places. A string that nearly repeats with period k can be sent as k, its
first k bits, and the sparse XOR of the remainder with itself shifted.
"""

from fractions import Fraction

import numpy as np

from compressarg.toy import (compress_rotation, decompress_rotation, min_shift_distance,
                             random_bits, shift_test)

rng = np.random.default_rng(7)
n, eps = 256, Fraction(1, 10)

x = random_bits(n, rng)
w = min_shift_distance(x)
print(f"random {n}-bit string: closest rotation is shift {w.k} at distance {w.distance} "
      f"(eps*n = {float(eps * n):.1f})")

period = random_bits(32, rng)
y = list(period * 8)
for i in rng.choice(n, size=6, replace=False):
    y[i] = "1" if y[i] == "0" else "0"
y = "".join(y)
w = min_shift_distance(y)
code = compress_rotation(y, w, eps)
assert decompress_rotation(code.bits, n, eps) == y
print(f"period-32 string with 6 flips: shift {w.k}, distance {w.distance}")
print(f"  header {code.header_bits} + prefix {code.prefix_bits} + coded tail {code.tail_bits}"
      f" = {code.total_bits} bits (bound {code.bound:.1f}, plain {n})")

result = shift_test(n, eps, 100, seed=0)
print(f"\n{result['passed']}/100 random strings keep every rotation at distance >= eps*n")
