"""Counting allowed strings with the inverse of 1 - m x + sum a_j x^j.

When that polynomial has a positive root, the coefficients of its inverse
are positive and bound the number of allowed strings from below.
"""

from compressarg.avoidance import ForbiddenSet
from compressarg.series import check_piontkovsky, count_allowed, denominator, invert

for m, words in ((2, ["000"]), (2, ["00", "11"]), (3, ["00", "11", "22", "012"])):
    fs = ForbiddenSet.from_strings(m, words)
    A = denominator(fs, 12)
    g = [int(c) if c.denominator == 1 else float(c) for c in invert(A, 12).coeffs]
    s = count_allowed(fs, 12)
    rep = check_piontkovsky(fs, 200)
    print(f"m={m} F={words}")
    print(f"  g: {g}")
    print(f"  s: {s}")
    if rep.has_root:
        print(f"  smallest positive root ~ {rep.root.root:.12f}; g_n > 0 up to n=200, s_n >= g_n: "
              f"{all(a >= b for a, b in zip(s, g))}")
    else:
        print(f"  no positive root; first g_n <= 0 at n={rep.first_nonpositive}")
