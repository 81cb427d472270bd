"""A matrix with a large constant minor is cheap to describe.

Plant a monochromatic k x k minor in a random n x n matrix, find it again,
and write the matrix as the minor's coordinates plus the other bits. Then
count, over every small matrix, how many have such a minor and compare
with the union bound that the counting argument uses.
"""

import numpy as np

from compressarg.toy import (BitMatrix, compress_minor, count_bad_matrices, decompress_minor,
                             find_monochromatic_minor, minor_code_length)

rng = np.random.default_rng(1)
n, k = 12, 6
bits = rng.integers(0, 2, size=(n, n))
rows = np.sort(rng.choice(n, k, replace=False))
cols = np.sort(rng.choice(n, k, replace=False))
bits[np.ix_(rows, cols)] = 1
M = BitMatrix(bits)

w = find_monochromatic_minor(M, k)
print(f"{n}x{n} matrix, planted {k}x{k} block of ones at rows {rows.tolist()} cols {cols.tolist()}")
print(f"found: rows {list(w.rows)} cols {list(w.cols)} color {w.color}")

code = compress_minor(M, w, k)
assert decompress_minor(code, n, k) == M
print(f"description: {len(code)} bits instead of {n * n} (saving {n * n - len(code)})")

print("\nthe saving only shows once k^2 outgrows 2k log n + 1:")
for n_, k_ in [(4, 2), (16, 6), (256, 30), (1024, 60)]:
    print(f"  n={n_:5d} k={k_:3d}: {minor_code_length(n_, k_):8d} bits vs {n_ * n_:8d}")

print("\nexhaustive counts of matrices with a constant k x k minor:")
for n_ in range(2, 6):
    for k_ in range(2, n_ + 1):
        c = count_bad_matrices(n_, k_)
        print(f"  n={n_} k={k_}: {c.exact_count:9d} of {c.total:9d}   union bound {c.union_bound}")
