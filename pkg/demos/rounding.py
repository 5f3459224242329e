"""
Emulated low precision: what binary16 storage does to numbers and to a
matrix, and why accumulation is done in binary32.
"""

import numpy as np

from mpid import BINARY16, BINARY32, SIMULATED_HALF, round_matrix, round_scalar
from mpid.matrix import col_norm2_ctx
from mpid.synth import gen_decay_matrix, profile, value_range

# unit round-off of each format
for fmt in (BINARY16, BINARY32):
    print(f"{fmt.name}: u = {fmt.unit_roundoff:.3e}, largest = {fmt.max_finite:.6g}, "
          f"smallest subnormal = {fmt.min_subnormal:.3e}")

# a few numbers through binary16
for x in (0.1, 1 / 3, 65504.0, 65520.0, 3e-8, 2.0 ** -25):
    print(f"fl16({x!r}) = {round_scalar(x, BINARY16)!r}")

# a fast-decay matrix: entries fit binary16, but small singular directions are lost
A = gen_decay_matrix(profile("fast", m=400, n=300))
AL = round_matrix(A, BINARY16)
s = np.linalg.svd(AL - A, compute_uv=False)
print(f"\nvalue range {value_range(A):.2e}")
print(f"||fl16(A) - A||_2 = {s[0]:.2e}  (sigma_k = k^-4 drops below this near k = {int(s[0] ** -0.25)})")

# sums of squares of small entries: fine in binary32, zero in binary16
col = np.full((1000, 1), 2.0 ** -13)
print(f"\nnorm of 1000 entries of 2^-13 under SimulatedHalf: {col_norm2_ctx(col, 0, SIMULATED_HALF):.6e}")
print(f"the same squares rounded to binary16: {round_scalar(2.0 ** -26, BINARY16)}")
