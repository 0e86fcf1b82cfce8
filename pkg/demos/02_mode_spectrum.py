"""
Finite-n modes: singular values of the Toeplitz corner
=======================================================

n uses of the channel split into n independent pure-loss modes.  Their
transmissivities are the squared singular values of an n x n
lower-triangular Toeplitz matrix built from the coefficients.
"""

# %%
import numpy as np

from memcap import (
    ChannelParams,
    build_circulant,
    build_toeplitz,
    channel_coefficients,
    max_transmissivity,
    mode_transmissivities,
    singular_values,
)
from memcap.symbol import truncated_symbol

params = ChannelParams(0.5, 0.25)
coeffs = channel_coefficients(params)

# %%
T = build_toeplitz(coeffs, 6)
print(np.round(T.entries, 4))

# %% [markdown]
# No mode ever beats M, and as n grows the sorted transmissivities fill out
# the range of the symbol.

# %%
for n in (8, 64, 512):
    eta = mode_transmissivities(params, n)
    print(f"n={n:4d}  min={eta.min():.4f}  median={np.median(eta):.4f}  max={eta.max():.4f}")
print("M =", max_transmissivity(params))

# %% [markdown]
# The circulant cousin of a banded corner has singular values that are exactly
# |f_N| on the n-th roots of unity.  It differs from the banded Toeplitz
# matrix by a matrix of rank at most 2N, which is what makes the finite-n
# error bounds tractable.

# %%
n, N = 32, 4
C = build_circulant(coeffs, N, n)
samples = np.sort(np.abs(truncated_symbol(coeffs, N, 2 * np.pi * np.arange(n) / n)))
print("circulant vs samples:", np.max(np.abs(singular_values(C).values - samples)))

banded = np.tril(build_toeplitz(coeffs, n).entries) - np.tril(build_toeplitz(coeffs, n).entries, -N - 1)
diff = np.linalg.svd(C.entries - banded, compute_uv=False)
print("rank of difference:", int(np.sum(diff > 1e-10 * diff.max())), "<= 2N =", 2 * N)
