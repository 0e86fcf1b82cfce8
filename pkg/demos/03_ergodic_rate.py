"""
How fast do singular-value averages converge?
=============================================

For a Lipschitz test function F the average (1/n) sum F(s_j) tends to the
symbol integral.  ``ap_error_bound`` gives an explicit rate; here we watch
the real error sit under it.
"""

# %%
from memcap import ChannelParams, ergodic_report, optimal_band, step_bounds

params = ChannelParams(0.9, 0.5)

for n in (16, 64, 256, 1024):
    r = ergodic_report(params, "ebit", n)
    print(f"n={n:5d}  error={r.empirical_error:.2e}  bound={r.theoretical_bound:.2e}  ok={r.bound_respected}")

# %% [markdown]
# The bound is the optimised sum of four pieces; the band half-width
# N = floor(n^(1/(k + 3/2))) balances them.  Any other N gives a valid but
# usually looser total.

# %%
from memcap import capped_test_function, channel_coefficients, derivative_l2_norm

F = capped_test_function(params, "ebit")
coeffs = channel_coefficients(params)
norms = (F.lipschitz_L, derivative_l2_norm(coeffs, 2), derivative_l2_norm(coeffs, 0), F.derivative_l1, F.sup_norm)
n = 4096
best = optimal_band(n, 2)
for N in (1, best, 4 * best):
    b = step_bounds(n, N, 2, *norms)
    print(f"N={N:3d}  c1={b.c1:.3g}  c2={b.c2:.3g}  c3={b.c3:.3g}  total={b.total:.3g}")
