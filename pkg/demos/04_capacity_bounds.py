"""
Capacities with and without memory, asymptotic and at finite n
==============================================================
"""

# %%
import numpy as np

from memcap import ChannelParams, asymptotic_capacity, nshot_lower_bound, positive_q_region, pure_loss_capacity

# %% [markdown]
# Memory can only help.  At lam = 0.25 a memoryless fibre carries no qubits
# at all; enough memory switches quantum communication back on.

# %%
for mu in np.linspace(0, 0.8, 9):
    p = ChannelParams(0.25, float(mu))
    print(f"mu={mu:.1f}  Q={asymptotic_capacity(p, 'qubit'):.4f}  K={asymptotic_capacity(p, 'key'):.4f}"
          f"  positive Q: {positive_q_region(p)}")
print("memoryless key capacity:", pure_loss_capacity(0.25, "key"))

# %% [markdown]
# The n-shot lower bound is n Q - sqrt(n) C - penalty(eps).  The sqrt(n)
# term is large, so the bound stays at zero for a long while before the
# linear term wins.

# %%
p = ChannelParams(0.9, 0.3)
for n in (10**3, 10**5, 10**7, 10**9):
    b = nshot_lower_bound(p, n, eps=0.05, kind="key")
    print(f"n=1e{int(np.log10(n))}  lower={b.lower:.4g}  fraction of nQ: {b.lower / b.components.asymptotic_term:.3f}")
