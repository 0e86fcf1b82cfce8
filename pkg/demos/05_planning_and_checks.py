"""
Planning a link and checking the machinery
==========================================
"""

# %%
from memcap import ChannelParams, uses_needed

# %% [markdown]
# How many channel uses guarantee 100 secret-key bits with error 0.05?

# %%
for mu in (0.0, 0.25, 0.5):
    n = uses_needed(ChannelParams(0.9, mu), eps=0.05, kind="key", target_k=100)
    print(f"mu={mu}: n = {n:,}")

# %% [markdown]
# More memory raises the capacity, yet the guarantee needs *more* uses: the
# constant in front of sqrt(n) grows like (1 - sqrt(mu))^-4 and dominates at
# these moderate targets.  For very large targets the ordering flips.

# %%
for mu in (0.0, 0.5):
    print(f"mu={mu}: n for 1e9 bits = {uses_needed(ChannelParams(0.9, mu), 0.05, 'key', 1e9):,}")

# %% [markdown]
# Every inequality the numbers rely on can be re-checked by brute force.
# The quick grid takes about a second; ``VerifyConfig.full()`` is the
# larger default grid.

# %%
from memcap.verify import VerifyConfig, run_all

reports = run_all(VerifyConfig.quick())
for r in reports[:8]:
    print(f"{r.check_name:22s} cases={r.cases_run:3d}  worst margin={r.worst_margin:.3g}  passed={r.passed}")
print("all passed:", all(r.passed for r in reports))

# %% [markdown]
# The same checks are exposed on the command line:
#
#     memcap verify --grid quick
#     memcap uses-needed --lambda 0.9 --mu 0.5 --task key --epsilon 0.05 --target-k 100
