"""
The digit transform and its large values
========================================

The normalized exponential sum over the set factorizes into one factor per
digit. Here we scan every ``a/10**6`` and look at how the sum is
distributed: a handful of frequencies carry most of the mass.
"""

# %%
import numpy as np

from rdlab import DigitSystem
from rdlab import fourier as fo

ds = DigitSystem.decimal(7)
F = fo.scan(ds, 6)
print("F(0) =", F[0], " mean F =", F.mean(), " max off zero =", F[1:].max())

# %%
# Product formula against the term-by-term sum at a few points.
for a in (1, 123, 4567, 314159):
    th = fo.Angle(6, a)
    print(a, fo.f_product(ds, 6, th), fo.f_direct(ds, 6, th))

# %%
# Growth of the l1 and 235/154-th moments with k.
for k in range(1, 7):
    l1 = fo.l1_sum(ds, k)
    mom = fo.moment_sum(ds, k, 235 / 154)
    print(f"k={k}  l1={l1.sum:10.4f} exp={l1.exponent:.4f}   moment={mom.sum:8.4f} exp={mom.exponent:.4f}")
print("targets", 27 / 77, 59 / 433)

# %%
# Frequencies where F is unusually large are rare.
for k in range(2, 7):
    e = fo.exceptional_set(ds, k)
    print(k, e.size, round(e.empirical_exponent, 4))

# %%
# Decay at a fixed rational point, F(1/3) over k.
d = fo.linf_decay(ds)
print(" ".join(f"{v:.2e}" for v in d.values), " c =", round(d.c, 4))

# %%
# Large-sieve sums over fractions a/q with q <= Q.
for Q in (10, 30, 100):
    r = fo.large_sieve_sum(ds, 6, Q)
    print(Q, r.terms, round(r.value, 4))
