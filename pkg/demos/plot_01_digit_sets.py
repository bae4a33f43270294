"""
Counting integers with a missing digit
======================================

Members of a restricted-digit set thin out like ``X**(log 9 / log 10)``.
Exact counts come from a digit walk, so even ``X = 10**18`` is instant.
"""

# %%
import math

import numpy as np

from rdlab import DigitSystem, count, enumerate_members, kappa_constants

ds = DigitSystem.decimal(7)
print(ds, list(enumerate_members(ds, 30)))

# %%
# The counting function at powers of ten is exactly 9**k.
for k in (3, 6, 9, 12, 18):
    n = count(ds, 10**k)
    print(f"k={k:2d}  #A={n:>22d}  9^k={9**k:>22d}")

# %%
# Between powers of ten the count is still exact; its local exponent
# hovers around log 9 / log 10.
X = np.unique(np.logspace(2, 15, 14).astype(np.int64))
for x in X:
    n = count(ds, int(x))
    print(f"X={x:>16d}  #A={n:>14d}  log#A/logX={math.log(n) / math.log(x):.4f}")
print("density exponent", ds.density_exponent)

# %%
# Members coprime to 10 make up a fixed fraction of the set.
for a0 in (0, 1, 5, 7):
    print(a0, kappa_constants(DigitSystem.decimal(a0)))
