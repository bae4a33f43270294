"""
Bounding the l1 sum with a transfer matrix
==========================================

Replacing each digit factor by its supremum over a window of ``J+1``
leading digits turns the l1 sum into a path sum on the de Bruijn graph of
``J``-digit words. Its growth rate is the Perron root of a sparse
``10**J x 10**J`` matrix, which power iteration certifies from both sides.
"""

# %%
import math

from rdlab import markov as mk

for J in (1, 2, 3, 4):
    r = mk.eigenvalue(7, J, 1.0)
    print(f"J={J}  lambda in [{r.lower_bound:.9f}, {r.upper_bound:.9f}]  iters={r.iterations}")

# %%
# Every excluded digit at J=4, for t=1 and t=235/154.
for a0 in range(10):
    r1 = mk.eigenvalue(a0, 4, 1.0)
    r2 = mk.eigenvalue(a0, 4, mk.MOMENT_T)
    print(a0, f"{r1.upper_bound:.7f}", f"{r2.upper_bound:.7f}")
print("bounds", mk.LAMBDA_L1_BOUND, mk.LAMBDA_MOMENT_BOUND)

# %%
# The windows must cover every frequency sharing the leading digits, which
# is a one-sided interval. A symmetric window is looser.
print("forward  ", mk.eigenvalue(4, 4, 1.0).upper_bound)
print("symmetric", mk.eigenvalue(4, 4, 1.0, window="symmetric").upper_bound)

# %%
# Path sums grow like C * lambda**k.
ps = mk.path_sums(7, 4, 1.0, 80)
lam = mk.eigenvalue(7, 4, 1.0).lam
for k in (10, 20, 40, 60, 80):
    print(k, ps[k - 1] / ps[k - 2], math.log(ps[k - 1]) - k * math.log(lam))
