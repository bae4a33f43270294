"""
Primes with a missing digit
===========================

Counting primes below ``10**7`` that avoid one digit, by testing each
member directly and by an independent segmented sieve.
"""

# %%
import math

from rdlab import DigitSystem
from rdlab import primes as pr

for a0 in range(10):
    ds = DigitSystem.decimal(a0)
    r = pr.prime_ratio_report(ds, 10**6)
    print(f"{ds}: {r.prime_count_in_A:6d} primes of {r.A_count:6d} members, ratio {r.ratio:.4f}")

# %%
ds = DigitSystem.decimal(7)
print(pr.count_primes_in_A(ds, 10**6), pr.count_primes_in_A_sieve(ds, 10**6))
for k in range(3, 8):
    print(k, round(pr.prime_ratio_report(ds, 10**k).ratio, 4))

# %%
# Members in progressions: the Type I discrepancy shrinks relative to #A.
for X, Q in ((10**4, 10**2), (10**5, 300), (10**6, 10**3)):
    print(X, Q, pr.type_i_discrepancy(ds, X, Q).normalized)

# %%
# Exponential sums over primes are large at rationals with small denominator.
for th in (0, 0.5, 1 / 3, 0.1, math.sqrt(2) - 1):
    print(round(th, 6), round(pr.prime_exp_sum(10**6, th), 2))
