"""
Buchstab's function and the sieve-loss integrals
================================================

Buchstab's function solves ``(u omega(u))' = omega(u - 1)`` with
``omega(u) = 1/u`` on ``[1, 2]``. It feeds seven integrals whose total must
stay below 0.99.
"""

# %%
import math

import numpy as np

from rdlab import buchstab as bs

om = bs.build_omega()
for u in (1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 20.0):
    print(f"omega({u:4.1f}) = {om(u):.10f}")
print("limit exp(-gamma) =", math.exp(-np.euler_gamma))
print("closed form at 2.5:", (1 + math.log(1.5)) / 2.5)

# %%
# The seven regions, integrated by scrambled Sobol points. A modest budget
# keeps the demo quick; the acceptance run uses 2e7.
rep = bs.verify_margin(budget=2 * 10**6, seed=42)
for name, v, e, p in zip(rep.as_record()["names"], rep.values, rep.error_estimates, bs.REFERENCE_VALUES):
    q = rep.quadrature.get(name)
    extra = f" quad={q:.6f}" if q is not None else ""
    print(f"{name}: {v:.6f} +- {e:.1e}  (table {p}){extra}")
print("total", rep.total, "margin", rep.margin)

# %%
# Dropping the forbidden intervals can only enlarge a region.
r4 = bs.region_catalog()[3]
print(bs.integrate(r4, om, budget=10**6)[0], bs.integrate(bs.without_forbidden(r4), om, budget=10**6)[0])
