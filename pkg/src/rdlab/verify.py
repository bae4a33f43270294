"""End-to-end acceptance checks, shared by the test suite and ``rdlab verify-all``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import buchstab, fourier, markov, primes
from .digitset import DigitSystem

TRANSFORM_SYSTEMS = (
    "q10-x0", "q10-x1", "q10-x4", "q10-x7", "q10-x9",
    "q10-x0,7", "q10-x2,5,8", "q3-x1", "q7-x0,6", "q12-x5",
)

BAND_BELOW = 5e-3
BAND_ABOVE = 1e-3
TOTAL_BOUND = 0.976


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.name}"


def check_eigenvalues(tol: float = 1e-10) -> Check:
    rows = []
    ok = True
    for t, bound in ((1.0, markov.LAMBDA_L1_BOUND), (markov.MOMENT_T, markov.LAMBDA_MOMENT_BOUND)):
        for a0 in range(10):
            r = markov.eigenvalue(a0, 4, t, tol)
            good = r.upper_bound < bound and r.residual <= 1e-9
            ok &= good
            rows.append({"a0": a0, "t": t, "certified_upper": r.upper_bound, "bound": bound, "residual": r.residual})
    return Check(1, "eigenvalue certification (J=4, t=1 and 235/154)", ok, {"runs": rows})


def check_path_sum() -> Check:
    ps = markov.path_sums(7, 4, 1.0, 61)
    lam = markov.eigenvalue(7, 4, 1.0).lam
    ratio = ps[60] / ps[59]
    return Check(2, "path-sum ratio vs Perron root (a0=7)", abs(ratio - lam) <= 1e-3, {"ratio": ratio, "lambda": lam})


def check_integrals(budget: int = 2 * 10**7, seed: int = 42) -> Check:
    rep = buchstab.verify_margin(budget=budget, seed=seed)
    ok = rep.total < TOTAL_BOUND
    bands = []
    for name, v, p in zip([f"I{j}" for j in range(1, 8)], rep.values, buchstab.REFERENCE_VALUES):
        inside = p - BAND_BELOW <= v <= p + BAND_ABOVE
        ok &= inside
        bands.append({"name": name, "value": v, "reference": p, "inside": inside})
    agree = {}
    for j, name in enumerate(["I1", "I2", "I3", "I4", "I5", "I6", "I7"]):
        if name in rep.quadrature:
            diff = abs(rep.quadrature[name] - rep.values[j])
            agree[name] = {"quadrature": rep.quadrature[name], "diff": diff, "se": rep.error_estimates[j]}
            ok &= diff <= 3 * rep.error_estimates[j]
    return Check(3, "sieve-loss integral table", ok, {"total": rep.total, "bands": bands, "quadrature": agree, "report": rep.as_record()})


def check_omega() -> Check:
    om = buchstab.build_omega()
    a = om(1.5) == 2 / 3
    b = abs(om(2.5) - (1 + math.log(1.5)) / 2.5) <= 1e-7
    c = abs(om(20.0) - om(19.0)) <= 1e-5
    return Check(4, "Buchstab omega values", a and b and c, {"omega_1.5": om(1.5), "omega_2.5": om(2.5), "omega_20_minus_19": om(20.0) - om(19.0)})


def check_transform(seed: int = 1) -> Check:
    worst = 0.0
    for text in TRANSFORM_SYSTEMS:
        ds = DigitSystem.parse(text)
        k = 3
        Y = ds.base**k
        prod = fourier.scan(ds, k)
        direct = np.array([fourier.f_direct(ds, k, fourier.Angle(k, a, base=ds.base)) for a in range(Y)])
        worst = max(worst, float(np.abs(prod - direct).max()))
    rng = np.random.default_rng(seed)
    ds = DigitSystem.decimal(7)
    worst_mult = 0.0
    for _ in range(10**4):
        u = int(rng.integers(0, 8))
        v = int(rng.integers(0, 9 - u))
        a = int(rng.integers(0, 10**12))
        th = fourier.Angle(12, a)
        lhs = fourier.f_product(ds, u + v, th)
        rhs = fourier.f_product(ds, u, th) * fourier.f_product(ds, v, fourier.Angle(12, a * 10**u))
        worst_mult = max(worst_mult, abs(lhs - rhs))
    ok = worst <= 1e-10 and worst_mult <= 1e-12
    return Check(5, "product formula vs direct sum, multiplicativity", ok, {"max_product_direct": worst, "max_multiplicativity": worst_mult})


def check_moments() -> Check:
    ds = DigitSystem.decimal(7)
    l1 = fourier.l1_sum(ds, 6).exponent
    mom = fourier.moment_sum(ds, 6, markov.MOMENT_T).exponent
    exc = fourier.exceptional_set(ds, 6).empirical_exponent
    ok = l1 <= 27 / 77 + 0.02 and mom <= 59 / 433 + 0.03 and exc <= 23 / 40 + 0.05
    return Check(6, "moment exponents at k=6 (a0=7)", ok, {"l1_exponent": l1, "moment_exponent": mom, "exceptional_exponent": exc})


def check_prime_ratio() -> Check:
    golden = primes.load_golden()
    ok = True
    rows = []
    for a0 in (0, 7):
        ds = DigitSystem.decimal(a0)
        r = primes.prime_ratio_report(ds, 10**7)
        pinned = golden["counts"][str(ds)]
        good = 0.5 <= r.ratio <= 2.0 and r.prime_count_in_A == pinned["prime_count_in_A"] and r.A_count == pinned["A_count"]
        ok &= good
        rows.append({"digit_system": str(ds), "ratio": r.ratio, "primes": r.prime_count_in_A, "pinned": pinned["prime_count_in_A"]})
    return Check(7, "prime ratio band and golden counts at X=1e7", ok, {"runs": rows})


def check_type_i() -> Check:
    ds = DigitSystem.decimal(7)
    big = primes.type_i_discrepancy(ds, 10**6, 10**3).normalized
    small = primes.type_i_discrepancy(ds, 10**4, 10**2).normalized
    return Check(8, "Type I discrepancy decays with X", big < small, {"normalized_1e6": big, "normalized_1e4": small})


def run_all(budget: int = 2 * 10**7, seed: int = 42) -> list[Check]:
    return [
        check_eigenvalues(),
        check_path_sum(),
        check_integrals(budget, seed),
        check_omega(),
        check_transform(seed),
        check_moments(),
        check_prime_ratio(),
        check_type_i(),
    ]

