"""Sieves, primality, and prime statistics inside a restricted-digit set.

Two independent routes reach the same counts: members of the set are
enumerated and tested with a deterministic Miller-Rabin, while the oracle
side sieves ``[0, X)`` in segments and filters by digits.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .digitset import DigitSystem, count, kappa_constants, members_array
from .errors import ResourceError
from .fourier import Angle, ThetaLike, _split

PRIME_CAP = 10**8
SEGMENT = 1 << 18

# deterministic for every n < 2**64
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# deterministic for n < 3,215,031,751; int64 squaring is exact for n < 3.03e9
_MR_BASES_SMALL = (2, 3, 5, 7)
_VECTOR_LIMIT = 3_000_000_000


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit inputs."""
    if n < 2:
        return False
    for p in _MR_BASES_64:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES_64:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _powmod(base: int, e: np.ndarray, n: np.ndarray) -> np.ndarray:
    result = np.ones_like(n)
    b = np.full_like(n, base) % n
    e = e.copy()
    while np.any(e):
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * b % n, result)
        b = b * b % n
        e >>= 1
    return result


def is_prime_array(values) -> np.ndarray:
    """Vectorized Miller-Rabin for ``0 <= n < 3e9`` (bases 2, 3, 5, 7)."""
    n = np.asarray(values, dtype=np.int64)
    if n.size and int(n.max()) >= _VECTOR_LIMIT:
        raise ResourceError("vectorized primality is limited to n < 3e9")
    out = np.zeros(n.shape, dtype=bool)
    small = n < 64
    out[small] = [is_prime(int(v)) for v in n[small]]
    big = ~small
    m = n[big]
    if m.size == 0:
        return out
    cand = np.ones(m.shape, dtype=bool)
    for p in _MR_BASES_SMALL:
        cand &= m % p != 0
    m_c = m[cand]
    d = m_c - 1
    r = np.zeros_like(d)
    while True:
        even = (d & 1) == 0
        if not even.any():
            break
        d = np.where(even, d >> 1, d)
        r += even
    prime = np.ones(m_c.shape, dtype=bool)
    rmax = int(r.max()) if r.size else 0
    for a in _MR_BASES_SMALL:
        x = _powmod(a, d, m_c)
        ok = (x == 1) | (x == m_c - 1)
        for i in range(1, rmax):
            x = x * x % m_c
            ok |= (x == m_c - 1) & (i < r)
        prime &= ok
    res = np.zeros(m.shape, dtype=bool)
    res[np.flatnonzero(cand)] = prime
    out[big] = res
    return out


def simple_sieve(limit: int) -> np.ndarray:
    """Primes ``p < limit``."""
    if limit <= 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit - 1) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def segmented_primes(limit: int, segment: int = SEGMENT):
    """Yield arrays of the primes below ``limit``, one segment at a time."""
    if limit > PRIME_CAP:
        raise ResourceError(f"sieve limit {limit} exceeds {PRIME_CAP}")
    base = simple_sieve(math.isqrt(max(limit - 1, 0)) + 1)
    for lo in range(0, limit, segment):
        hi = min(lo + segment, limit)
        flags = np.ones(hi - lo, dtype=bool)
        if lo < 2:
            flags[: 2 - lo] = False
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            flags[start - lo :: p] = False
        yield lo + np.flatnonzero(flags).astype(np.int64)


def prime_pi(X: int) -> int:
    """Number of primes below ``X``."""
    return sum(int(seg.size) for seg in segmented_primes(X))


def _digit_filter(ds: DigitSystem, values: np.ndarray) -> np.ndarray:
    ok = np.ones(values.shape, dtype=bool)
    v = values.copy()
    ex = np.array(ds.excluded)
    while True:
        live = v > 0
        if not live.any():
            break
        ok &= ~(np.isin(v % ds.base, ex) & live)
        v //= ds.base
    ok &= ~((values == 0) & (0 in ds.excluded))
    return ok


def count_primes_in_A(ds: DigitSystem, X: int) -> int:
    """Primes below ``X`` inside the set, by enumeration and Miller-Rabin."""
    if count(ds, X) > PRIME_CAP:
        raise ResourceError(f"more than {PRIME_CAP} members below {X}")
    total = 0
    members = members_array(ds, X)
    for lo in range(0, members.size, 1 << 20):
        total += int(np.count_nonzero(is_prime_array(members[lo : lo + (1 << 20)])))
    return total


def count_primes_in_A_sieve(ds: DigitSystem, X: int) -> int:
    """Oracle for :func:`count_primes_in_A`: segmented sieve, then digit filter."""
    return sum(int(np.count_nonzero(_digit_filter(ds, seg))) for seg in segmented_primes(X))


@dataclass(frozen=True)
class PrimeRatioReport:
    digit_system: str
    X: int
    prime_count_in_A: int
    A_count: int
    kappa2: Fraction
    ratio: float

    def as_record(self) -> dict:
        return {
            "op": "primes",
            "digit_system": self.digit_system,
            "X": self.X,
            "prime_count_in_A": self.prime_count_in_A,
            "A_count": self.A_count,
            "kappa2": str(self.kappa2),
            "ratio": self.ratio,
            "definition": "ratio = #{p in A, p < X} * ln X / (kappa2 * #A)",
        }


def prime_ratio_report(ds: DigitSystem, X: int) -> PrimeRatioReport:
    k2 = kappa_constants(ds).kappa2
    primes = count_primes_in_A(ds, X)
    n = count(ds, X)
    ratio = primes * math.log(X) / (float(k2) * n)
    return PrimeRatioReport(str(ds), X, primes, n, k2, ratio)


@dataclass(frozen=True)
class TypeIDiscrepancy:
    digit_system: str
    X: int
    Q: int
    kappa: Fraction
    A_count: int
    total: float
    normalized: float

    def as_record(self) -> dict:
        return {
            "op": "typei",
            "digit_system": self.digit_system,
            "X": self.X,
            "Q": self.Q,
            "kappa": str(self.kappa),
            "A_count": self.A_count,
            "total": self.total,
            "normalized": self.normalized,
            "definition": "sum_{q<Q,(q,10)=1} |#{a in A: q|a, (a,10)=1} - kappa #A / q|",
        }


def type_i_discrepancy(ds: DigitSystem, X: int, Q: int) -> TypeIDiscrepancy:
    """Exact progression-count discrepancy of the members coprime to the base."""
    if X > PRIME_CAP:
        raise ResourceError(f"X must not exceed {PRIME_CAP}")
    if Q < 1 or Q > X ** (50 / 77) + 1e-9:
        raise ValueError("need 1 <= Q <= X^(50/77)")
    kappa = kappa_constants(ds).kappa
    members = members_array(ds, X)
    n = int(members.size)
    coprime = members[np.gcd(members, ds.base) == 1]
    terms = []
    for q in range(1, Q):
        if math.gcd(q, ds.base) != 1:
            continue
        c = int(np.count_nonzero(coprime % q == 0))
        terms.append(float(abs(Fraction(c) - kappa * n / q)))
    total = math.fsum(terms)
    return TypeIDiscrepancy(str(ds), X, Q, kappa, n, total, total / n)


def prime_exp_sum(X: int, theta: ThetaLike) -> float:
    """``|sum_{p < X} e(p theta)|`` over the segmented sieve."""
    num, den, off = _split(theta)
    re = im = 0.0
    for p in segmented_primes(X):
        if den * X < (1 << 62):
            frac = ((p * num) % den) / den
        else:
            frac = np.array([(int(v) * num) % den for v in p], dtype=float) / den
        phase = 2.0 * math.pi * (frac + (p * off) % 1.0)
        re += float(np.cos(phase).sum())
        im += float(np.sin(phase).sum())
    return math.hypot(re, im)


# ---------------------------------------------------------------------------
# golden fixtures

FIXTURE_ENV = "RDL_FIXTURES"


def fixtures_path() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(__file__).with_name("fixtures") / "golden.json"


def load_golden(path: str | os.PathLike | None = None) -> dict:
    with open(path or fixtures_path()) as fh:
        return json.load(fh)


def generate_golden(X: int = 10**7, digits=range(10)) -> dict:
    """Oracle counts per excluded digit; the content of ``golden.json``."""
    rows = {}
    for a0 in digits:
        ds = DigitSystem.decimal(a0)
        rows[str(ds)] = {"X": X, "prime_count_in_A": count_primes_in_A_sieve(ds, X), "A_count": count(ds, X)}
    return {
        "generator": f"python -m rdlab.primes --golden {X}",
        "method": "segmented sieve of [0, X) filtered by digits",
        "pi_X": prime_pi(X),
        "X": X,
        "counts": rows,
    }


if __name__ == "__main__":
    import argparse

    ap = argparse.ArgumentParser(description="regenerate the golden prime-count fixtures")
    ap.add_argument("--golden", type=float, default=1e7)
    ap.add_argument("--out", default=str(Path(__file__).with_name("fixtures") / "golden.json"))
    a = ap.parse_args()
    data = generate_golden(int(a.golden))
    Path(a.out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
