"""Integers with restricted digits.

A :class:`DigitSystem` fixes a base ``q`` and a set of excluded digits. The
set it describes contains every nonnegative integer whose base-``q``
expansion uses none of the excluded digits; 0 (written as the single digit
0) is a member exactly when 0 is not excluded.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .errors import ResourceError, UnsupportedConfiguration

DEFAULT_CAP = 10**9

_SPEC_RE = re.compile(r"^q(\d+)-x(\d+(?:,\d+)*)$")


@dataclass(frozen=True)
class DigitSystem:
    base: int
    excluded: tuple[int, ...]

    def __post_init__(self):
        q = int(self.base)
        if q < 3:
            raise ValueError(f"base must be at least 3, got {q}")
        ex = tuple(sorted(int(d) for d in self.excluded))
        if len(set(ex)) != len(ex):
            raise ValueError(f"excluded digits must be unique: {self.excluded}")
        if any(d < 0 or d >= q for d in ex):
            raise ValueError(f"excluded digits must lie in [0, {q - 1}]")
        if not 1 <= len(ex) <= q - 2:
            raise ValueError("need 1 <= #excluded <= base - 2")
        object.__setattr__(self, "base", q)
        object.__setattr__(self, "excluded", ex)

    @classmethod
    def decimal(cls, a0: int) -> "DigitSystem":
        """Base 10 with the single digit ``a0`` excluded."""
        return cls(10, (a0,))

    @classmethod
    def parse(cls, text: str) -> "DigitSystem":
        """Parse the compact form ``q10-x7`` or ``q100-x0,1,2``."""
        m = _SPEC_RE.match(text.strip())
        if m is None:
            raise ValueError(f"cannot parse digit system {text!r}")
        return cls(int(m.group(1)), tuple(int(d) for d in m.group(2).split(",")))

    def __str__(self) -> str:
        return f"q{self.base}-x" + ",".join(str(d) for d in self.excluded)

    @property
    def s(self) -> int:
        return len(self.excluded)

    @property
    def allowed(self) -> tuple[int, ...]:
        ex = set(self.excluded)
        return tuple(d for d in range(self.base) if d not in ex)

    @property
    def a0(self) -> int:
        if self.s != 1:
            raise UnsupportedConfiguration("a0 is only defined when one digit is excluded")
        return self.excluded[0]

    @property
    def density_exponent(self) -> float:
        return math.log(self.base - self.s) / math.log(self.base)


def membership(ds: DigitSystem, n: int) -> bool:
    if n < 0:
        raise ValueError("n must be nonnegative")
    ex = set(ds.excluded)
    if n == 0:
        return 0 not in ex
    while n:
        n, d = divmod(n, ds.base)
        if d in ex:
            return False
    return True


def _num_digits(n: int, q: int) -> int:
    """Number of base-q digits of n >= 1."""
    L = 0
    while n:
        n //= q
        L += 1
    return L


def count(ds: DigitSystem, limit: int) -> int:
    """Exact ``#{0 <= n < limit : n in A}`` by a digit walk over ``limit``."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    q = ds.base
    allowed = ds.allowed
    r = len(allowed)
    lead = [d for d in allowed if d != 0]
    total = 1 if allowed[0] == 0 else 0  # the number 0
    if limit == 1:
        return total
    L = _num_digits(limit, q)
    # members with 1..L-1 digits
    for length in range(1, L):
        total += len(lead) * r ** (length - 1)
    # L-digit members below limit: walk the tight prefix
    digits = []
    n = limit
    while n:
        n, d = divmod(n, q)
        digits.append(d)
    digits.reverse()
    ok = set(allowed)
    for i, xd in enumerate(digits):
        choices = lead if i == 0 else allowed
        total += sum(1 for d in choices if d < xd) * r ** (L - 1 - i)
        if xd not in ok:
            break
    return total


def enumerate_members(ds: DigitSystem, limit: int, cap: int = DEFAULT_CAP) -> Iterator[int]:
    """Yield the members below ``limit`` in increasing order (odometer walk)."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if count(ds, limit) > cap:
        raise ResourceError(f"more than {cap} members below {limit}")
    return _odometer(ds, limit)


def _odometer(ds: DigitSystem, limit: int) -> Iterator[int]:
    q = ds.base
    allowed = ds.allowed
    lead = [d for d in allowed if d != 0]
    if allowed[0] == 0:
        yield 0
    L = 1
    while q ** (L - 1) < limit:
        # idx[i] indexes the digit at position i (least significant first);
        # the top position draws from ``lead``.
        idx = [0] * L
        tables = [allowed] * (L - 1) + [lead]
        powers = [q**i for i in range(L)]
        value = sum(tables[i][0] * powers[i] for i in range(L))
        while True:
            if value >= limit:
                return
            yield value
            i = 0
            while i < L:
                tab = tables[i]
                if idx[i] + 1 < len(tab):
                    value += (tab[idx[i] + 1] - tab[idx[i]]) * powers[i]
                    idx[i] += 1
                    break
                value -= (tab[idx[i]] - tab[0]) * powers[i]
                idx[i] = 0
                i += 1
            if i == L:
                break
        L += 1


def block_members(ds: DigitSystem, k: int) -> np.ndarray:
    """All ``n < q**k`` whose zero-padded k-digit expansion avoids the excluded set.

    These are the ``(q - s)**k`` integers the product formula sums over. When 0
    is an allowed digit this is exactly the member set below ``q**k``.
    """
    allowed = np.array(ds.allowed, dtype=np.int64)
    out = np.zeros(1, dtype=np.int64)
    p = 1
    for _ in range(k):
        out = (allowed[:, None] * p + out[None, :]).ravel()
        p *= ds.base
    return out


def members_array(ds: DigitSystem, limit: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Sorted int64 array of the members below ``limit``."""
    n = count(ds, limit)
    if n > cap:
        raise ResourceError(f"more than {cap} members below {limit}")
    if limit == 1:
        return np.zeros(n, dtype=np.int64)
    L = _num_digits(limit - 1, ds.base)
    if 0 in ds.allowed:
        arr = block_members(ds, L)
    else:
        arr = np.concatenate([block_members(ds, j) for j in range(1, L + 1)])
    arr = arr[arr < limit]
    assert arr.size == n
    return arr


class KappaConstants(NamedTuple):
    kappa: Fraction
    kappa2: Fraction


def kappa_constants(ds: DigitSystem) -> KappaConstants:
    """Density constants for members coprime to the base.

    ``kappa`` is the proportion of members coprime to ``q`` (at powers of
    ``q``) and ``kappa2 = q * kappa / phi(q)``. In base 10 with one excluded
    digit these are the two-case formulas; other bases use
    ``kappa2 = q (phi(q) - t) / (phi(q) (q - s))`` where ``t`` counts
    excluded digits coprime to ``q``.
    """
    q, s = ds.base, ds.s
    if q == 10 and s != 1:
        raise UnsupportedConfiguration("base-10 constants need exactly one excluded digit")
    phi = _totient(q)
    t = sum(1 for b in ds.excluded if math.gcd(b, q) == 1)
    kappa = Fraction(phi - t, q - s)
    return KappaConstants(kappa, Fraction(q) * kappa / phi)


def _totient(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
