"""The normalized exponential sum over a restricted-digit set.

For ``Y = q**k`` the transform is::

    F_Y(theta) = |sum_{n in A, n < Y} e(n theta)| / (q - s)**k

where the sum runs over the ``(q - s)**k`` zero-padded k-digit strings of
allowed digits. It factorizes over digits::

    F_Y(theta) = prod_{i=0}^{k-1} |sum_{d allowed} e(d q**i theta)| / (q - s)

which is what :func:`f_product` evaluates. :func:`f_direct` sums the
exponentials one by one and exists as an oracle for tests.

Frequencies are handled as ``num/den + offset`` so that rational points
``a/Y`` keep their exact digit shifts: the i-th factor only needs
``q**i * a mod Y``, which is integer arithmetic.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np

from .digitset import DigitSystem, block_members
from .errors import ResourceError, UnsupportedConfiguration

TWO_PI = 2.0 * math.pi
SINGULAR_CUTOFF = 1e-9
DIRECT_CAP = 10**8
_CHUNK = 1 << 15

_threads = os.cpu_count() or 1


def set_threads(n: int | None) -> None:
    """Cap the worker threads used by table builds (``None`` = all cores)."""
    global _threads
    _threads = max(1, n if n else (os.cpu_count() or 1))


@dataclass(frozen=True)
class Angle:
    """A frequency ``numerator / base**scale_exponent + offset`` taken mod 1."""

    scale_exponent: int
    numerator: int
    offset: float = 0.0
    base: int = 10

    def __post_init__(self):
        if self.scale_exponent < 0:
            raise ValueError("scale_exponent must be nonnegative")
        if not abs(self.offset) < 1:
            raise ValueError("offset must satisfy |offset| < 1")
        object.__setattr__(self, "numerator", int(self.numerator) % self.denominator)

    @property
    def denominator(self) -> int:
        return self.base**self.scale_exponent

    @property
    def rational(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return (self.numerator / self.denominator + self.offset) % 1.0


ThetaLike = Union[Angle, Fraction, int, float]


def _split(theta: ThetaLike) -> tuple[int, int, float]:
    if isinstance(theta, Angle):
        return theta.numerator, theta.denominator, float(theta.offset)
    if isinstance(theta, Fraction):
        return theta.numerator % theta.denominator, theta.denominator, 0.0
    if isinstance(theta, (int, np.integer)):
        return 0, 1, 0.0
    return 0, 1, float(theta) % 1.0


def _dirichlet(q: int, z: np.ndarray) -> np.ndarray:
    """sin(q z) / sin(z), with a series branch where sin(z) is tiny."""
    s = np.sin(z)
    small = np.abs(2.0 * s) < SINGULAR_CUTOFF
    safe = np.where(small, 1.0, s)
    out = np.sin(q * z) / safe
    if small.any():
        z2 = z * z
        q2 = q * q
        series = q - q * (q2 - 1) / 6.0 * z2 + q * (q2 - 1) * (3 * q2 - 7) / 360.0 * z2 * z2
        out = np.where(small, series, out)
    return out


def digit_factor(ds: DigitSystem, x) -> np.ndarray:
    """One normalized digit factor ``|sum_{d allowed} e(d x)| / (q - s)``.

    Written as the full geometric sum over all ``q`` digits minus the
    excluded terms, rotated by ``e(-(q-1) x / 2)`` so the geometric part is
    the real Dirichlet kernel. ``x`` is reduced to ``[-1/2, 1/2]`` first; the
    rotation is consistent with that reduction for every base.
    """
    x = np.asarray(x, dtype=float)
    xr = x - np.rint(x)
    q = ds.base
    re = _dirichlet(q, math.pi * xr)
    im = np.zeros_like(re)
    centre = (q - 1) / 2.0
    for b in ds.excluded:
        phi = TWO_PI * (b - centre) * xr
        re = re - np.cos(phi)
        im = im - np.sin(phi)
    return np.hypot(re, im) / (q - ds.s)


def _product(ds: DigitSystem, k: int, num, den, off) -> np.ndarray:
    """Vectorized product of the k digit factors at ``num/den + off``."""
    q = ds.base
    num = np.asarray(num)
    den = np.asarray(den)
    off = np.asarray(off, dtype=float)
    num, den, off = np.broadcast_arrays(num, den, off)
    if den.size and int(den.max()) >= (1 << 62) // q:
        num = num.astype(object)
        den = den.astype(object)
    else:
        num = num.astype(np.int64)
        den = den.astype(np.int64)
    out = np.ones(num.shape, dtype=float)
    r = num % den
    # centred offsets keep small perturbations at full relative precision
    o = off - np.rint(off)
    for _ in range(k):
        x = np.asarray(r / den, dtype=float) + o
        out *= digit_factor(ds, x)
        r = (r * q) % den
        o = o * q
        o = o - np.rint(o)
    return out


def f_product(ds: DigitSystem, k: int, theta: ThetaLike) -> float:
    """``F_{q^k}(theta)`` from the digit product formula."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    num, den, off = _split(theta)
    return float(_product(ds, k, num, den, off))


def transform(ds: DigitSystem, k: int, num, den, offset=0.0) -> np.ndarray:
    """Vectorized ``F_{q^k}(num/den + offset)`` over broadcast arrays."""
    return _product(ds, k, num, den, offset)


def scan(ds: DigitSystem, k: int, beta: float = 0.0) -> np.ndarray:
    """``F_Y(beta + a/Y)`` for every ``0 <= a < Y`` with ``Y = q**k``."""
    Y = ds.base**k
    out = np.empty(Y, dtype=float)
    for lo in range(0, Y, _CHUNK):
        a = np.arange(lo, min(lo + _CHUNK, Y), dtype=np.int64)
        out[lo : lo + a.size] = _product(ds, k, a, Y, beta)
    return out


def f_direct(ds: DigitSystem, k: int, theta: ThetaLike, cap: int = DIRECT_CAP) -> float:
    """Oracle: sum ``e(n theta)`` term by term over the k-digit strings."""
    size = (ds.base - ds.s) ** k
    if size > cap:
        raise ResourceError(f"(q-s)^k = {size} exceeds the direct-sum cap {cap}")
    num, den, off = _split(theta)
    n = block_members(ds, k)
    if ds.base**k * den < (1 << 62):
        frac = ((n * num) % den) / den
    else:
        frac = np.array([(int(v) * num) % den for v in n], dtype=float) / den
    phase = TWO_PI * (frac + (n * off) % 1.0)
    total = complex(np.cos(phase).sum(), np.sin(phase).sum())
    return abs(total) / size


# ---------------------------------------------------------------------------
# local suprema of one digit factor


WINDOWS = ("forward", "symmetric")


def _window(J: int, window: str) -> tuple[float, float]:
    h = 10.0 ** (-J - 1)
    if window == "forward":
        return 0.0, h
    if window == "symmetric":
        return -h, h
    raise ValueError(f"window must be one of {WINDOWS}")


def _golden_max(f, a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Row-wise golden-section search for a maximum of ``f`` on ``[a_i, b_i]``."""
    r = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - r * (b - a)
    x2 = a + r * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    while np.max(b - a) > tol:
        left = f1 > f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        n1 = b - r * (b - a)
        n2 = a + r * (b - a)
        x1, x2, f1, f2 = (
            np.where(left, n1, x2),
            np.where(left, x1, n2),
            np.where(left, f(n1), f2),
            np.where(left, f1, f(n2)),
        )
    return np.maximum(f1, f2)


def _sup_factor(ds: DigitSystem, lo: np.ndarray, hi: np.ndarray, n_coarse: int = 129, tol: float = 1e-12):
    """Max of ``digit_factor`` on each ``[lo_i, hi_i]``: grid scan, then golden section."""
    grid = np.linspace(0.0, 1.0, n_coarse)
    xs = lo[:, None] + (hi - lo)[:, None] * grid[None, :]
    vals = digit_factor(ds, xs)
    m = vals.argmax(axis=1)
    rows = np.arange(lo.size)
    best = vals[rows, m]
    a = xs[rows, np.maximum(m - 1, 0)]
    b = xs[rows, np.minimum(m + 1, n_coarse - 1)]
    return np.maximum(best, _golden_max(lambda x: digit_factor(ds, x), a, b, tol))


def _word_centres(J: int, words: np.ndarray) -> np.ndarray:
    """Word index ``W = sum t_j 10**j`` to the centre ``sum t_j 10**-(j+1)``."""
    c = np.zeros(words.shape, dtype=float)
    for j in range(J + 1):
        c += ((words // 10**j) % 10) * 10.0 ** (-j - 1)
    return c


def _check_markov_system(ds: DigitSystem, J: int) -> None:
    if ds.base != 10 or ds.s != 1:
        raise UnsupportedConfiguration("local suprema are defined for base 10 with one excluded digit")
    if J < 1:
        raise ValueError("J must be at least 1")


def g_sup(ds: DigitSystem, J: int, word, window: str = "forward") -> float:
    """Supremum of one digit factor over the frequencies sharing a digit window.

    ``word = (t_0, ..., t_J)`` fixes the first ``J + 1`` decimal digits of the
    frequency ``x = 0.t_0 t_1 ... t_J + gamma``. With ``window="forward"``
    the perturbation ranges over ``0 <= gamma <= 10**-(J+1)``, which covers
    every frequency with those leading digits; ``"symmetric"`` takes
    ``|gamma| <= 10**-(J+1)``.
    """
    _check_markov_system(ds, J)
    word = tuple(int(t) for t in word)
    if len(word) != J + 1 or any(t < 0 or t > 9 for t in word):
        raise ValueError("word must hold J+1 decimal digits")
    W = sum(t * 10**j for j, t in enumerate(word))
    lo, hi = _window(J, window)
    c = _word_centres(J, np.array([W]))
    return float(_sup_factor(ds, c + lo, c + hi)[0])


@lru_cache(maxsize=64)
def _g_table_cached(a0: int, J: int, window: str) -> np.ndarray:
    ds = DigitSystem.decimal(a0)
    lo, hi = _window(J, window)
    n = 10 ** (J + 1)
    chunk = 1 << 14
    starts = list(range(0, n, chunk))

    def work(start):
        W = np.arange(start, min(start + chunk, n), dtype=np.int64)
        c = _word_centres(J, W)
        return _sup_factor(ds, c + lo, c + hi)

    if _threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(_threads) as ex:
            parts = list(ex.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    out = np.concatenate(parts)
    out.setflags(write=False)
    return out


def g_table(a0: int, J: int, window: str = "forward") -> np.ndarray:
    """Suprema for every word, indexed by ``W = sum_j t_j 10**j`` (cached)."""
    _check_markov_system(DigitSystem.decimal(a0), J)
    _window(J, window)
    return _g_table_cached(int(a0), int(J), window)


# ---------------------------------------------------------------------------
# moment sums and related scans


def empirical_slope(x, y) -> float:
    """Least-squares slope of ``y`` against ``x`` over the last three points."""
    x = np.asarray(x, dtype=float)[-3:]
    y = np.asarray(y, dtype=float)[-3:]
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class MomentReport:
    digit_system: str
    k: int
    t: float
    sum: float
    log_ratio: float | None
    exponent: float | None

    def as_record(self) -> dict:
        return {
            "op": "moments" if self.t != 1 else "l1",
            "digit_system": self.digit_system,
            "k": self.k,
            "params": {"t": self.t},
            "value": self.sum,
            "log_ratio": self.log_ratio,
            "empirical_exponent": self.exponent,
            "samples": None,
            "definition": "sum_{a<Y} F_Y(a/Y)^t, exponent = log(sum)/log(Y)",
        }


def _moment(ds: DigitSystem, k: int, t: float) -> float:
    if k == 0:
        return 1.0
    return float(np.sum(scan(ds, k) ** t))


def moment_sum(ds: DigitSystem, k: int, t: float) -> MomentReport:
    """``sum_{a < Y} F_Y(a/Y)**t`` with its growth diagnostics."""
    if t <= 0:
        raise ValueError("t must be positive")
    if k < 0:
        raise ValueError("k must be nonnegative")
    total = _moment(ds, k, t)
    if k == 0:
        return MomentReport(str(ds), 0, float(t), total, None, None)
    prev = _moment(ds, k - 1, t)
    return MomentReport(
        str(ds),
        k,
        float(t),
        total,
        math.log(total / prev),
        math.log(total) / (k * math.log(ds.base)),
    )


def l1_sum(ds: DigitSystem, k: int) -> MomentReport:
    return moment_sum(ds, k, 1.0)


class ExceptionalSet(NamedTuple):
    size: int
    empirical_exponent: float | None


def exceptional_set(ds: DigitSystem, k: int, threshold_exponent: float = 23 / 80) -> ExceptionalSet:
    """Count the ``a < Y`` with ``F_Y(a/Y) >= Y**-threshold_exponent``."""
    F = scan(ds, k)
    cut = float(ds.base) ** (-threshold_exponent * k)
    size = int(np.count_nonzero(F >= cut))
    exponent = math.log(size) / (k * math.log(ds.base)) if k > 0 else None
    return ExceptionalSet(size, exponent)


LS_MAX_EVALUATIONS = 5 * 10**8


@dataclass(frozen=True)
class LargeSieveReport:
    digit_system: str
    k: int
    Q: int
    beta: float
    eta_samples: int
    terms: int
    value: float
    points_per_term: int = 0

    def as_record(self) -> dict:
        return {
            "op": "largesieve",
            "digit_system": self.digit_system,
            "k": self.k,
            "params": {"Q": self.Q, "beta": self.beta},
            "value": self.value,
            "empirical_exponent": None,
            "samples": self.eta_samples,
            "points_per_term": self.points_per_term,
            "terms": self.terms,
            "definition": "sum_{q<=Q} sum_{(a,q)=1, 1<=a<=q} max_eta F_Y(a/q+beta+eta), |eta|<1/(10Q^2); "
            "samples = eta points per 1/Y interval",
        }


def _reduced_fractions(Q: int) -> tuple[np.ndarray, np.ndarray]:
    nums, dens = [], []
    for q in range(1, Q + 1):
        a = np.arange(1, q + 1, dtype=np.int64)
        a = a[np.gcd(a, q) == 1]
        nums.append(a)
        dens.append(np.full(a.size, q, dtype=np.int64))
    return np.concatenate(nums), np.concatenate(dens)


def large_sieve_sum(
    ds: DigitSystem, k: int, Q: int, beta: float = 0.0, eta_samples: int = 33, refine: bool = True
) -> LargeSieveReport:
    """Sum over reduced fractions of the sampled local maximum of ``F_Y``.

    ``F_Y`` oscillates on the scale ``1/Y``, so the supremum over
    ``|eta| < 1/(10 Q**2)`` is taken over an equally spaced grid with
    ``eta_samples`` points per interval of length ``1/Y`` (and never fewer
    than ``eta_samples`` points in total). With ``refine`` the best grid
    point's bracket is then searched by golden section down to ``1e-3 / Y``.
    """
    if Q < 1:
        raise ValueError("Q must be positive")
    if Q * Q > 10**6:
        raise ResourceError("Q^2 must not exceed 10^6")
    if eta_samples < 3:
        raise ValueError("eta_samples must be at least 3")
    Y = float(ds.base) ** k
    w = 1.0 / (10.0 * Q * Q)
    n_pts = max(eta_samples, math.ceil(eta_samples * 2 * w * Y))
    n_pts += 1 - n_pts % 2  # odd, so eta = 0 is a grid point
    nums, dens = _reduced_fractions(Q)
    if n_pts * nums.size * max(k, 1) > LS_MAX_EVALUATIONS:
        raise ResourceError(f"{n_pts * nums.size} evaluations exceed the large-sieve budget")
    etas = np.linspace(-w, w, n_pts + 2)[1:-1]
    rows_per = max(1, _CHUNK // n_pts)
    cols_per = min(n_pts, _CHUNK)
    parts = []
    for lo in range(0, nums.size, rows_per):
        n = nums[lo : lo + rows_per]
        d = dens[lo : lo + rows_per]
        best = np.full(n.size, -1.0)
        arg = np.zeros(n.size, dtype=np.int64)
        for c0 in range(0, n_pts, cols_per):
            F = _product(ds, k, n[:, None], d[:, None], beta + etas[None, c0 : c0 + cols_per])
            m = F.argmax(axis=1)
            v = F[np.arange(n.size), m]
            better = v > best
            best = np.where(better, v, best)
            arg = np.where(better, m + c0, arg)
        if refine:
            a = etas[np.maximum(arg - 1, 0)]
            b = etas[np.minimum(arg + 1, n_pts - 1)]
            peak = _golden_max(lambda e: _product(ds, k, n, d, beta + e), a, b, 1e-3 / Y)
            best = np.maximum(best, peak)
        parts.append(best)
    total = float(np.sum(np.concatenate(parts)))
    return LargeSieveReport(str(ds), k, Q, float(beta), eta_samples, int(nums.size), total, n_pts)


def large_sieve_exponent(ds: DigitSystem, k: int, Qs, beta: float = 0.0, eta_samples: int = 33) -> float:
    """Least-squares slope of ``log(sum)`` against ``log Q``."""
    vals = [large_sieve_sum(ds, k, Q, beta, eta_samples).value for Q in Qs]
    return empirical_slope(np.log(Qs), np.log(vals))


class LinfDecay(NamedTuple):
    ks: tuple[int, ...]
    values: tuple[float, ...]
    c: float


def linf_decay(ds: DigitSystem, numerator: int = 1, denominator: int = 3, ks=range(1, 13)) -> LinfDecay:
    """``F_{q^k}(numerator/denominator)`` for each k and the largest decay constant.

    ``c`` is the largest value with ``F <= exp(-c k log q / log denominator)``
    at every k sampled.
    """
    ks = tuple(int(k) for k in ks)
    theta = Fraction(numerator, denominator)
    vals = tuple(f_product(ds, k, theta) for k in ks)
    scale = math.log(ds.base) / math.log(denominator)
    c = min(-math.log(v) / (k * scale) for k, v in zip(ks, vals))
    return LinfDecay(ks, vals, c)


class BaseQFactor(NamedTuple):
    value: float
    exponent: float
    within_threshold: bool


L1_THRESHOLD = 23 / 80


def base_q_l1_factor(q: int, s: int, interval_mode: bool = False, eps: float = 1e-3) -> BaseQFactor:
    """Per-digit growth factor of the large-base l1 bound.

    General excluded sets give ``(q log q + q s) / (q - s)``; an initial or
    final block of excluded digits gives ``(q log q + q - s) / (q - s)``.
    ``within_threshold`` reports whether the factor is at most
    ``q**(23/80 + eps)``, i.e. whether the l1 sum is ``O(Y**(23/80 + eps))``
    with unit constant.
    """
    if not 1 <= s <= q - 2:
        raise ValueError("need 1 <= s <= q - 2")
    if interval_mode:
        value = (q * math.log(q) + q - s) / (q - s)
    else:
        value = (q * math.log(q) + q * s) / (q - s)
    exponent = math.log(value) / math.log(q)
    return BaseQFactor(value, exponent, exponent <= L1_THRESHOLD + eps)
