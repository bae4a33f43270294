"""Buchstab's function and the seven sieve-loss integrals.

``omega(u) = 1/u`` on ``[1, 2]`` and ``(u omega(u))' = omega(u - 1)`` beyond.
The integrals are over polytopes in ``(u, v)`` or ``(u, v, w, t)`` cut out by
affine inequalities and by "forbidden interval" conditions saying that some
partial sums of the variables avoid given intervals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import integrate as spi
from scipy.optimize import linprog
from scipy.stats import qmc

from .errors import BudgetExhausted

OMEGA_LIMIT = math.exp(-np.euler_gamma)
DEFAULT_THETA = (9 / 25, 17 / 40, 50 / 77)
REFERENCE_VALUES = (0.02895, 0.42583, 0.06810, 0.06622, 0.21879, 0.14998, 0.01303)
REPLICATES = 16


class OmegaTable:
    """Buchstab's function on a uniform grid with linear interpolation."""

    def __init__(self, u_max: float, h: float, values: np.ndarray):
        self.u_min = 1.0
        self.u_max = float(u_max)
        self.h = float(h)
        self.values = values
        self.grid = 1.0 + self.h * np.arange(values.size)

    def __call__(self, u, zero_below_one: bool = False):
        """Evaluate at ``u``; with ``zero_below_one`` arguments below 1 map to 0."""
        u = np.asarray(u, dtype=float)
        if np.any(u > self.u_max + 1e-12) or (not zero_below_one and np.any(u < 1.0)):
            raise ValueError(f"omega lookup outside [1, {self.u_max}]")
        out = np.interp(u, self.grid, self.values)
        if zero_below_one:
            out = np.where(u < 1.0, 0.0, out)
        return out if out.ndim else float(out)


def build_omega(u_max: float = 20.0, h: float = 1e-4) -> OmegaTable:
    """March ``u omega(u) = 1 + int_2^u omega(s - 1) ds`` by the trapezoid rule."""
    if h > 1e-3:
        raise ValueError("h must be at most 1e-3")
    if u_max < 16:
        raise ValueError("u_max must be at least 16")
    m = round(1.0 / h)
    if abs(m * h - 1.0) > 1e-12:
        raise ValueError("1/h must be an integer so the delay lands on grid points")
    n = math.ceil((u_max - 1.0) / h)
    u = 1.0 + h * np.arange(n + 1)
    w = np.empty(n + 1)
    w[: m + 1] = 1.0 / u[: m + 1]
    # the delayed values are always already known, so march one period at a time
    U = u[m] * w[m]
    for start in range(m + 1, n + 1, m):
        stop = min(start + m, n + 1)
        inc = 0.5 * h * (w[start - 1 - m : stop - 1 - m] + w[start - m : stop - m])
        Us = U + np.cumsum(inc)
        w[start:stop] = Us / u[start:stop]
        U = Us[-1]
    return OmegaTable(u[-1], h, w)


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Constraint:
    """``sum coeffs[i] * x[i] < bound``."""

    coeffs: tuple[float, ...]
    bound: float


@dataclass(frozen=True)
class Forbidden:
    """The sum of the variables in ``subset`` must avoid every interval."""

    subset: tuple[int, ...]
    intervals: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class RegionSpec:
    name: str
    dimension: int
    constraints: tuple[Constraint, ...]
    forbidden: tuple[Forbidden, ...] = ()
    denominator_powers: tuple[int, ...] = ()
    omega_divisor: int = 1
    theta: tuple[float, float, float] = DEFAULT_THETA

    def contains(self, x: np.ndarray) -> np.ndarray:
        """Membership mask for points given as rows of ``x``."""
        x = np.atleast_2d(x)
        ok = np.ones(x.shape[0], dtype=bool)
        for c in self.constraints:
            ok &= x @ np.asarray(c.coeffs) < c.bound
        for f in self.forbidden:
            s = x[:, list(f.subset)].sum(axis=1)
            for lo, hi in f.intervals:
                ok &= (s < lo) | (s > hi)
        return ok

    def integrand(self, x: np.ndarray, omega: OmegaTable) -> np.ndarray:
        """``omega((1 - sum x) / x[divisor]) / prod x**powers``."""
        x = np.atleast_2d(x)
        arg = (1.0 - x.sum(axis=1)) / x[:, self.omega_divisor]
        den = np.prod(x ** np.asarray(self.denominator_powers), axis=1)
        return omega(arg, zero_below_one=True) / den

    def bounding_box(self) -> np.ndarray:
        """Axis-aligned box of the affine constraints, shape ``(dimension, 2)``."""
        A = np.array([c.coeffs for c in self.constraints], dtype=float)
        b = np.array([c.bound for c in self.constraints], dtype=float)
        box = np.zeros((self.dimension, 2))
        bounds = [(0.0, 1.0)] * self.dimension
        for i in range(self.dimension):
            for side, sign in ((0, 1.0), (1, -1.0)):
                cost = np.zeros(self.dimension)
                cost[i] = sign
                res = linprog(cost, A_ub=A, b_ub=b, bounds=bounds, method="highs")
                if res.status == 2:
                    return np.zeros((self.dimension, 2))
                box[i, side] = res.x[i]
        return box

    def is_empty(self) -> bool:
        box = self.bounding_box()
        return bool(np.all(box[:, 1] - box[:, 0] <= 0))


def _lt(coeffs: Sequence[float], bound: float) -> Constraint:
    return Constraint(tuple(float(c) for c in coeffs), float(bound))


def _gt(coeffs: Sequence[float], bound: float) -> Constraint:
    return Constraint(tuple(-float(c) for c in coeffs), -float(bound))


def _chain4(low: float, upper_u: float | None) -> list[Constraint]:
    """``low < t < w < v`` plus ``v < u`` and ``u < upper_u`` when given."""
    cs = [
        _gt((0, 0, 0, 1), low),
        _lt((0, 0, -1, 1), 0),  # t < w
        _lt((0, -1, 1, 0), 0),  # w < v
    ]
    if upper_u is not None:
        cs += [_lt((-1, 1, 0, 0), 0), _lt((1, 0, 0, 0), upper_u)]
    return cs


def region_catalog(theta1: float = DEFAULT_THETA[0], theta2: float = DEFAULT_THETA[1], theta3: float = DEFAULT_THETA[2]) -> list[RegionSpec]:
    """The seven integration regions, in order I1..I7."""
    t1, t2, t3 = theta1, theta2, theta3
    if not (0 < t2 - t1 < t1 < t2 < 0.5 < t3 < 1):
        raise ValueError("need 0 < theta2 - theta1 < theta1 < theta2 < 1/2 < theta3 < 1")
    theta = (t1, t2, t3)
    d = t2 - t1
    mid = ((t1, t2),)
    two = dict(dimension=2, denominator_powers=(1, 2), omega_divisor=1, theta=theta)

    I1 = RegionSpec(
        "I1",
        constraints=(
            _gt((0, 1), d), _lt((-1, 1), 0), _lt((1, 0), t1),
            _lt((0.5, 1), 0.5),  # v < (1 - u)/2
            _gt((1, 1), 1 - t1),
        ),
        **two,
    )
    I2 = RegionSpec(
        "I2",
        constraints=(
            _gt((0, 1), d), _lt((-1, 1), 0), _lt((1, 0), t1),
            _gt((1, 2), t3), _lt((1, 2), 1),
            _gt((1, 1), t2), _lt((1, 1), 1 - t2),
        ),
        **two,
    )
    I5 = RegionSpec(
        "I5",
        constraints=(
            _gt((1, 0), t2), _lt((1, 0), 0.5),
            _gt((0, 1), d), _lt((0.5, 1), 0.5),
            _gt((1, 1), 1 - t1),
        ),
        **two,
    )
    I6 = RegionSpec(
        "I6",
        constraints=(
            _gt((1, 0), t2), _lt((1, 0), 0.5),
            _gt((0, 1), d), _lt((0.5, 1), 0.5),
            _gt((1, 2), t3), _lt((1, 2), 1),
            _gt((1, 1), t2), _lt((1, 1), 1 - t2),
        ),
        **two,
    )

    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    triples = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    common = [
        _lt((1, 2, 0, 0), t3),
        _lt((1, 1, 2, 0), 1),
        _lt((1, 1, 1, 2), 1),
        _gt((1, 1, 0, 0), t2), _lt((1, 1, 0, 0), 1 - t2),
    ]
    pair_rules = tuple(Forbidden(p, mid) for p in pairs)
    four = dict(dimension=4, denominator_powers=(1, 1, 1, 2), theta=theta)

    I3 = RegionSpec("I3", constraints=tuple(_chain4(d, t1) + common), forbidden=pair_rules, omega_divisor=2, **four)
    I4 = RegionSpec(
        "I4",
        constraints=tuple(_chain4(d, t1) + [_lt((1, 1, 0, 0), t1)]),
        forbidden=(Forbidden((0, 1, 2, 3), ((t1, t2), (1 - t2, 1 - t1))),)
        + tuple(Forbidden(s, mid) for s in triples),
        omega_divisor=3,
        **four,
    )
    I7 = RegionSpec(
        "I7",
        constraints=tuple(_chain4(d, None) + [_gt((1, 0, 0, 0), t2), _lt((1, 0, 0, 0), 0.5)] + common),
        forbidden=pair_rules,
        omega_divisor=3,
        **four,
    )
    return [I1, I2, I3, I4, I5, I6, I7]


# ---------------------------------------------------------------------------
# integration


def _qmc(region: RegionSpec, omega: OmegaTable, budget: int, seed: int, replicates: int = REPLICATES):
    box = region.bounding_box()
    width = box[:, 1] - box[:, 0]
    if np.any(width <= 0):
        return 0.0, 0.0, 0
    vol = float(np.prod(width))
    m = max(10, int(math.floor(math.log2(max(budget // replicates, 1)))))
    n = 1 << m
    chunk = 1 << 18
    seeds = np.random.SeedSequence(seed).spawn(replicates)
    estimates = np.empty(replicates)
    for r, ss in enumerate(seeds):
        eng = qmc.Sobol(region.dimension, scramble=True, seed=np.random.default_rng(ss))
        acc = 0.0
        for lo in range(0, n, chunk):
            pts = box[:, 0] + width * eng.random(min(chunk, n - lo))
            inside = region.contains(pts)
            if inside.any():
                acc += float(region.integrand(pts[inside], omega).sum())
        estimates[r] = vol * acc / n
    return float(estimates.mean()), float(estimates.std(ddof=1) / math.sqrt(replicates)), n * replicates


def _inner_intervals(region: RegionSpec, u: float) -> list[tuple[float, float]]:
    """Feasible v-intervals of a 2-dimensional region at fixed u."""
    lo, hi = 0.0, 1.0
    for c in region.constraints:
        cu, cv = c.coeffs
        rhs = c.bound - cu * u
        if cv > 0:
            hi = min(hi, rhs / cv)
        elif cv < 0:
            lo = max(lo, rhs / cv)
        elif rhs <= 0:
            return []
    pieces = [(lo, hi)] if hi > lo else []
    for f in region.forbidden:
        for a, b in f.intervals:
            if f.subset == (1,):
                a_v, b_v = a, b
            elif f.subset == (0, 1):
                a_v, b_v = a - u, b - u
            elif f.subset == (0,):
                if a <= u <= b:
                    return []
                continue
            else:
                raise ValueError("unsupported forbidden subset for 2-d quadrature")
            nxt = []
            for p, q in pieces:
                if a_v > p:
                    nxt.append((p, min(q, a_v)))
                if b_v < q:
                    nxt.append((max(p, b_v), q))
            pieces = [(p, q) for p, q in nxt if q > p]
    return pieces


def _breakpoints_u(region: RegionSpec, box: np.ndarray) -> list[float]:
    """u-values where two bounding lines of the inner interval cross."""
    lines = []
    for c in region.constraints:
        cu, cv = c.coeffs
        if cv != 0:
            lines.append((-cu / cv, c.bound / cv))  # v = slope*u + icpt
        elif cu != 0:
            lines.append(None)
            pts_u = c.bound / cu
            lines[-1] = ("u", pts_u)
    pts = set()
    sl = [ln for ln in lines if ln and ln[0] != "u"]
    for i in range(len(sl)):
        for j in range(i + 1, len(sl)):
            (a1, b1), (a2, b2) = sl[i], sl[j]
            if a1 != a2:
                pts.add((b2 - b1) / (a1 - a2))
    pts |= {ln[1] for ln in lines if ln and ln[0] == "u"}
    lo, hi = box[0]
    return sorted(p for p in pts if lo < p < hi)


def _quadrature(region: RegionSpec, omega: OmegaTable, tol: float = 1e-6, limit: int = 200):
    if region.dimension != 2:
        raise ValueError("adaptive-iterated quadrature is only offered for 2-d regions")
    box = region.bounding_box()
    if np.all(box[:, 1] - box[:, 0] <= 0):
        return 0.0, 0.0
    denom = region.denominator_powers
    div = region.omega_divisor

    def f(v, u):
        x = np.array([[u, v]])
        return float(region.integrand(x, omega)[0])

    inner_err = [0.0]

    def inner(u):
        total = 0.0
        for a, b in _inner_intervals(region, u):
            # kinks of omega at arguments 2 and 3: (1-u-v)/v = m -> v = (1-u)/(m+1)
            pts = [p for p in ((1 - u) / 3, (1 - u) / 4) if a < p < b] if div == 1 and denom == (1, 2) else None
            val, err = spi.quad(f, a, b, args=(u,), epsabs=tol / 10, epsrel=0, limit=limit, points=pts or None)
            inner_err[0] = max(inner_err[0], err)
            total += val
        return total

    points = _breakpoints_u(region, box)
    val, err = spi.quad(inner, box[0, 0], box[0, 1], epsabs=tol, epsrel=0, limit=limit, points=points or None)
    err = err + inner_err[0] * (box[0, 1] - box[0, 0])
    if err > tol:
        raise BudgetExhausted(f"{region.name}: quadrature error {err:.2e} exceeds {tol:.0e}")
    return float(val), float(err)


METHODS = ("quasi-mc", "adaptive-iterated")


def integrate(
    region: RegionSpec,
    omega: OmegaTable,
    method: str = "quasi-mc",
    budget: int = 2 * 10**7,
    seed: int = 42,
) -> tuple[float, float]:
    """Integrate the region's integrand; returns ``(value, error_estimate)``.

    ``quasi-mc`` averages 16 independently scrambled Sobol replicates over the
    region's bounding box and reports their standard error. The total number
    of points is the largest ``16 * 2**m`` not above ``budget``.
    ``adaptive-iterated`` nests adaptive Gauss-Kronrod rules (2-d only) to
    absolute tolerance 1e-6.
    """
    if method == "quasi-mc":
        value, err, _ = _qmc(region, omega, budget, seed)
        return value, err
    if method == "adaptive-iterated":
        return _quadrature(region, omega)
    raise ValueError(f"method must be one of {METHODS}")


@dataclass
class IntegralReport:
    theta: tuple[float, float, float]
    values: list[float]
    error_estimates: list[float]
    total: float
    margin: float
    method: str
    samples: int
    seed: int
    passed: bool
    quadrature: dict[str, float] = field(default_factory=dict)

    def as_record(self) -> dict:
        return {
            "op": "integrals",
            "theta": list(self.theta),
            "names": [f"I{j}" for j in range(1, 8)],
            "values": self.values,
            "error_estimates": self.error_estimates,
            "total": self.total,
            "margin": self.margin,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
            "pass": self.passed,
            "quadrature": self.quadrature,
            "definition": "sieve-loss integrals; pass = total + 3*sum(err) < 0.99",
        }


def verify_margin(
    theta: tuple[float, float, float] = DEFAULT_THETA,
    budget: int = 2 * 10**7,
    seed: int = 42,
    omega: OmegaTable | None = None,
    quadrature: bool = True,
) -> IntegralReport:
    """All seven integrals by quasi-Monte Carlo, plus quadrature for the 2-d ones."""
    omega = omega or build_omega()
    regions = region_catalog(*theta)
    values, errs, quad = [], [], {}
    samples = 0
    for j, region in enumerate(regions):
        v, e, n = _qmc(region, omega, budget, seed + j)
        values.append(v)
        errs.append(e)
        samples = max(samples, n)
        if quadrature and region.dimension == 2:
            quad[region.name] = _quadrature(region, omega)[0]
    total = float(sum(values))
    passed = total + 3 * sum(errs) < 0.99
    return IntegralReport(tuple(theta), values, errs, total, 1.0 - total, "quasi-mc", samples, seed, passed, quad)


def without_forbidden(region: RegionSpec) -> RegionSpec:
    return replace(region, forbidden=())
