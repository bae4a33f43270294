import math

import mpmath
import numpy as np
import pytest
from scipy.stats import qmc

from rdlab import buchstab as bs
from rdlab.errors import BudgetExhausted


@pytest.fixture(scope="module")
def omega():
    return bs.build_omega()


@pytest.fixture(scope="module")
def regions():
    return {r.name: r for r in bs.region_catalog()}


def mp_omega(u):
    """Closed forms of omega on [1, 3] at high precision."""
    mpmath.mp.dps = 30
    u = mpmath.mpf(u)
    if u <= 2:
        return 1 / u
    return (1 + mpmath.log(u - 1)) / u


class TestOmega:
    def test_first_interval_exact(self, omega):
        assert omega(1.5) == 2 / 3
        u = np.linspace(1, 2, 1001)
        assert np.allclose(omega(u), 1 / u, rtol=0, atol=1e-15)

    @pytest.mark.parametrize("u", [2.1, 2.5, 2.75, 2.9999])
    def test_second_interval(self, omega, u):
        assert abs(omega(u) - float(mp_omega(u))) <= 1e-7

    def test_closed_form_at_two_and_a_half(self, omega):
        assert abs(omega(2.5) - (1 + math.log(1.5)) / 2.5) <= 1e-7

    def test_flat_tail(self, omega):
        assert abs(omega(20.0) - omega(19.0)) <= 1e-5
        u = np.linspace(10, 20, 101)
        assert np.all(np.abs(omega(u) - math.exp(-np.euler_gamma)) <= 1e-4)

    def test_bounds(self, omega):
        u = np.linspace(1, 20, 20001)
        v = omega(u)
        assert np.all((v >= 0.5) & (v <= 1.0))

    def test_continuous_at_joins(self, omega):
        for j in (2.0, 3.0, 4.0):
            assert abs(omega(j - 1e-9) - omega(j + 1e-9)) < 1e-8

    def test_step_halving(self, omega):
        fine = bs.build_omega(h=5e-5)
        u = np.linspace(1, 20, 50001)
        assert np.max(np.abs(fine(u) - omega(u))) <= 1e-6

    def test_zero_below_one(self, omega):
        assert omega(np.array([0.5, 1.5]), zero_below_one=True).tolist() == [0.0, 2 / 3]
        with pytest.raises(ValueError):
            omega(0.5)
        with pytest.raises(ValueError):
            omega(25.0)

    def test_rejects_grid(self):
        with pytest.raises(ValueError):
            bs.build_omega(h=3e-4)
        with pytest.raises(ValueError):
            bs.build_omega(u_max=10)


class TestRegions:
    def test_default_theta(self):
        assert bs.DEFAULT_THETA == (0.36, 0.425, 50 / 77)

    def test_order_check(self):
        with pytest.raises(ValueError):
            bs.region_catalog(0.425, 0.36, 50 / 77)

    def test_i1_excludes_small_sums(self, regions, rng):
        pts = rng.uniform(0, 0.5, size=(10**5, 2))
        inside = regions["I1"].contains(pts)
        assert inside.any()
        assert np.all(pts[inside].sum(axis=1) > 1 - 0.36)

    def test_r1_rejects_large_u(self, regions):
        assert not regions["I3"].contains(np.array([0.40, 0.10, 0.09, 0.08]))[0]

    def test_r1_accepts_interior(self, regions):
        r = regions["I3"]
        # pair sums 0.49, 0.44, 0.43, 0.25, 0.24, 0.19 all avoid [0.36, 0.425]
        assert r.contains(np.array([0.34, 0.15, 0.10, 0.09]))[0]
        # u + t = 0.41 is forbidden
        assert not r.contains(np.array([0.34, 0.15, 0.10, 0.07]))[0]

    def test_r3_has_no_v_below_u(self, regions):
        cs = regions["I7"].constraints
        assert not any(c.coeffs == (-1.0, 1.0, 0.0, 0.0) and c.bound == 0 for c in cs)
        assert any(c.coeffs == (-1.0, 1.0, 0.0, 0.0) for c in regions["I3"].constraints)

    def test_omega_divisors(self, regions):
        assert regions["I3"].omega_divisor == 2
        assert regions["I4"].omega_divisor == 3
        assert regions["I7"].omega_divisor == 3

    def test_empty_region(self, omega):
        r = bs.RegionSpec("empty", 2, (bs._lt((1, 0), 0.1), bs._gt((1, 0), 0.2)), denominator_powers=(1, 2))
        assert r.is_empty()
        assert bs.integrate(r, omega, budget=10**4) == (0.0, 0.0)

    @pytest.mark.parametrize("name", ["I1", "I2", "I3", "I4", "I5", "I6", "I7"])
    def test_accepted_samples_satisfy_constraints(self, regions, name):
        r = regions[name]
        box = r.bounding_box()
        pts = box[:, 0] + (box[:, 1] - box[:, 0]) * qmc.Sobol(r.dimension, seed=3).random(1 << 17)
        acc = pts[r.contains(pts)][: 10**4]
        assert acc.shape[0] > 100
        for c in r.constraints:
            assert np.all(acc @ np.array(c.coeffs) < c.bound)
        for f in r.forbidden:
            s = acc[:, list(f.subset)].sum(axis=1)
            for lo, hi in f.intervals:
                assert not np.any((s >= lo) & (s <= hi))

    @pytest.mark.parametrize("name", ["I1", "I2", "I5", "I6"])
    def test_box_covers_region(self, regions, name, rng):
        r = regions[name]
        box = r.bounding_box()
        pts = rng.uniform(0, 1, size=(2 * 10**5, 2))
        inside = pts[r.contains(pts)]
        assert np.all(inside >= box[:, 0] - 1e-12) and np.all(inside <= box[:, 1] + 1e-12)


class TestIntegrate:
    def test_deterministic(self, regions, omega):
        a = bs.integrate(regions["I4"], omega, budget=2 * 10**5, seed=5)
        b = bs.integrate(regions["I4"], omega, budget=2 * 10**5, seed=5)
        assert a == b

    def test_quadrature_agrees(self, regions, omega):
        for name in ("I1", "I5"):
            mc, se = bs.integrate(regions[name], omega, budget=2 * 10**6)
            quad, err = bs.integrate(regions[name], omega, method="adaptive-iterated")
            assert err <= 1e-6
            assert abs(mc - quad) <= 3 * se + 1e-6

    def test_quadrature_needs_2d(self, regions, omega):
        with pytest.raises(ValueError):
            bs.integrate(regions["I3"], omega, method="adaptive-iterated")

    def test_unknown_method(self, regions, omega):
        with pytest.raises(ValueError):
            bs.integrate(regions["I1"], omega, method="simpson")

    @pytest.mark.parametrize("name", ["I3", "I4", "I7"])
    def test_budget_doubling(self, regions, omega, name):
        v1, e1 = bs.integrate(regions[name], omega, budget=10**6, seed=11)
        v2, e2 = bs.integrate(regions[name], omega, budget=2 * 10**6, seed=11)
        assert abs(v1 - v2) < 3 * max(e1, e2)

    def test_forbidden_monotonicity(self, regions, omega):
        r = regions["I4"]
        full, _ = bs.integrate(r, omega, budget=10**6, seed=2)
        relaxed, _ = bs.integrate(bs.without_forbidden(r), omega, budget=10**6, seed=2)
        assert relaxed >= full
        # same points, so the relaxed sum dominates sample by sample
        pts = qmc.Sobol(4, seed=0).random(1 << 14)
        box = r.bounding_box()
        pts = box[:, 0] + (box[:, 1] - box[:, 0]) * pts
        assert np.all(bs.without_forbidden(r).contains(pts) >= r.contains(pts))

    def test_i1_i2_values(self, regions, omega):
        i1, _ = bs.integrate(regions["I1"], omega, method="adaptive-iterated")
        i2, _ = bs.integrate(regions["I2"], omega, method="adaptive-iterated")
        assert abs(i1 - 0.02895) <= 5e-4
        assert abs(i2 - 0.42583) <= 2e-3


@pytest.fixture(scope="module")
def report():
    return bs.verify_margin(budget=2 * 10**6, seed=7)


class TestReport:
    def test_margin(self, report):
        assert report.total < 0.971 + 0.005
        assert report.margin > 0.02
        assert report.passed

    def test_record(self, report):
        rec = report.as_record()
        assert rec["names"] == [f"I{j}" for j in range(1, 8)]
        assert set(rec["quadrature"]) == {"I1", "I2", "I5", "I6"}
        assert rec["samples"] == 2**20
