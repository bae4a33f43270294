import json
import math

import numpy as np
import pytest

from rdlab import DigitSystem, count, membership
from rdlab import fourier as fo
from rdlab import primes as pr
from rdlab.errors import ResourceError

D7 = DigitSystem.decimal(7)
D0 = DigitSystem.decimal(0)


@pytest.fixture(scope="module")
def sieve_1e6():
    return pr.simple_sieve(10**6)


class TestPrimality:
    def test_scalar_vs_sieve(self, sieve_1e6):
        flags = np.zeros(10**5, dtype=bool)
        flags[sieve_1e6[sieve_1e6 < 10**5]] = True
        assert all(pr.is_prime(n) == flags[n] for n in range(10**5))

    def test_vector_vs_sieve(self, sieve_1e6):
        flags = np.zeros(10**6, dtype=bool)
        flags[sieve_1e6] = True
        assert np.array_equal(pr.is_prime_array(np.arange(10**6)), flags)

    def test_vector_vs_scalar_large(self, rng):
        xs = rng.integers(2_000_000_000, pr._VECTOR_LIMIT, size=3000)
        assert pr.is_prime_array(xs).tolist() == [pr.is_prime(int(x)) for x in xs]

    @pytest.mark.parametrize("n,expected", [
        (2**61 - 1, True), (2**64 - 59, True), (2**64 - 1, False),
        (3215031751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (561, False), (1105, False), (3825123056546413051, False),
        (999999999989, True),
    ])
    def test_known_values(self, n, expected):
        assert pr.is_prime(n) is expected

    def test_vector_limit(self):
        with pytest.raises(ResourceError):
            pr.is_prime_array([pr._VECTOR_LIMIT])


class TestSieve:
    def test_segmented_matches_simple(self, sieve_1e6):
        seg = np.concatenate(list(pr.segmented_primes(10**6, segment=12345)))
        assert np.array_equal(seg, sieve_1e6)

    def test_pi(self):
        assert pr.prime_pi(10**6) == 78498
        assert pr.prime_pi(2) == 0
        assert pr.prime_pi(3) == 1

    def test_cap(self):
        with pytest.raises(ResourceError):
            next(pr.segmented_primes(10**9))


class TestCounts:
    def test_hand_values(self):
        assert pr.count_primes_in_A(D7, 10) == 3
        assert pr.count_primes_in_A(D0, 100) == pr.count_primes_in_A_sieve(D0, 100) == 25

    @pytest.mark.parametrize("text", ["q10-x0", "q10-x1", "q10-x7", "q10-x0,7", "q10-x2,5,8", "q3-x1", "q7-x0,6", "q12-x5"])
    def test_enumeration_vs_sieve(self, text):
        ds = DigitSystem.parse(text)
        for X in (1000, 123457, 10**6):
            a = pr.count_primes_in_A(ds, X)
            assert a == pr.count_primes_in_A_sieve(ds, X)
            assert a <= min(pr.prime_pi(X), count(ds, X))

    def test_golden_enumeration(self):
        g = pr.load_golden()
        assert g["pi_X"] == 664579
        assert "generator" in g
        row = g["counts"][str(D7)]
        assert pr.count_primes_in_A(D7, row["X"]) == row["prime_count_in_A"]
        assert count(D7, row["X"]) == row["A_count"] == 9**7

    def test_golden_generator(self):
        small = pr.generate_golden(10**5, digits=[3, 7])
        for a0 in (3, 7):
            ds = DigitSystem.decimal(a0)
            assert small["counts"][str(ds)]["prime_count_in_A"] == pr.count_primes_in_A(ds, 10**5)

    def test_fixture_override(self, tmp_path, monkeypatch):
        path = tmp_path / "g.json"
        path.write_text(json.dumps({"counts": {}, "marker": 1}))
        monkeypatch.setenv(pr.FIXTURE_ENV, str(path))
        assert pr.fixtures_path() == path
        assert pr.load_golden()["marker"] == 1


class TestRatio:
    @pytest.mark.parametrize("a0", [0, 1, 7])
    def test_band(self, a0):
        r = pr.prime_ratio_report(DigitSystem.decimal(a0), 10**6)
        assert 0.5 <= r.ratio <= 2.0
        assert r.kappa2 == (pr.kappa_constants(DigitSystem.decimal(a0)).kappa2)

    def test_trend(self):
        small = pr.prime_ratio_report(D7, 10**4).ratio
        big = pr.prime_ratio_report(D7, 10**7).ratio
        assert abs(big - 1) <= abs(small - 1)

    def test_record(self):
        rec = pr.prime_ratio_report(D7, 10**4).as_record()
        assert rec["kappa2"] == "5/6"
        assert "definition" in rec


class TestTypeI:
    def test_single_term_vanishes_at_power(self):
        # Q=3: q=1 is the only modulus coprime to 10
        assert pr.type_i_discrepancy(D7, 10**3, 3).total == 0.0
        assert pr.type_i_discrepancy(D0, 10**4, 2).total == 0.0

    def test_even_moduli_skipped(self):
        a = pr.type_i_discrepancy(D7, 10**4, 3).total
        b = pr.type_i_discrepancy(D7, 10**4, 2).total
        assert a == b

    def test_matches_naive(self):
        X, Q = 10**4, 30
        r = pr.type_i_discrepancy(D7, X, Q)
        members = [n for n in range(X) if membership(D7, n)]
        kappa = float(pr.kappa_constants(D7).kappa)
        naive = sum(
            abs(sum(1 for a in members if a % q == 0 and math.gcd(a, 10) == 1) - kappa * len(members) / q)
            for q in range(1, Q)
            if math.gcd(q, 10) == 1
        )
        assert r.total == pytest.approx(naive, rel=1e-12)

    def test_decay(self):
        big = pr.type_i_discrepancy(D7, 10**6, 10**3).normalized
        small = pr.type_i_discrepancy(D7, 10**4, 10**2).normalized
        assert big < small

    def test_q_range(self):
        with pytest.raises(ValueError):
            pr.type_i_discrepancy(D7, 10**4, 10**3)
        with pytest.raises(ResourceError):
            pr.type_i_discrepancy(D7, 10**9, 10)


class TestExpSum:
    def test_zero(self):
        assert pr.prime_exp_sum(10**6, 0) == pytest.approx(78498, abs=1e-6)

    def test_half(self):
        assert pr.prime_exp_sum(10**6, fo.Angle(1, 5)) == pytest.approx(78498 - 2, abs=1e-6)

    def test_generic(self):
        assert pr.prime_exp_sum(10**6, math.sqrt(2) - 1) <= 10**5

    def test_float_matches_rational(self):
        a = pr.prime_exp_sum(10**5, fo.Angle(3, 137))
        b = pr.prime_exp_sum(10**5, 0.137)
        assert a == pytest.approx(b, rel=1e-8)
