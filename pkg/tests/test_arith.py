"""Denominator arithmetic: sieves, valuations, the exponent rule, growth rate."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, workprec

from zetaforms.arith import (
    delta_empirical,
    delta_integral,
    factorial_quotient,
    factorial_quotient_check,
    lcm_upto,
    legendre_valuation,
    phi,
    rho,
    rho0,
    rho0_bruteforce,
    sieve_primes,
    valuation_inequality_check,
)
from zetaforms.bigmath import PrecisionContext
from zetaforms.rfunc import CertificationError


def test_sieve_against_trial_division():
    primes = set(sieve_primes(500))
    for k in range(2, 501):
        is_p = all(k % d for d in range(2, int(math.isqrt(k)) + 1))
        assert (k in primes) == is_p
    assert sieve_primes(1) == []
    assert sieve_primes(2) == [2]


def test_legendre_valuation_counts_factors(rng):
    for _ in range(40):
        n = rng.randint(1, 120)
        p = rng.choice([2, 3, 5, 7, 11])
        f = math.factorial(n)
        v = 0
        while f % p == 0:
            f //= p
            v += 1
        assert legendre_valuation(n, p) == v


def test_lcm_upto_matches_stdlib():
    for n in (0, 1, 2, 10, 30, 100):
        expect = 1
        for k in range(1, n + 1):
            expect = math.lcm(expect, k)
        assert lcm_upto(n) == expect
    with pytest.raises(ValueError):
        lcm_upto(-1)


def test_rho_nonnegative_on_grid(rng):
    # the difference-of-floors form is bounded below by 0 on valuation grounds
    for _ in range(300):
        x = Fraction(rng.randint(0, 999), rng.randint(1, 60))
        y = Fraction(rng.randint(-99, 99), rng.randint(1, 60))
        assert rho(x, y) >= 0


@given(
    num=st.integers(min_value=0, max_value=2519),
    den=st.sampled_from([7, 11, 13, 360, 2520]),
)
@settings(max_examples=120, deadline=None)
def test_rho0_table_matches_bruteforce(num, den):
    x = Fraction(num % den, den)
    assert rho0(x) == rho0_bruteforce(x)


def test_rho0_interval_boundaries():
    # left-closed table intervals
    assert rho0(Fraction(0)) == 0
    assert rho0(Fraction(1, 3)) == 1
    assert rho0(Fraction(1, 2)) == 2
    assert rho0(Fraction(2, 3)) == 3
    assert rho0(Fraction(5, 6)) == 4
    assert rho0(Fraction(5, 6) - Fraction(1, 10**9)) == 3
    assert rho0(Fraction(7, 3)) == 1  # only the fractional part matters


def test_phi_small_values_and_boundary():
    for n in range(5):
        assert phi(n).phi_n == 1
    # n = 9: qualifying primes must satisfy p^2 > 36, so 7 qualifies, 5 does not
    data = phi(9)
    assert all(p * p > 36 for p, _ in data.phi_factorization)
    assert data.d_n == lcm_upto(9)
    product = 1
    for p, e in data.phi_factorization:
        product *= p**e
    assert product == data.phi_n
    with pytest.raises(ValueError):
        phi(-2)


def test_phi_pinned_regression():
    # recorded from a verified run; guards the exponent rule end to end
    data = phi(25)
    assert data.d_n == 26771144400
    assert data.phi_n == 485537
    assert data.phi_factorization == ((13, 4), (17, 1))


def test_factorial_quotient_matches_direct(rng):
    for _ in range(25):
        n = rng.randint(0, 40)
        m = rng.randint(0, n)
        direct = (
            math.factorial(2 * n + 2 * m)
            * math.factorial(4 * n - 2 * m)
            // (math.factorial(m) ** 6 * math.factorial(n - m) ** 6)
        )
        assert factorial_quotient(n, m) == direct
    with pytest.raises(ValueError):
        factorial_quotient(3, 4)


def test_quotient_divisibility_two_routes():
    # big-integer division and pure valuation accounting prove the same claim
    for n in range(1, 61):
        assert factorial_quotient_check(n)
        assert valuation_inequality_check(n)


def test_valuation_check_detects_planted_failure(monkeypatch):
    import zetaforms.arith as arith

    monkeypatch.setattr(arith, "rho0", lambda x: 99)
    with pytest.raises(CertificationError):
        arith.valuation_inequality_check(30)


def test_delta_integral_against_quadrature_oracle():
    # independent route: numerically integrate rho0(t) dW over each interval,
    # W = psi + 1/t, using mpmath's own polygamma for the density
    ours = delta_integral(PrecisionContext(192, 64))
    with workprec(300):
        breaks = [mp.mpf(0), mp.mpf(1) / 3, mp.mpf(1) / 2, mp.mpf(2) / 3, mp.mpf(5) / 6, mp.mpf(1)]
        total = mp.mpf(0)
        for i, v in enumerate((0, 1, 2, 3, 4)):
            if not v:
                continue
            a, b = breaks[i], breaks[i + 1]
            total += v * mp.quad(lambda t: mp.polygamma(1, t) - 1 / t**2, [a, b])
        assert abs(ours - total) < mp.mpf(10) ** -40


def test_delta_integral_precision_consistency():
    lo = delta_integral(PrecisionContext(128, 64))
    hi = delta_integral(PrecisionContext(320, 64))
    with workprec(400):
        assert abs(lo - hi) < mp.mpf(2) ** -128


def test_delta_empirical_trend():
    trend = delta_empirical(3000, samples=10)
    assert [n for n, _ in trend] == sorted({n for n, _ in trend})
    # slow convergence toward ~1.2956; at a few thousand only the ballpark holds
    final = trend[-1][1]
    assert 1.0 < final < 1.5
    with pytest.raises(ValueError):
        delta_empirical(50)
