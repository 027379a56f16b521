"""Scalar kernels against independent oracles (mpmath's own implementations)."""

from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, workprec

from zetaforms.bigmath import (
    DomainError,
    PrecisionContext,
    SeriesError,
    TruncatedSeries,
    binomial_factor_series,
    digamma,
    format_rational,
    log_gamma,
    parse_rational,
    rat,
    series_inv,
    series_linear_factor,
    series_mul,
    series_prod,
    zeta_int,
)


def test_rational_format_roundtrip(rng):
    for _ in range(200):
        x = Fraction(rng.randint(-10**9, 10**9), rng.randint(1, 10**9))
        assert parse_rational(format_rational(x)) == x
    assert format_rational(5) == "5/1"
    assert parse_rational("  -3/6 ") == Fraction(-1, 2)
    assert parse_rational("17") == 17


def test_rat_builds_fractions():
    assert rat(3, 6) == Fraction(1, 2)
    assert rat(Fraction(2, 3)) == Fraction(2, 3)


def test_precision_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(32, 64)
    with pytest.raises(ValueError):
        PrecisionContext(256, 16)
    ctx = PrecisionContext(128, 64)
    assert ctx.working_bits == 192
    assert ctx.bumped(64).prec_bits == 192
    assert ctx.with_prec(512).guard_bits == 64


def test_workprec_scope_restores():
    before = mp.prec
    ctx = PrecisionContext(300, 64)
    with ctx.workprec():
        assert mp.prec == 364
    assert mp.prec == before


def test_to_real_rounds_at_working_precision():
    ctx = PrecisionContext(128, 64)
    x = ctx.to_real(Fraction(1, 3))
    with ctx.workprec():
        assert abs(x - mp.mpf(1) / 3) <= mp.mpf(2) ** -190


@pytest.mark.parametrize("s", [2, 3, 5, 12, 69, 200])
@pytest.mark.parametrize("bits", [128, 320])
def test_zeta_int_matches_mpmath(s, bits):
    ctx = PrecisionContext(bits, 64)
    ours = zeta_int(s, ctx)
    with workprec(bits + 128):
        ref = mp.zeta(s)
        assert abs(ours - ref) <= abs(ref) * mp.mpf(2) ** -bits


def test_zeta_int_domain():
    with pytest.raises(DomainError):
        zeta_int(1)
    with pytest.raises(DomainError):
        zeta_int(0)


def test_log_gamma_matches_mpmath_on_grid(rng, ctx256):
    # principal branch everywhere off the cut, including Re < 0
    pts = []
    for _ in range(25):
        re = rng.uniform(-20, 20)
        im = rng.uniform(-25, 25)
        if abs(im) < 0.25:
            im += 0.5
        pts.append(mp.mpc(re, im))
    pts += [mp.mpf("0.125"), mp.mpf(40), mp.mpc("1e-3", "1e-3")]
    for z in pts:
        ours = log_gamma(z, ctx256)
        with workprec(420):
            ref = mp.loggamma(mp.mpc(z))
            assert abs(mp.mpc(ours) - ref) <= (1 + abs(ref)) * mp.mpf(2) ** -250


def test_log_gamma_real_input_returns_real(ctx128):
    v = log_gamma(Fraction(7, 2), ctx128)
    assert isinstance(v, mpmath.mpf)


def test_log_gamma_recurrence(ctx256):
    z = mp.mpc("2.75", "-3.5")  # dyadic components, exact at any precision
    with workprec(400):
        lhs = mp.mpc(log_gamma(z + 1, ctx256))
        rhs = mp.mpc(log_gamma(z, ctx256)) + mp.log(z)
        assert abs(lhs - rhs) <= mp.mpf(2) ** -245


def test_log_gamma_rejects_cut():
    for z in (0, -1, Fraction(-7, 2), mp.mpf("-0.5")):
        with pytest.raises(DomainError):
            log_gamma(z)


@pytest.mark.parametrize("x", [Fraction(1, 2), Fraction(1, 3), Fraction(7, 6), 1, 25])
def test_digamma_matches_mpmath(x, ctx256):
    ours = digamma(x, ctx256)
    with workprec(400):
        ref = mp.digamma(mp.mpf(Fraction(x).numerator) / Fraction(x).denominator)
        assert abs(ours - ref) <= mp.mpf(2) ** -250


def test_digamma_domain():
    with pytest.raises(DomainError):
        digamma(0)
    with pytest.raises(DomainError):
        digamma(Fraction(-3, 2))


# ---------------------------------------------------------------------------
# truncated series


def test_series_alignment_is_enforced():
    a = series_linear_factor(1, 0, 4)
    b = series_linear_factor(1, Fraction(1, 2), 4)
    c = series_linear_factor(1, 0, 5)
    with pytest.raises(SeriesError):
        a + b
    with pytest.raises(SeriesError):
        series_mul(a, c)


def test_series_mul_matches_convolution(rng):
    for _ in range(30):
        center = Fraction(rng.randint(-4, 4), rng.randint(1, 5))
        ca = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(6))
        cb = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(6))
        prod = TruncatedSeries(center, ca) * TruncatedSeries(center, cb)
        full = [Fraction(0)] * 11
        for i, ai in enumerate(ca):
            for j, bj in enumerate(cb):
                full[i + j] += ai * bj
        assert list(prod.coeffs) == full[:6]


def test_series_inv_is_two_sided(rng):
    for _ in range(20):
        coeffs = [Fraction(rng.randint(1, 9))] + [
            Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(5)
        ]
        a = TruncatedSeries(Fraction(0), tuple(coeffs))
        inv = series_inv(a)
        one = series_mul(a, inv)
        assert one.coeffs[0] == 1
        assert all(c == 0 for c in one.coeffs[1:])
    with pytest.raises(SeriesError):
        series_inv(TruncatedSeries(Fraction(0), (Fraction(0), Fraction(1))))


def test_series_prod_matches_left_fold(rng):
    factors = [
        series_linear_factor(Fraction(rng.randint(-6, 6), rng.randint(1, 4)), 1, 8)
        for _ in range(11)
    ]
    balanced = series_prod(factors)
    folded = factors[0]
    for f in factors[1:]:
        folded = series_mul(folded, f)
    assert balanced == folded
    with pytest.raises(SeriesError):
        series_prod([])


def test_binomial_factor_series_positive_exponent_matches_powers(rng):
    for _ in range(20):
        root = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        center = root + Fraction(rng.randint(1, 7), rng.randint(1, 4))
        e = rng.randint(1, 5)
        direct = series_prod([series_linear_factor(root, center, 8)] * e)
        binom = binomial_factor_series(root, e, center, 8)
        assert direct == binom


def test_binomial_factor_series_negative_exponent_inverts(rng):
    for _ in range(20):
        root = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        center = root + Fraction(rng.randint(1, 7), rng.randint(1, 4))
        e = rng.randint(1, 4)
        forward = binomial_factor_series(root, e, center, 8)
        backward = binomial_factor_series(root, -e, center, 8)
        one = series_mul(forward, backward)
        assert one.coeffs[0] == 1
        assert all(c == 0 for c in one.coeffs[1:])


def test_binomial_series_rejects_center_at_root():
    with pytest.raises(SeriesError):
        binomial_factor_series(Fraction(1, 2), -3, Fraction(1, 2), 4)


def test_derivative_at_center():
    s = TruncatedSeries(Fraction(0), (Fraction(1), Fraction(2), Fraction(3)))
    assert s.derivative_at_center(0) == 1
    assert s.derivative_at_center(2) == 6
    with pytest.raises(SeriesError):
        s.derivative_at_center(3)
