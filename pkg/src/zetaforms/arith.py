"""Denominator arithmetic: least common multiples, prime filters, valuations.

The certification story for the coefficient tables rests on three exact
ingredients: d_n = lcm(1..n), a piecewise-constant exponent rule rho0 fed
by a two-variable floor expression rho, and the prime product Phi_n built
from rho0.  Everything returns exact integers or rationals; the only
rounding happens in the two delta estimators at the bottom.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from zetaforms.bigmath import (
    DEFAULT_CONTEXT,
    PrecisionContext,
    RationalLike,
    digamma,
    euler_const,
)
from zetaforms.rfunc import CertificationError

from mpmath import mp


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit by a byte sieve."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return [i for i in range(2, limit + 1) if flags[i]]


def legendre_valuation(n: int, p: int) -> int:
    """v_p(n!) = sum of floor(n / p^l)."""
    v = 0
    q = p
    while q <= n:
        v += n // q
        q *= p
    return v


def lcm_upto(n: int) -> int:
    """d_n = lcm(1..n) as a product of maximal prime powers p^floor(log_p n).

    Empty range (n <= 1) gives 1.
    """
    if n < 0:
        raise ValueError(f"lcm_upto requires n >= 0, got {n}")
    d = 1
    for p in sieve_primes(n):
        q = p
        while q * p <= n:
            q *= p
        d *= q
    return d


# ---------------------------------------------------------------------------
# the exponent rule


def rho(x: RationalLike, y: RationalLike) -> int:
    """floor(2x+2y) + floor(4x-2y) - 6 floor(y) - 6 floor(x-y).

    Also evaluated through the equivalent fractional-part form
    6{y} + 6{x-y} - {2x+2y} - {4x-2y}; the two must agree and the
    agreement is asserted on every call.
    """
    xf, yf = Fraction(x), Fraction(y)
    floor_form = (
        math.floor(2 * xf + 2 * yf)
        + math.floor(4 * xf - 2 * yf)
        - 6 * math.floor(yf)
        - 6 * math.floor(xf - yf)
    )

    def frac(q: Fraction) -> Fraction:
        return q - math.floor(q)

    frac_form = 6 * frac(yf) + 6 * frac(xf - yf) - frac(2 * xf + 2 * yf) - frac(4 * xf - 2 * yf)
    if frac_form != floor_form:
        raise AssertionError(f"rho forms disagree at ({x}, {y})")
    return floor_form


_RHO0_BREAKS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(5, 6))
_RHO0_VALUES = (0, 1, 2, 3, 4)


def rho0(x: RationalLike) -> int:
    """Step function of {x}: 0, 1, 2, 3, 4 on the table intervals.

    Intervals are closed on the left: [0,1/3), [1/3,1/2), [1/2,2/3),
    [2/3,5/6), [5/6,1).
    """
    xf = Fraction(x)
    u = xf - math.floor(xf)
    return _RHO0_VALUES[bisect_right(_RHO0_BREAKS, u)]


def rho0_bruteforce(x: RationalLike) -> int:
    """min over y of rho(x, y), by enumerating the breakpoints in y.

    On [0, 1) the map y -> rho(x, y) only jumps where one of y, x-y,
    2x+2y, 4x-2y crosses an integer; checking every such breakpoint and a
    midpoint between consecutive ones covers all values exactly.
    """
    xf = Fraction(x)

    def wrap(q: Fraction) -> Fraction:
        return q - math.floor(q)

    candidates = {
        Fraction(0),
        wrap(xf),
        wrap(-xf),
        wrap(Fraction(1, 2) - xf),
        wrap(2 * xf),
        wrap(2 * xf - Fraction(1, 2)),
    }
    pts = sorted(candidates)
    samples = list(pts)
    for a, b in zip(pts, pts[1:] + [pts[0] + 1]):
        samples.append((a + b) / 2)
    return min(rho(xf, y) for y in samples)


# ---------------------------------------------------------------------------
# the prime product and the factorial quotient


@dataclass(frozen=True)
class DenominatorData:
    """d_n, the prime product Phi_n, and Phi_n's factorization."""

    n: int
    d_n: int
    phi_n: int
    phi_factorization: tuple[tuple[int, int], ...]


def phi(n: int) -> DenominatorData:
    """Phi_n = product over primes 2 sqrt(n) < p <= n of p^rho0(n/p).

    The lower boundary is compared exactly: p qualifies iff p^2 > 4n.
    Empty product (n <= 4) gives 1.
    """
    if n < 0:
        raise ValueError(f"phi requires n >= 0, got {n}")
    value = 1
    fact: list[tuple[int, int]] = []
    for p in sieve_primes(n):
        if p * p <= 4 * n:
            continue
        e = rho0(Fraction(n, p))
        if e:
            value *= p**e
            fact.append((p, e))
    return DenominatorData(n, lcm_upto(n), value, tuple(fact))


class _FactorialCache:
    """Growing table of n! so the quotient scans stay linear."""

    def __init__(self) -> None:
        self._table = [1, 1]

    def __call__(self, n: int) -> int:
        t = self._table
        while len(t) <= n:
            t.append(t[-1] * len(t))
        return t[n]


_factorial = _FactorialCache()


def factorial_quotient(n: int, m: int) -> int:
    """(2n+2m)! (4n-2m)! / (m!^6 (n-m)!^6), verified integral."""
    if not 0 <= m <= n:
        raise ValueError(f"m must lie in 0..{n}, got {m}")
    num = _factorial(2 * n + 2 * m) * _factorial(4 * n - 2 * m)
    den = (_factorial(m) * _factorial(n - m)) ** 6
    q, r = divmod(num, den)
    if r:
        raise CertificationError(f"factorial quotient not integral at n={n}, m={m}")
    return q


def factorial_quotient_check(n: int) -> bool:
    """Phi_n divides the factorial quotient for every column m.

    Exact integer division; any failure raises rather than returning False
    silently (a False return would hide which column broke).
    """
    data = phi(n)
    for m in range(n + 1):
        if factorial_quotient(n, m) % data.phi_n:
            raise CertificationError(f"Phi_{n} does not divide quotient at m={m}")
    return True


def valuation_inequality_check(n: int) -> bool:
    """v_p of the factorial quotient >= rho0(n/p) for qualifying p, all m.

    Pure Legendre-valuation arithmetic; no big integers involved, so this
    scales to large n and cross-checks :func:`factorial_quotient_check`.
    """
    for p in sieve_primes(n):
        if p * p <= 4 * n:
            continue
        need = rho0(Fraction(n, p))
        for m in range(n + 1):
            have = (
                legendre_valuation(2 * n + 2 * m, p)
                + legendre_valuation(4 * n - 2 * m, p)
                - 6 * legendre_valuation(m, p)
                - 6 * legendre_valuation(n - m, p)
            )
            if have < need:
                raise CertificationError(
                    f"valuation shortfall at n={n}, m={m}, p={p}: {have} < {need}"
                )
    return True


# ---------------------------------------------------------------------------
# the growth constant of log Phi_n / n


def delta_integral(ctx: PrecisionContext = DEFAULT_CONTEXT):
    """integral over [0,1] of rho0 d(psi(t) + 1/t), evaluated piecewise.

    rho0 is constant on each table interval, so the integral collapses to
    a weighted telescoping sum of W(t) = psi(t) + 1/t at the breakpoints.
    W(0+) = -euler_gamma analytically (the 1/t cancels the digamma pole);
    it enters with weight zero for the current table but is kept exact.
    """
    with ctx.workprec():
        gamma = euler_const(ctx)

        def w_at(t: Fraction):
            if t == 0:
                return -gamma
            return digamma(t, ctx) + ctx.to_real(Fraction(1, 1) / t)

        breaks = (Fraction(0),) + _RHO0_BREAKS + (Fraction(1),)
        total = mp.zero
        for i, value in enumerate(_RHO0_VALUES):
            if value:
                total += value * (w_at(breaks[i + 1]) - w_at(breaks[i]))
        return +total


def delta_empirical(N: int, samples: int | None = None) -> list[tuple[int, float]]:
    """Trend of log(Phi_n)/n for n up to N; diagnostic only.

    Uses float log accumulation over the prime filter (no big products).
    By default every n in [1, N] is reported; passing samples switches to a
    geometric grid over the top decade, which is what makes N ~ 10^5
    affordable.
    """
    if N < 100:
        raise ValueError(f"delta_empirical requires N >= 100, got {N}")
    if samples is None:
        grid = list(range(1, N + 1))
    else:
        lo = max(100, N // 10)
        grid = sorted(
            {
                min(N, max(lo, round(lo * (N / lo) ** (i / max(1, samples - 1)))))
                for i in range(samples)
            }
        )
    primes = sieve_primes(N)
    out = []
    for n in grid:
        acc = 0.0
        for p in primes:
            if p > n:
                break
            if p * p <= 4 * n:
                continue
            e = rho0(Fraction(n, p))
            if e:
                acc += e * math.log(p)
        out.append((n, acc / n))
    return out
