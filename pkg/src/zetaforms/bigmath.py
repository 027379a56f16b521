"""Exact and high-precision scalar kernels.

Exact arithmetic is stdlib ``Fraction`` (always gcd-normalized, hashable).
High-precision values are mpmath ``mpf``/``mpc``; every routine that rounds
takes a :class:`PrecisionContext` and runs under ``workprec``, so precision
travels with the call rather than with hidden module state.  All special
functions carry explicit truncation-error bounds: nothing here is "close
enough by experiment", each cutoff is justified by an inequality stated in
a comment next to the stopping rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath
from mpmath import mp, workprec

ExactRational = Fraction
RationalLike = Union[Fraction, int]


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class SeriesError(ValueError):
    """Structural misuse of truncated series (center/order mismatch, bad inverse)."""


def rat(p: RationalLike, q: int = 1) -> Fraction:
    """Build an ExactRational; the single constructor used across the package."""
    return Fraction(p, q)


def format_rational(x: RationalLike) -> str:
    """Serialize as ``"num/den"`` with an explicit denominator, e.g. ``"5/1"``."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def parse_rational(s: str) -> Fraction:
    """Inverse of :func:`format_rational`; also accepts a bare integer string."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


# ---------------------------------------------------------------------------
# precision contexts


@dataclass(frozen=True)
class PrecisionContext:
    """Binary working precision for the rounding layer.

    ``prec_bits`` is the precision promised to the caller; ``guard_bits``
    is headroom consumed by internal rounding.  Exact-rational code ignores
    the context entirely.
    """

    prec_bits: int = 256
    guard_bits: int = 64

    def __post_init__(self) -> None:
        if self.prec_bits < 64:
            raise ValueError(f"prec_bits must be >= 64, got {self.prec_bits}")
        if self.guard_bits < 32:
            raise ValueError(f"guard_bits must be >= 32, got {self.guard_bits}")

    @property
    def working_bits(self) -> int:
        return self.prec_bits + self.guard_bits

    def workprec(self, extra_bits: int = 0):
        """mpmath precision scope at working_bits (+ optional extra headroom)."""
        return workprec(self.working_bits + extra_bits)

    def with_prec(self, prec_bits: int) -> "PrecisionContext":
        return PrecisionContext(prec_bits, self.guard_bits)

    def bumped(self, extra_bits: int) -> "PrecisionContext":
        return PrecisionContext(self.prec_bits + extra_bits, self.guard_bits)

    def to_real(self, x: RationalLike) -> mpmath.mpf:
        """Round an exact rational into an mpf at working precision."""
        f = Fraction(x)
        with self.workprec():
            return mp.mpf(f.numerator) / f.denominator


DEFAULT_CONTEXT = PrecisionContext()


def _mpf_here(x: RationalLike) -> mpmath.mpf:
    """Round a rational at whatever precision is currently active."""
    f = Fraction(x)
    return mp.mpf(f.numerator) / f.denominator


def euler_const(ctx: PrecisionContext) -> mpmath.mpf:
    with ctx.workprec():
        return +mp.euler


# ---------------------------------------------------------------------------
# truncated power series with exact coefficients


@dataclass(frozen=True)
class TruncatedSeries:
    """Polynomial jet: sum of coeffs[i] * (t - center)^i, truncated past order.

    Immutable; all coefficients exact.  Operations require matching center
    and order so that silent misalignment cannot occur.
    """

    center: Fraction
    coeffs: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_aligned(self, other)
        return TruncatedSeries(
            self.center,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_mul(self, other)

    def scaled(self, c: RationalLike) -> "TruncatedSeries":
        f = Fraction(c)
        return TruncatedSeries(self.center, tuple(f * a for a in self.coeffs))

    def derivative_at_center(self, k: int) -> Fraction:
        """k-th derivative at the center: k! * coeffs[k]."""
        if not 0 <= k <= self.order:
            raise SeriesError(f"derivative order {k} outside series order {self.order}")
        return self.coeffs[k] * math.factorial(k)


def _check_aligned(a: TruncatedSeries, b: TruncatedSeries) -> None:
    if a.center != b.center:
        raise SeriesError(f"center mismatch: {a.center} vs {b.center}")
    if a.order != b.order:
        raise SeriesError(f"order mismatch: {a.order} vs {b.order}")


def series_linear_factor(root: RationalLike, center: RationalLike, order: int) -> TruncatedSeries:
    """Expansion of (t - root) around center: [center - root, 1, 0, ...]."""
    if order < 0:
        raise SeriesError("order must be >= 0")
    c = Fraction(center)
    coeffs = [c - Fraction(root)] + [Fraction(0)] * order
    if order >= 1:
        coeffs[1] = Fraction(1)
    return TruncatedSeries(c, tuple(coeffs))


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to the common order."""
    _check_aligned(a, b)
    n = a.order
    ca, cb = a.coeffs, b.coeffs
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(ca):
        if not ai:
            continue
        for j in range(n + 1 - i):
            bj = cb[j]
            if bj:
                out[i + j] += ai * bj
    return TruncatedSeries(a.center, tuple(out))


def series_inv(a: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; requires a nonzero constant term."""
    c0 = a.coeffs[0]
    if not c0:
        raise SeriesError("cannot invert a series with zero constant term")
    n = a.order
    inv0 = 1 / c0
    out = [inv0] + [Fraction(0)] * n
    for k in range(1, n + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            ai = a.coeffs[i]
            if ai:
                acc += ai * out[k - i]
        out[k] = -acc * inv0
    return TruncatedSeries(a.center, tuple(out))


def series_prod(factors: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """Product of many series, multiplied as a balanced tree.

    Balancing keeps most multiplications between small-coefficient operands;
    a left fold would drag the full-size accumulator through every step.
    """
    if not factors:
        raise SeriesError("empty product")
    work = list(factors)
    while len(work) > 1:
        nxt = [
            series_mul(work[i], work[i + 1]) if i + 1 < len(work) else work[i]
            for i in range(0, len(work), 2)
        ]
        work = nxt
    return work[0]


def binomial_factor_series(
    root: RationalLike, exponent: int, center: RationalLike, order: int
) -> TruncatedSeries:
    """Expansion of (t - root)^exponent around a center with center != root.

    Works for any integer exponent, negative included:
    (c + u)^e = c^e * sum_i C(e, i) (u/c)^i, where c = center - root and the
    generalized binomial C(e, i) terminates for e >= 0.  Two cheap rational
    operations per coefficient.
    """
    c = Fraction(center) - Fraction(root)
    if not c:
        raise SeriesError("binomial expansion centered at the root itself")
    coeffs = [Fraction(0)] * (order + 1)
    term = c**exponent  # exact for negative exponents too
    coeffs[0] = term
    for i in range(1, order + 1):
        # C(e, i)/C(e, i-1) = (e - i + 1)/i, then one more 1/c for u^i
        term = term * Fraction(exponent - i + 1, i) / c
        if not term:
            break
        coeffs[i] = term
    return TruncatedSeries(Fraction(center), tuple(coeffs))


# ---------------------------------------------------------------------------
# zeta at integer arguments


def zeta_int(s: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """Riemann zeta at an integer s >= 2, relative error below 2^-prec_bits.

    Partial sum to a cut N, then the integral of the tail plus Bernoulli
    corrections.  For f(x) = x^-s every derivative keeps one sign on
    (0, inf), so the remainder after the B_{2m} correction is smaller in
    magnitude than the first omitted term; the loop stops only once that
    omitted term is provably below target.  zeta(s) >= 1, so an absolute
    target equals a relative one.
    """
    if s < 2:
        raise DomainError(f"zeta_int requires s >= 2, got {s}")
    wb = ctx.working_bits
    with workprec(wb + 32):
        target = mp.mpf(2) ** (-(wb + 10))
        # e^(-2 pi N) floor of the correction series must undershoot target
        n_cut = max(8, int(0.1103 * (wb + 10)) + 4)
        while True:
            acc = mp.zero
            for k in range(n_cut - 1, 0, -1):  # ascending magnitude
                acc += mp.power(k, -s)
            acc += mp.power(n_cut, 1 - s) / (s - 1)  # integral of the tail
            acc += mp.power(n_cut, -s) / 2
            poch = mp.mpf(s)  # (s)_{2i-1} tracked incrementally
            npow = mp.power(n_cut, -s - 1)
            i = 1
            prev = mp.inf
            while True:
                term = mpmath.bernoulli(2 * i) / math.factorial(2 * i) * poch * npow
                if abs(term) < target:
                    return +acc
                if abs(term) >= prev:
                    break  # asymptotic floor reached above target: larger cut
                acc += term
                prev = abs(term)
                poch *= (s + 2 * i - 1) * (s + 2 * i)
                npow /= n_cut * n_cut
                i += 1
            n_cut *= 2


# ---------------------------------------------------------------------------
# log-gamma, principal branch


def _on_cut(z: mpmath.mpc) -> bool:
    return mp.im(z) == 0 and mp.re(z) <= 0


def log_gamma(z, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Principal branch of log Gamma on the plane cut along (-inf, 0].

    Recurrence pushes the argument right until the Stirling series applies,
    then the series is summed with its classical remainder bound
    |R_m| <= |B_{2m+2}| / ((2m+1)(2m+2)|z|^{2m+1}) * sec(arg(z)/2)^{2m+2}.
    The recurrence log Gamma(z) = log Gamma(z+1) - Log z holds exactly for
    the principal branches: both sides are analytic on the cut plane and
    agree on (0, inf), and the cut plane is connected.
    """
    wb = ctx.working_bits
    with workprec(wb + 32):
        if isinstance(z, (int, Fraction)):
            z = _mpf_here(z)
        zc = mp.mpc(z)
        if _on_cut(zc):
            raise DomainError(f"log_gamma: {z} lies on the cut (-inf, 0]")
        real_input = mp.im(zc) == 0 and mp.re(zc) > 0

        shift_target = max(10, int(0.1103 * (wb + 42)) + 4)
        while True:
            value, ok = _log_gamma_attempt(zc, shift_target, wb + 10)
            if ok:
                return mp.re(value) if real_input else +value
            shift_target = int(shift_target * 3 / 2) + 4


def _log_gamma_attempt(zc, shift_target: int, target_bits: int):
    """One pass: shift so Re >= shift_target, then Stirling with bound checks."""
    target = mp.mpf(2) ** (-target_bits)
    shift_sum = mp.zero
    w = zc
    while mp.re(w) < shift_target:
        shift_sum += mp.log(w)
        w += 1
    aw = abs(w)
    # sec(theta/2)^2 for theta = arg(w); Re(w) > 0 keeps this <= 2
    sec2 = 2 * aw / (aw + mp.re(w))
    acc = (w - mp.mpf(1) / 2) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
    wpow = 1 / w
    w2 = w * w
    bound_scale = sec2 / aw  # |w|^-1 sec^2 step base
    i = 1
    prev_bound = mp.inf
    while True:
        b2i = mpmath.bernoulli(2 * i)
        acc += b2i / ((2 * i) * (2 * i - 1)) * wpow
        nxt = mpmath.bernoulli(2 * i + 2)
        bound = (
            abs(nxt)
            / ((2 * i + 1) * (2 * i + 2))
            * mp.power(aw, -(2 * i + 1))
            * mp.power(sec2, i + 2)
        )
        if bound < target:
            return acc - shift_sum, True
        if bound >= prev_bound:
            return mp.zero, False  # asymptotic floor above target
        prev_bound = bound
        wpow /= w2
        i += 1


# ---------------------------------------------------------------------------
# digamma at positive rationals


def digamma(x: RationalLike, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """Digamma at a rational x > 0, absolute error below 2^-prec_bits.

    Exact recurrence into the asymptotic zone, then
    psi(y) = log y - 1/(2y) - sum B_{2i}/(2i y^{2i}); for real y > 0 the
    series envelopes its limit, so the truncation error is below the first
    omitted term.
    """
    xf = Fraction(x)
    if xf <= 0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    wb = ctx.working_bits
    with workprec(wb + 32):
        target = mp.mpf(2) ** (-(wb + 10))
        shift_target = max(10, int(0.1103 * (wb + 10)) + 4)
        while True:
            k = max(0, shift_target - math.floor(xf))
            # exact harmonic block: psi(x) = psi(x + k) - sum 1/(x+j)
            block = sum((1 / (xf + j) for j in range(k)), Fraction(0))
            y = _mpf_here(xf + k)
            acc = mp.log(y) - 1 / (2 * y)
            y2 = y * y
            ypow = 1 / y2
            i = 1
            prev = mp.inf
            done = False
            while True:
                term = mpmath.bernoulli(2 * i) / (2 * i) * ypow
                if abs(term) < target:
                    done = True
                    break
                if abs(term) >= prev:
                    break
                acc -= term
                prev = abs(term)
                ypow /= y2
                i += 1
            if done:
                return +(acc - _mpf_here(block)) if k else +acc
            shift_target = int(shift_target * 3 / 2) + 4
