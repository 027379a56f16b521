"""Linear forms in odd zeta values, exactly and numerically.

Two independent routes to the same number: summing the second derivative of
the structured rational function term by term (exact head, analytically
closed tail), and assembling the closed-form combination of zeta values
from the partial-fraction table.  Agreement of the two routes certifies
both the table and the special-function layer.  Elimination then cancels a
chosen zeta value from the pair of forms, and integerization scales the
result onto pinned denominators.

Parity policy: the series evaluator S_direct works for any parameters the
rational function accepts, while every operation that expands into zeta
values demands even n and even A; only then do the even-order rows cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, workprec

from zetaforms.arith import DenominatorData, phi
from zetaforms.bigmath import (
    DEFAULT_CONTEXT,
    DomainError,
    PrecisionContext,
    _mpf_here,
    format_rational,
    zeta_int,
)
from zetaforms.rfunc import (
    CertificationError,
    Parameters,
    PartialFractionTable,
    build_R,
    partial_fractions,
    series_at,
)

PLAIN = "plain"
HAT = "hat"
_WHICH = (PLAIN, HAT)


class IntegralityError(CertificationError):
    """A scaled coefficient that must be an integer is not."""


def _check_which(which: str) -> None:
    if which not in _WHICH:
        raise ValueError(f"which must be one of {_WHICH}, got {which!r}")


@lru_cache(maxsize=8)
def _cached_table(params: Parameters) -> PartialFractionTable:
    return partial_fractions(params)


@dataclass(frozen=True)
class LinearForm:
    """Exact coefficients of both series over one partial-fraction table.

    plain value = q0 + sum_j q[j] zeta(j); half-shifted value = q0_hat +
    sum_j q[j] (2^j - 1) zeta(j), with the same q[j] in both, odd j running
    over [5, A+1].  omega = floor((n-1)/2) is the column split used by the
    alternative route to q0_hat.
    """

    params: Parameters
    q0: Fraction
    q0_hat: Fraction
    q: tuple[tuple[int, Fraction], ...]
    omega: int

    def q_dict(self) -> dict[int, Fraction]:
        return dict(self.q)

    def zeta_indices(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.q)

    def constant(self, which: str) -> Fraction:
        _check_which(which)
        return self.q0 if which == PLAIN else self.q0_hat

    def zeta_weight(self, j: int, which: str) -> Fraction:
        """Coefficient multiplying zeta(j) in the chosen series."""
        _check_which(which)
        qj = self.q_dict()[j]
        return qj if which == PLAIN else qj * (2**j - 1)

    def to_json_dict(self) -> dict:
        return {
            "n": self.params.n,
            "A": self.params.A,
            "omega": self.omega,
            "q0": format_rational(self.q0),
            "q0_hat": format_rational(self.q0_hat),
            "q": {str(j): format_rational(v) for j, v in self.q},
        }


@dataclass(frozen=True)
class EliminationForm:
    """(2^m - 1) * plain - hat: the zeta(m) term cancels exactly.

    c holds only the surviving nonzero coefficients, so m never appears as
    a key and an all-zero combination has empty c.
    """

    params: Parameters
    m: int
    c0: Fraction
    c: tuple[tuple[int, Fraction], ...]

    def c_dict(self) -> dict[int, Fraction]:
        return dict(self.c)

    def to_json_dict(self) -> dict:
        return {
            "n": self.params.n,
            "A": self.params.A,
            "m": self.m,
            "c0": format_rational(self.c0),
            "c": {str(j): format_rational(v) for j, v in self.c},
        }


@dataclass(frozen=True)
class IntegerForm:
    """Elimination form scaled by d_n^(A+2) / Phi_n^3 into integers."""

    params: Parameters
    m: int
    Q0: int
    Q: tuple[tuple[int, int], ...]
    d_n: int
    phi_n: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.params.n,
            "A": self.params.A,
            "m": self.m,
            "scale": f"d_n^{self.params.A + 2} / phi_n^3",
            "d_n": str(self.d_n),
            "phi_n": str(self.phi_n),
            "Q0": str(self.Q0),
            "Q": {str(j): str(v) for j, v in self.Q},
        }


# ---------------------------------------------------------------------------
# closed-form coefficients


def q_coefficients(table: PartialFractionTable) -> LinearForm:
    """Assemble both series' exact coefficients from the pole table."""
    params = table.params
    params.require_even_even()
    n, A = params.n, params.A
    q: list[tuple[int, Fraction]] = []
    for j in range(5, A + 2, 2):
        coeff = (j - 2) * (j - 1) * table.row_sum(j - 2)
        q.append((j, coeff))
    return LinearForm(
        params,
        _constant_term(table, PLAIN),
        _constant_term(table, HAT),
        tuple(q),
        (n - 1) // 2,
    )


def _constant_term(table: PartialFractionTable, which: str) -> Fraction:
    """-sum over j, m, k<=m of j(j+1) p[j][m] / (k - s)^(j+2), s = 0 or 1/2."""
    n, A = table.params.n, table.params.A
    shift = Fraction(0) if which == PLAIN else Fraction(1, 2)
    total = Fraction(0)
    for m in range(1, n + 1):
        for k in range(1, m + 1):
            base = 1 / (k - shift)
            power = base * base  # reaches (k-s)^-(j+2) inside the loop
            for j in range(1, A + 1):
                power *= base
                pj = table.rows[j - 1][m]
                if pj:
                    total += j * (j + 1) * pj * power
    return -total


def q0_hat_alt(table: PartialFractionTable) -> Fraction:
    """Second exact route to the half-shifted constant term.

    Start the half-shifted series at k = -omega instead of k = 1 (the
    function's built-in zeros make the extra terms vanish), split the
    columns at omega and fold the negative-k block through k -> -k.  The
    k-reflection contributes the (-1)^j on the first block only; the
    second block is a plain finite correction with no sign.  Must equal
    the direct formula exactly.
    """
    params = table.params
    params.require_even_even()
    n, A = params.n, params.A
    if n < 1:
        raise DomainError("alternative constant-term route needs n >= 1")
    omega = (n - 1) // 2
    total = Fraction(0)
    for m in range(omega + 1):
        for k in range(omega - m + 1):
            base = 1 / (k + Fraction(1, 2))
            power = base * base
            for j in range(1, A + 1):
                power *= base
                pj = table.rows[j - 1][m]
                if pj:
                    sign = 1 if j % 2 == 0 else -1
                    total += sign * j * (j + 1) * pj * power
    for m in range(omega + 1, n + 1):
        for k in range(1, m - omega):
            base = 1 / (k - Fraction(1, 2))
            power = base * base
            for j in range(1, A + 1):
                power *= base
                pj = table.rows[j - 1][m]
                if pj:
                    total -= j * (j + 1) * pj * power
    return total


# ---------------------------------------------------------------------------
# route one: direct summation with analytic tail closure


def _envelope_log2(params: Parameters, shift: Fraction) -> tuple[float, float, int]:
    """(log2 C, root bound, degree) for |h''| <= C t^(deg-2) on shifted disks.

    C covers |R''(z)| for |z - t| <= t/4 once t clears 4x the root bound:
    every factor then obeys t/2 <= |z - root| <= 2t, and writing R'' =
    R ((R'/R)^2 + (R'/R)') turns the factor exponents into the quadratic
    slack below.
    """
    fr = build_R(params)
    const, pairs = fr.merged_factors()
    sum_abs = sum(abs(e) for _, e in pairs)
    pos = sum(e for _, e in pairs if e > 0)
    neg = sum(-e for _, e in pairs if e < 0)
    lg_const = math.log2(abs(const.numerator)) - math.log2(const.denominator)
    lg_c = lg_const + pos + neg + math.log2(4 * (sum_abs * sum_abs + sum_abs))
    root_bound = max(abs(root - shift) for root, _ in pairs)
    return lg_c, float(root_bound), params.degree


def _tail_remainder_log2(lg_c: float, deg: int, m: int, a: Fraction) -> float:
    """log2 bound on the summation error after the order-2m closure term.

    2 zeta(2m)/(2pi)^2m times the integral of |h^(2m)| past the cut, with
    Cauchy's estimate on radius-t/4 disks giving |h^(2m)(t)| <=
    (2m)! (4/t)^2m C t^(deg-2).
    """
    lg_a = math.log2(float(a))
    return (
        2.0
        + math.lgamma(2 * m + 1) / math.log(2)
        + 2 * m * math.log2(2 / math.pi)
        + lg_c
        + (deg - 1 - 2 * m) * lg_a
        - math.log2(2 * m + 1 - deg)
    )


def _second_derivative_at(fr, point: Fraction) -> Fraction:
    s = series_at(fr, point, 2)
    return 2 * s.coeffs[2]


_CLOSURE_ORDERS = (10, 20, 30, 40, 50, 60, 70)


def S_direct(
    params: Parameters,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    which: str = PLAIN,
) -> mpmath.mpf:
    """Sum of the second derivative over the (possibly half-shifted) grid.

    Exact head: each term is the order-2 jet of the function at its grid
    point, an exact rational.  Exact tail: past a cut K the sum is closed
    by the Euler-Maclaurin formula evaluated from a higher-order jet at the
    cut, with the remainder bounded rigorously per _tail_remainder_log2.
    The cut and the closure order grow until the remainder sits 16 bits
    below the value at target precision and below the absolute floor
    2^-(prec+10) * (|value| + 2^-prec).
    """
    _check_which(which)
    shift = Fraction(0) if which == PLAIN else Fraction(-1, 2)
    fr = build_R(params)
    lg_c, root_bound, deg = _envelope_log2(params, shift)
    prec = ctx.prec_bits

    k_cut = max(int(4 * root_bound) + 3, 2 * params.n + 4, 8)
    head = Fraction(0)
    head_upto = 1  # next k to add
    target_bits = -2.0 * prec - 10  # provisional until a value estimate exists
    while True:
        # push the cut out, taking the best closure order at each cut,
        # until the remainder bound clears the current target
        while True:
            m_order = min(
                _CLOSURE_ORDERS,
                key=lambda c: _tail_remainder_log2(lg_c, deg, c, k_cut + shift),
            )
            if _tail_remainder_log2(lg_c, deg, m_order, k_cut + shift) <= target_bits:
                break
            k_cut = k_cut * 3 // 2 + 1
        while head_upto < k_cut:
            head += _second_derivative_at(fr, head_upto + shift)
            head_upto += 1
        jet = series_at(fr, k_cut + shift, 2 * m_order + 2)
        tail = -jet.coeffs[1] + jet.coeffs[2]
        for i in range(1, m_order + 1):
            num, den = mpmath.bernfrac(2 * i)
            tail -= (2 * i + 1) * Fraction(int(num), int(den)) * jet.coeffs[2 * i + 1]
        total = head + tail
        rem_bits = _tail_remainder_log2(lg_c, deg, m_order, k_cut + shift)

        if total:
            value_bits = math.log2(abs(total.numerator)) - math.log2(total.denominator)
            relative_ok = rem_bits <= value_bits - prec - 16
            floor_ok = rem_bits <= max(value_bits, -float(prec)) - prec - 10
        else:
            value_bits = -math.inf
            relative_ok = floor_ok = rem_bits <= -2 * prec - 10
        if relative_ok and floor_ok:
            with ctx.workprec():
                return _mpf_here(total)
        # tighten and go again; the head accumulated so far is reused
        target_bits = max(min(value_bits - prec - 20, -2.0 * prec - 10), -6.0 * prec)


# ---------------------------------------------------------------------------
# route two: assemble from zeta values


@lru_cache(maxsize=None)
def _zeta_bits(s: int, bits: int) -> mpmath.mpf:
    return zeta_int(s, PrecisionContext(bits, 64))


def _zeta_combination(
    const: Fraction,
    terms: list[tuple[int, Fraction]],
    ctx: PrecisionContext,
) -> mpmath.mpf:
    """const + sum of w * zeta(j) to ctx precision, relative.

    The coefficients are astronomically larger than the value (that is the
    point of the construction), so the working precision is raised until
    the a-priori cancellation bound sits 16 bits below the result.
    """
    max_bits = max([_frac_bits(const)] + [_frac_bits(w) + 1 for _, w in terms])
    count = len(terms) + 2
    wb = ctx.working_bits + 32
    while True:
        zbits = wb + int(max(0.0, max_bits)) + 16
        zbits = ((zbits >> 8) + 1) << 8  # round up for cache reuse
        with workprec(zbits):
            acc = mp.mpf(0)
            for j, w in terms:
                if w:
                    acc += _mpf_here(w) * _zeta_bits(j, zbits)
            acc += _mpf_here(const)
            err_bits = max_bits + math.log2(count) - zbits + 66  # 64 guard + slack
            if acc == 0:
                ok = err_bits <= -2 * ctx.prec_bits
                deficit = 2 * ctx.prec_bits + err_bits
            else:
                have = float(mp.log(abs(acc), 2))
                ok = err_bits <= have - ctx.prec_bits - 16
                deficit = err_bits - (have - ctx.prec_bits - 16)
        if ok:
            with ctx.workprec():
                return +acc
        wb += max(64, int(deficit) + 64)


def S_via_zeta(
    form: LinearForm,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    which: str = PLAIN,
) -> mpmath.mpf:
    """Evaluate the chosen series' zeta combination to ctx precision."""
    _check_which(which)
    terms = [(j, form.zeta_weight(j, which)) for j, _ in form.q]
    return _zeta_combination(form.constant(which), terms, ctx)


def elimination_value(
    elim: EliminationForm, ctx: PrecisionContext = DEFAULT_CONTEXT
) -> mpmath.mpf:
    """c0 + sum c[j] zeta(j); must match (2^m - 1) S - S-hat to precision."""
    return _zeta_combination(elim.c0, list(elim.c), ctx)


def _frac_bits(x: Fraction) -> float:
    if not x:
        return 0.0
    return math.log2(abs(x.numerator)) - math.log2(x.denominator)


# ---------------------------------------------------------------------------
# elimination and integerization


def eliminate(form: LinearForm, m: int) -> EliminationForm:
    """(2^m - 1) * plain - hat, cancelling the zeta(m) coefficient exactly."""
    n, A = form.params.n, form.params.A
    if m % 2 == 0 or not 5 <= m <= A + 1:
        raise DomainError(f"elimination index must be odd in [5, {A + 1}], got {m}")
    c0 = (2**m - 1) * form.q0 - form.q0_hat
    c: list[tuple[int, Fraction]] = []
    for j, qj in form.q:
        coeff = (2**m - 2**j) * qj
        if j == m and coeff:
            raise AssertionError("cancellation failed at j=m")
        if coeff:
            c.append((j, coeff))
    return EliminationForm(form.params, m, c0, tuple(c))


def integerize(elim: EliminationForm, denoms: DenominatorData | None = None) -> IntegerForm:
    """Scale by d_n^(A+2) / Phi_n^3; every entry must land in the integers."""
    elim.params.require_even_even()
    n, A = elim.params.n, elim.params.A
    if denoms is None:
        denoms = phi(n)
    if denoms.n != n:
        raise DomainError(f"denominator data is for n={denoms.n}, form has n={n}")
    scale = Fraction(denoms.d_n ** (A + 2), denoms.phi_n**3)

    def as_int(label: str, x: Fraction) -> int:
        scaled = scale * x
        if scaled.denominator != 1:
            raise IntegralityError(
                f"{label} not integral after scaling: denominator {scaled.denominator}"
            )
        return scaled.numerator

    q_int = tuple((j, as_int(f"c[{j}]", coeff)) for j, coeff in elim.c)
    return IntegerForm(elim.params, elim.m, as_int("c0", elim.c0), q_int, denoms.d_n, denoms.phi_n)


# ---------------------------------------------------------------------------
# integrality certificates


def check_p_integrality(table: PartialFractionTable, refined: bool = True) -> bool:
    """d_n^(A-j) p[j][m] is an integer for every j, m; the refined version
    also divides out Phi_n^3.  Raises with the first offending entry."""
    n, A = table.params.n, table.params.A
    if n < 1:
        return True
    denoms = phi(n)
    phi3 = denoms.phi_n**3
    for j in range(1, A + 1):
        d_pow = denoms.d_n ** (A - j)
        for m in range(n + 1):
            x = table.rows[j - 1][m] * d_pow
            if x.denominator != 1:
                raise IntegralityError(f"d^(A-j) p[{j}][{m}] not integral")
            if refined and x.numerator % phi3:
                raise IntegralityError(f"Phi^3 fails to divide d^(A-j) p[{j}][{m}]")
    return True


def check_q_integrality(form: LinearForm) -> bool:
    """Phi_n^-3 d_n^(A+2) q is an integer for q0, q0_hat and every q[j]."""
    n, A = form.params.n, form.params.A
    if n < 1:
        return True
    denoms = phi(n)
    scale = Fraction(denoms.d_n ** (A + 2), denoms.phi_n**3)
    labelled = [("q0", form.q0), ("q0_hat", form.q0_hat)]
    labelled += [(f"q[{j}]", qj) for j, qj in form.q]
    for label, x in labelled:
        if (scale * x).denominator != 1:
            raise IntegralityError(f"{label} fails the scaled integrality test")
    return True
