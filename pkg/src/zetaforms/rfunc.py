"""The structured rational function family and its exact decompositions.

Everything here is exact: the function is kept in factored form (a constant,
a multiset of linear factors with integer exponents, one affine factor), and
all expansions are truncated series with Fraction coefficients.  Numerical
evaluation lives elsewhere; this module never rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Optional, Sequence

from zetaforms.bigmath import (
    DomainError,
    RationalLike,
    SeriesError,
    TruncatedSeries,
    binomial_factor_series,
    format_rational,
    rat,
    series_prod,
)


class PoleError(DomainError):
    """Evaluation or expansion requested at a pole."""


class CertificationError(ArithmeticError):
    """An exact identity that must hold failed to verify."""


@dataclass(frozen=True)
class Parameters:
    """Size parameters: n is the index of the family member, A the pole order.

    Validity requires A >= 15 (so the function decays at least like t^-2 and
    every series converges absolutely).  The zeta-expansion layer needs both
    n and A even with A >= 16; that stricter gate is enforced where those
    operations live, not here.
    """

    n: int
    A: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.A < 15:
            raise ValueError(f"A must be >= 15, got {self.A}")

    @property
    def degree(self) -> int:
        """Degree of the function as t -> inf; always <= -2."""
        return (15 - self.A) * self.n - self.A + 1

    @property
    def even_even(self) -> bool:
        return self.n % 2 == 0 and self.A % 2 == 0 and self.A >= 16

    def require_even_even(self) -> None:
        if not self.even_even:
            raise DomainError(
                f"operation requires even n, even A >= 16; got n={self.n}, A={self.A}"
            )


@dataclass(frozen=True)
class FactoredRational:
    """constant * prod (t - root)^exp * (a*t + b), fully exact.

    ``linear_factors`` may repeat roots between numerator and denominator
    (one of the two constructions below does); :meth:`merged_factors` gives
    the net exponent per root with the affine factor folded in.
    """

    constant: Fraction
    linear_factors: tuple[tuple[Fraction, int], ...]
    extra_affine: tuple[Fraction, Fraction]  # (a, b) for a*t + b

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.linear_factors) + 1

    def merged_factors(self) -> tuple[Fraction, tuple[tuple[Fraction, int], ...]]:
        """(effective constant, sorted distinct (root, net exponent) pairs)."""
        a, b = self.extra_affine
        merged: dict[Fraction, int] = {}
        for root, e in self.linear_factors:
            merged[root] = merged.get(root, 0) + e
        affine_root = -b / a
        merged[affine_root] = merged.get(affine_root, 0) + 1
        pairs = tuple(
            (root, e) for root, e in sorted(merged.items()) if e != 0
        )
        return self.constant * a, pairs

    def poles(self) -> tuple[Fraction, ...]:
        _, pairs = self.merged_factors()
        return tuple(root for root, e in pairs if e < 0)

    def root_multiplicity(self, point: RationalLike) -> int:
        """Net exponent of (t - point); 0 if the point is neither root nor pole."""
        p = Fraction(point)
        _, pairs = self.merged_factors()
        for root, e in pairs:
            if root == p:
                return e
        return 0


def build_R(params: Parameters, construction: int = 1) -> FactoredRational:
    """The family member for (n, A), as explicit linear factors.

    Two equivalent factorizations are supported; they must agree everywhere
    and the overlap between them is a useful cross-check:

    * construction 1: three cubed rising products (two over integers offset
      by +-n, one over half-integers of length 3n) over an order-A power of
      the central falling block;
    * construction 2: one cubed rising product of length 6n+1 in 2t over an
      order-(A+3) power of the same block, the duplicated integer roots
      cancelling three of the extra pole orders.
    """
    n, A = params.n, params.A
    const = Fraction(factorial(n)) ** (A - 15) * Fraction(2) ** (18 * n)
    factors: list[tuple[Fraction, int]] = []
    if construction == 1:
        for k in range(1, n + 1):
            factors.append((rat(k), 3))
        for k in range(n + 1, 2 * n + 1):
            factors.append((rat(-k), 3))
        for i in range(3 * n):
            factors.append((rat(2 * n - 1 - 2 * i, 2), 3))  # n - 1/2 - i
        for k in range(n + 1):
            factors.append((rat(-k), -A))
    elif construction == 2:
        # (2t - 2n + i) = 2 (t - (n - i/2)); the 2^(3(6n+1)) absorbed above
        for i in range(6 * n + 1):
            factors.append((rat(n) - rat(i, 2), 3))
        for k in range(n + 1):
            factors.append((rat(-k), -(A + 3)))
    else:
        raise ValueError(f"construction must be 1 or 2, got {construction}")
    fr = FactoredRational(const, tuple(factors), (rat(2), rat(n)))
    if fr.degree != params.degree:
        raise AssertionError("factor bookkeeping broke the degree identity")
    return fr


def evaluate_R(fr: FactoredRational, t: RationalLike) -> Fraction:
    """Exact value at a rational point; PoleError at a pole."""
    tf = Fraction(t)
    const, pairs = fr.merged_factors()
    for root, e in pairs:
        if root == tf and e < 0:
            raise PoleError(f"evaluation at pole t={tf} (order {-e})")
    value = const
    for root, e in pairs:
        base = tf - root
        if not base:  # net positive multiplicity: the value is exactly zero
            return Fraction(0)
        value *= base**e
    return value


def series_at(fr: FactoredRational, center: RationalLike, order: int) -> TruncatedSeries:
    """Truncated expansion of the function around a non-pole center.

    A center that is a root is fine (leading coefficients are zero); a
    center that is a pole is refused.
    """
    c = Fraction(center)
    const, pairs = fr.merged_factors()
    zero_mult = 0
    factor_series: list[TruncatedSeries] = []
    for root, e in pairs:
        if root == c:
            if e < 0:
                raise PoleError(f"series requested at pole t={c} (order {-e})")
            zero_mult += e
        else:
            factor_series.append(binomial_factor_series(root, e, c, order))
    if zero_mult > order:
        return TruncatedSeries(c, (Fraction(0),) * (order + 1))
    prod = series_prod(factor_series) if factor_series else None
    coeffs = [Fraction(0)] * (order + 1)
    if prod is None:
        coeffs[zero_mult] = const
    else:
        for i in range(order + 1 - zero_mult):
            coeffs[i + zero_mult] = const * prod.coeffs[i]
    return TruncatedSeries(c, tuple(coeffs))


def vanishing_check(params: Parameters) -> bool:
    """Triple zeros at 1..n and at 1/2..n-1/2, read off factor multiplicities.

    These are the points whose series terms drop out of the two summed
    families, so both sums effectively start past the zero block.
    """
    fr = build_R(params)
    for k in range(1, params.n + 1):
        if fr.root_multiplicity(k) < 3:
            return False
        if fr.root_multiplicity(Fraction(2 * k - 1, 2)) < 3:
            return False
    return True


# ---------------------------------------------------------------------------
# partial fractions


@dataclass(frozen=True)
class PartialFractionTable:
    """Exact coefficients p[j][m] of the inverse-power expansion.

    The function equals sum over j in 1..A, m in 0..n of
    p[j][m] / (t + m)^j; rows are indexed by pole order j, columns by the
    pole location -m.
    """

    params: Parameters
    rows: tuple[tuple[Fraction, ...], ...]  # rows[j-1][m]

    def coefficient(self, j: int, m: int) -> Fraction:
        if not 1 <= j <= self.params.A:
            raise IndexError(f"pole order j={j} outside 1..{self.params.A}")
        if not 0 <= m <= self.params.n:
            raise IndexError(f"column m={m} outside 0..{self.params.n}")
        return self.rows[j - 1][m]

    def row_sum(self, j: int) -> Fraction:
        return sum(self.rows[j - 1], Fraction(0))

    def check_residue_sum(self) -> None:
        """Sum of first-order residues must vanish: the function is o(1/t)."""
        if self.row_sum(1) != 0:
            raise CertificationError("first-order residues do not sum to zero")

    def check_even_rows(self) -> None:
        """For even n and A, every even-j row sums to zero."""
        self.params.require_even_even()
        for j in range(2, self.params.A + 1, 2):
            if self.row_sum(j) != 0:
                raise CertificationError(f"even row j={j} has nonzero sum")

    def check_symmetry(self) -> None:
        """For even n and A: p[j][m] = (-1)^(j+1) p[j][n-m]."""
        self.params.require_even_even()
        n = self.params.n
        for j in range(1, self.params.A + 1):
            sign = 1 if j % 2 == 1 else -1
            for m in range(n + 1):
                if self.rows[j - 1][m] != sign * self.rows[j - 1][n - m]:
                    raise CertificationError(
                        f"reflection symmetry fails at j={j}, m={m}"
                    )

    def to_json_dict(self) -> dict:
        return {
            "n": self.params.n,
            "A": self.params.A,
            "p": [[format_rational(x) for x in row] for row in self.rows],
        }


def partial_fractions(params: Parameters) -> PartialFractionTable:
    """Exact inverse-power coefficients via order-A series at each pole.

    At center -m the pole factor's exponent is raised by A (never past
    zero from below: the net pole order is at most A), leaving a function
    regular at the center; its series coefficient at (t+m)^(A-j) is p[j][m].
    Division by a zero-constant series never occurs by construction.
    """
    fr = build_R(params)
    n, A = params.n, params.A
    const, pairs = fr.merged_factors()
    cols: list[list[Fraction]] = []
    for m in range(n + 1):
        center = rat(-m)
        factor_series: list[TruncatedSeries] = []
        shifted_mult = 0
        for root, e in pairs:
            if root == center:
                shifted_mult = e + A  # cancel the (t+m)^A pole exactly
                if shifted_mult < 0:
                    raise AssertionError("pole order exceeds A; table undefined")
            else:
                factor_series.append(binomial_factor_series(root, e, center, A))
        coeffs = [Fraction(0)] * (A + 1)
        if factor_series:
            prod = series_prod(factor_series)
            for i in range(A + 1 - shifted_mult):
                coeffs[i + shifted_mult] = const * prod.coeffs[i]
        elif shifted_mult <= A:
            coeffs[shifted_mult] = const
        cols.append([coeffs[A - j] for j in range(1, A + 1)])
    rows = tuple(
        tuple(cols[m][j - 1] for m in range(n + 1)) for j in range(1, A + 1)
    )
    return PartialFractionTable(params, rows)


def reconstruction_points(params: Parameters, extra: int = 8) -> tuple[Fraction, ...]:
    """A certifying point set: more points than the degrees of both sides.

    The difference of the two representations, over the common denominator,
    is a polynomial of degree below A(n+1) + (numerator degree); vanishing
    at that many distinct non-pole points forces it to vanish identically.
    """
    n, A = params.n, params.A
    count = A * (n + 1) + (15 * n + 1) + extra
    return tuple(Fraction(6 * k + 1, 6) for k in range(count))


def verify_reconstruction(
    table: PartialFractionTable,
    points: Optional[Sequence[RationalLike]] = None,
) -> bool:
    """Exact equality of the factored form and its inverse-power expansion.

    Raises CertificationError on the first mismatching point; True means
    the identity is forced everywhere (see :func:`reconstruction_points`).
    """
    params = table.params
    fr = build_R(params)
    pts = (
        tuple(Fraction(p) for p in points)
        if points is not None
        else reconstruction_points(params)
    )
    n, A = params.n, params.A
    for t in pts:
        lhs = evaluate_R(fr, t)
        rhs = Fraction(0)
        for m in range(n + 1):
            inv = 1 / (t + m)
            power = Fraction(1)
            col = [table.rows[j - 1][m] for j in range(1, A + 1)]
            for j in range(1, A + 1):
                power *= inv
                pj = col[j - 1]
                if pj:
                    rhs += pj * power
        if lhs != rhs:
            raise CertificationError(f"reconstruction fails at t={t}")
    return True
