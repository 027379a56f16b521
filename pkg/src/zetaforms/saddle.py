"""Saddle-point asymptotics for the two series.

The factorial structure of the summand turns, after scaling the index by n,
into exp(n * phase(t)) times a slowly varying amplitude.  Each Fourier mode
of the cos^4 window shifts the phase by 2 l i pi t and moves the saddle
into the complex plane; the five shifted saddles near t = 1 carry the
whole asymptotic story.  This module finds them by Newton iteration,
evaluates the per-saddle contributions with a quadrature-calibrated root
branch, and assembles the large-n predictor that the exact linear forms
are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, workprec

from zetaforms.bigmath import DEFAULT_CONTEXT, DomainError, PrecisionContext, _mpf_here


class SaddleError(ArithmeticError):
    """Newton search or branch calibration failed to converge."""


@dataclass(frozen=True)
class PhaseFunction:
    """Phase of the scaled summand, shifted by the window mode l.

    phase_l(t) = phase_0(t) + 2 l i pi t, analytic on the plane minus the
    real rays (-inf, 0] and [1, +inf).
    """

    A: int
    ell: int

    def __post_init__(self) -> None:
        if not -2 <= self.ell <= 2:
            raise DomainError(f"window mode must lie in [-2, 2], got {self.ell}")
        if self.A < 15:
            raise DomainError(f"A must be >= 15, got {self.A}")


@dataclass(frozen=True)
class SaddlePoint:
    ell: int
    t: mpmath.mpc
    f_eff: mpmath.mpc
    g_val: mpmath.mpc
    g_hat_val: mpmath.mpc
    phi2: mpmath.mpc
    newton_residual: mpmath.mpf


def _require_in_domain(t: mpmath.mpc, ctx: PrecisionContext) -> None:
    """Reject points on the two real cuts or too near an endpoint.

    The endpoints 0 and 1 bound the cuts; -2 is where the inner logarithm's
    own cut would start if it were not already inside (-inf, 0].
    """
    t = mp.mpc(t)
    if t.imag == 0 and (t.real <= 0 or t.real >= 1):
        raise DomainError(f"point {t} lies on a branch cut")
    eps = mp.mpf(2) ** (-(ctx.prec_bits // 4))
    for endpoint in (0, 1, -2):
        if abs(t - endpoint) < eps:
            raise DomainError(f"point {t} is within 2^-prec/4 of cut endpoint {endpoint}")


def phase_eval(
    pf: PhaseFunction,
    t: mpmath.mpc,
    derivative: int = 0,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> mpmath.mpc:
    """phase_l, its first, or its second derivative, principal logs throughout.

    phase_0(t)  = (A+3) t log t + (6t+12) log(2t+4)
                  + (6-6t) log(2-2t) - (A+3)(t+1) log(t+1)
    phase_0'(t) = (A+3)(log t - log(t+1)) + 6 (log(2t+4) - log(2-2t))
                  (the product-rule constants cancel in pairs)
    phase_0''(t) = (A+3)/(t(t+1)) + 6 (1/(t+2) + 1/(1-t))
    """
    if derivative not in (0, 1, 2):
        raise ValueError(f"derivative must be 0, 1, or 2, got {derivative}")
    _require_in_domain(t, ctx)
    a3 = pf.A + 3
    with ctx.workprec(32):
        z = mp.mpc(t)
        if derivative == 0:
            val = (
                a3 * z * mp.log(z)
                + (6 * z + 12) * mp.log(2 * z + 4)
                + (6 - 6 * z) * mp.log(2 - 2 * z)
                - a3 * (z + 1) * mp.log(z + 1)
            )
            if pf.ell:
                val += 2 * pf.ell * mp.mpc(0, 1) * mp.pi * z
        elif derivative == 1:
            val = a3 * (mp.log(z) - mp.log(z + 1)) + 6 * (mp.log(2 * z + 4) - mp.log(2 - 2 * z))
            if pf.ell:
                val += 2 * pf.ell * mp.mpc(0, 1) * mp.pi
        else:
            val = a3 / (z * (z + 1)) + 6 * (1 / (z + 2) + 1 / (1 - z))
    with ctx.workprec():
        return +val


def amplitude_g(A: int, t: mpmath.mpc, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """Slowly varying factor multiplying exp(n * phase) in the plain series."""
    _require_in_domain(t, ctx)
    half = mp.mpf(A + 3) / 2
    with ctx.workprec(32):
        z = mp.mpc(t)
        num = (2 * z + 1) * mp.exp(mp.mpf(3) / 2 * (mp.log(2 * z + 4) + mp.log(2 - 2 * z)))
        den = mp.exp(half * (mp.log(z) + mp.log(z + 1)))
        val = num / den
    with ctx.workprec():
        return +val


def amplitude_g_hat(A: int, t: mpmath.mpc, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """Half-shifted amplitude: g times the ratio the index shift leaves behind.

    At a saddle the ratio collapses to (-1)^l, which is what makes the two
    series' asymptotics agree up to sign, mode by mode.
    """
    _require_in_domain(t, ctx)
    half = mp.mpf(A + 3) / 2
    with ctx.workprec(32):
        z = mp.mpc(t)
        ratio = mp.exp(half * (mp.log(z + 1) - mp.log(z))) * (2 - 2 * z) ** 3 / (2 * z + 4) ** 3
        val = mp.mpc(amplitude_g(A, z, ctx)) * ratio
    with ctx.workprec():
        return +val


def fourier_weights() -> dict[int, Fraction]:
    """Weights of the five window modes: cos^4 = sum_l u_l e^(2 i l x).

    Expanding (e^(ix) + e^(-ix))^4 / 16 gives 1/16, 1/4, 3/8, 1/4, 1/16;
    they sum to 1 as the value at x = 0 demands.
    """
    return {
        -2: Fraction(1, 16),
        -1: Fraction(1, 4),
        0: Fraction(3, 8),
        1: Fraction(1, 4),
        2: Fraction(1, 16),
    }


_NEWTON_SEEDS = {
    0: mpmath.mpc("0.9991", "0"),
    1: mpmath.mpc("0.9995", "-0.0007"),
    2: mpmath.mpc("1.0004", "-0.0007"),
}


def _seed_for(ell: int) -> mpmath.mpc:
    seed = _NEWTON_SEEDS[abs(ell)]
    return mp.conj(seed) if ell < 0 else seed


def find_saddle(A: int, ell: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> SaddlePoint:
    """Newton iteration on phase_l' from the known approximate location.

    Falls back to a grid scan over a 0.02-radius disk around the seed if
    the iteration leaves the domain or stalls.  The residual must end
    below 2^-(prec/2).
    """
    pf = PhaseFunction(A, ell)
    inner = ctx.bumped(64)
    target = mp.mpf(2) ** (-(ctx.prec_bits // 2))

    def newton_from(t0: mpmath.mpc) -> mpmath.mpc | None:
        with inner.workprec():
            t = mp.mpc(t0)
            for _ in range(200):
                try:
                    d1 = mp.mpc(phase_eval(pf, t, 1, inner))
                    d2 = mp.mpc(phase_eval(pf, t, 2, inner))
                except DomainError:
                    return None
                step = d1 / d2
                t = t - step
                if abs(step) < mp.mpf(2) ** (-(inner.working_bits - 8)) * max(1, abs(t)):
                    return t
            return None

    t_star = newton_from(_seed_for(ell))
    if t_star is None:
        t_star = _disk_rescue(pf, _seed_for(ell), inner, newton_from)
    with inner.workprec():
        residual = abs(mp.mpc(phase_eval(pf, t_star, 1, inner)))
        if residual > target:
            raise SaddleError(f"Newton residual {mp.nstr(residual, 8)} above target for l={ell}")
        sp = SaddlePoint(
            ell=ell,
            t=+t_star,
            f_eff=mp.exp(mp.mpc(phase_eval(pf, t_star, 0, inner))),
            g_val=mp.mpc(amplitude_g(A, t_star, inner)),
            g_hat_val=mp.mpc(amplitude_g_hat(A, t_star, inner)),
            phi2=mp.mpc(phase_eval(pf, t_star, 2, inner)),
            newton_residual=+residual,
        )
    return sp


def _disk_rescue(pf, seed, inner, newton_from):
    """Grid-scan a small disk for the least-|phase'| point, then re-Newton."""
    best, best_val = None, mp.inf
    with inner.workprec():
        for i in range(9):
            for k in range(16):
                radius = mp.mpf("0.02") * (i + 1) / 9
                cand = seed + radius * mp.exp(mp.mpc(0, 2 * mp.pi * k / 16))
                try:
                    v = abs(mp.mpc(phase_eval(pf, cand, 1, inner)))
                except DomainError:
                    continue
                if v < best_val:
                    best, best_val = cand, v
    if best is None:
        raise SaddleError(f"no admissible point near seed for l={pf.ell}")
    t_star = newton_from(best)
    if t_star is None:
        raise SaddleError(f"Newton failed from rescue point for l={pf.ell}")
    return t_star


# ---------------------------------------------------------------------------
# per-saddle contributions and the branch calibration


def _master_contribution(
    sp: SaddlePoint, n: int, which_hat: bool, sign: int, ctx: PrecisionContext
) -> mpmath.mpc:
    """i * amp * sign * sqrt(2 pi / (n phase'')) * f_eff^n."""
    with ctx.workprec(32):
        amp = sp.g_hat_val if which_hat else sp.g_val
        root = mp.sqrt(2 * mp.pi / (n * sp.phi2))
        val = mp.mpc(0, 1) * amp * sign * root * sp.f_eff**n
    with ctx.workprec():
        return +val


@lru_cache(maxsize=32)
def _branch_sign(A: int, ell: int) -> int:
    """Pin the square root's branch by a local steepest-descent quadrature.

    The master formula is exact for a Gaussian; integrating the real thing
    through the saddle along the descent direction and asking which sign of
    the root reproduces it settles the branch (and folds in the line's
    traversal orientation).  The saddles sit within about 1e-3 of the branch
    point at 1, so the calibration index must be large enough that the
    Gaussian window 10/sqrt(n |phi''|) shrinks well inside that distance;
    the sign itself does not depend on n.  Runs at a fixed modest precision;
    the answer is a unit, not a measurement.
    """
    cal_ctx = PrecisionContext(96, 64)
    pf = PhaseFunction(A, ell)
    sp = find_saddle(A, ell, cal_ctx)
    with cal_ctx.workprec(64):
        # (pi - arg(phi'')) / 2 lies in [0, pi): the upward crossing, matching
        # the traversal of the vertical lines the saddles came from.  Flipping
        # one member of a conjugate pair to a rightward convention would break
        # the pairing that keeps the weighted sum real.
        theta = (mp.pi - mp.arg(sp.phi2)) / 2
        direction = mp.exp(mp.mpc(0, 1) * theta)
        for n_cal in (10**6, 10**7, 10**8):
            width = 10 / mp.sqrt(n_cal * abs(sp.phi2))

            def local(s):
                z = sp.t + direction * s
                return mp.mpc(amplitude_g(A, z, cal_ctx)) * mp.exp(
                    n_cal * mp.mpc(phase_eval(pf, z, 0, cal_ctx))
                )

            numeric = direction * mp.quad(local, [-width, 0, width])
            plus = _master_contribution(sp, n_cal, False, +1, cal_ctx)
            d_plus, d_minus = abs(numeric - plus), abs(numeric + plus)
            if min(d_plus, d_minus) <= mp.mpf("0.5") * abs(numeric):
                return 1 if d_plus <= d_minus else -1
    raise SaddleError(f"branch calibration inconclusive for l={ell}")


def predict_S(
    A: int,
    n: int,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    which: str = "plain",
) -> mpmath.mpc:
    """Leading-order saddle prediction for the series value at index n.

    2 i (2 pi)^((A-9)/2) n^(-(A+9)/2) times the weighted sum of the five
    per-saddle contributions; the half-shifted series flips the overall
    sign and swaps in the half-shifted amplitude.  The o(1) corrections
    are genuinely absent, so this is an approximation whose quality
    improves with n, not a certified value.
    """
    if which not in ("plain", "hat"):
        raise ValueError(f"which must be 'plain' or 'hat', got {which!r}")
    if n < 2:
        raise DomainError(f"prediction needs n >= 2, got {n}")
    hat = which == "hat"
    weights = fourier_weights()
    with ctx.workprec(32):
        acc = mp.mpc(0)
        for ell in range(-2, 3):
            sp = find_saddle(A, ell, ctx)
            sign = _branch_sign(A, ell)
            u = weights[ell]
            acc += _mpf_here(u) * mp.mpc(_master_contribution(sp, n, hat, sign, ctx))
        pref = 2 * mp.mpc(0, 1) * (2 * mp.pi) ** (mp.mpf(A - 9) / 2) * mp.mpf(n) ** (
            -mp.mpf(A + 9) / 2
        )
        if hat:
            pref = -pref
        val = pref * acc
    with ctx.workprec():
        return +val


def kappa(A: int = 68, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """Decay rate of the dominant (outermost) shifted saddle: -log|f_eff(t_2)|."""
    sp = find_saddle(A, 2, ctx)
    with ctx.workprec():
        return -mp.log(abs(sp.f_eff))


def final_exponent(ctx: PrecisionContext = DEFAULT_CONTEXT, A: int = 68) -> mpmath.mpf:
    """(A+2) - kappa - 3 delta: negative exactly when the construction wins.

    At A = 68 this is about -0.0597; at A = 66 it crosses zero, which is
    the minimality diagnostic.
    """
    from zetaforms.arith import delta_integral

    with ctx.workprec(32):
        val = (A + 2) - kappa(A, ctx.bumped(32)) - 3 * mp.mpf(delta_integral(ctx.bumped(32)))
    with ctx.workprec():
        return +val


# ---------------------------------------------------------------------------
# reporting


def modulus_ordering(A: int = 68, ctx: PrecisionContext = DEFAULT_CONTEXT) -> bool:
    """|f_eff(t_2)| > |f_eff(t_1)| > |f_eff(t_0)|: the outer modes dominate."""
    with ctx.workprec():
        mods = [abs(find_saddle(A, ell, ctx).f_eff) for ell in (0, 1, 2)]
    return mods[2] > mods[1] > mods[0]


def dominant_subsequence(
    A: int, ns: tuple[int, ...], ctx: PrecisionContext = DEFAULT_CONTEXT
) -> list[int]:
    """Even indices where the weighted saddle sum, rescaled by the dominant
    mode's envelope, exceeds half its trailing maximum.  Diagnostic only:
    a plausible stand-in for the nonconstructive subsequence along which
    the two series' ratio approaches -1."""
    weights = fourier_weights()
    saddles = {ell: find_saddle(A, ell, ctx) for ell in range(-2, 3)}
    kap = kappa(A, ctx)
    scores: list[tuple[int, mpmath.mpf]] = []
    with ctx.workprec():
        for n in ns:
            if n % 2:
                continue
            acc = mp.mpc(0)
            for ell in range(-2, 3):
                acc += _mpf_here(weights[ell]) * mp.mpc(
                    _master_contribution(saddles[ell], n, False, _branch_sign(A, ell), ctx)
                )
            scores.append((n, abs(acc) * mp.exp(kap * n) * mp.sqrt(n)))
    chosen = []
    for i, (n, s) in enumerate(scores):
        trailing = max(v for _, v in scores[i:])
        if s > trailing / 2:
            chosen.append(n)
    return chosen


def asymptotic_report(
    A: int = 68,
    ns: tuple[int, ...] = (8, 10, 12, 14, 16),
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> dict:
    """Saddle data, constants, and the exact-vs-predicted comparison table.

    The calibration_factor entry is predicted/exact at the smallest
    reported n: it is reported, never folded back into the predictions.
    """
    from zetaforms.arith import delta_integral
    from zetaforms.forms import S_direct
    from zetaforms.rfunc import Parameters

    def cstr(z, digits=20):
        return {"re": mp.nstr(mp.mpc(z).real, digits), "im": mp.nstr(mp.mpc(z).imag, digits)}

    with ctx.workprec():
        saddle_rows = []
        for ell in range(-2, 3):
            sp = find_saddle(A, ell, ctx)
            saddle_rows.append(
                {
                    "l": ell,
                    "t": cstr(sp.t),
                    "f_eff": cstr(sp.f_eff),
                    "g": cstr(sp.g_val),
                    "g_hat": cstr(sp.g_hat_val),
                    "phase2": cstr(sp.phi2),
                    "newton_residual": mp.nstr(sp.newton_residual, 8),
                    "branch_sign": _branch_sign(A, ell),
                }
            )
        kap = kappa(A, ctx)
        delta = delta_integral(ctx)
        expo = final_exponent(ctx, A)

        rows = []
        prev_gap = None
        for n in ns:
            exact = S_direct(Parameters(n, A), ctx)
            pred = predict_S(A, n, ctx)
            lg_exact = mp.log(abs(exact))
            lg_pred = mp.log(abs(mp.mpc(pred)))
            gap = abs(lg_exact - lg_pred) / abs(lg_exact)
            rows.append(
                {
                    "n": n,
                    "log_abs_exact": mp.nstr(lg_exact, 20),
                    "log_abs_predicted": mp.nstr(lg_pred, 20),
                    "relative_log_gap": mp.nstr(gap, 8),
                    "gap_decreasing": None if prev_gap is None else bool(gap < prev_gap),
                }
            )
            prev_gap = gap
        n0 = ns[0]
        cal = mp.mpc(predict_S(A, n0, ctx)) / mp.mpf(S_direct(Parameters(n0, A), ctx))
        report = {
            "A": A,
            "weights_note": (
                "window weights 1/16, 1/4, 3/8 from the exponential expansion of cos^4; "
                "they sum to 1"
            ),
            "saddles": saddle_rows,
            "kappa": mp.nstr(kap, 25),
            "delta": mp.nstr(mp.mpf(delta), 25),
            "final_exponent": mp.nstr(expo, 25),
            "modulus_ordering": modulus_ordering(A, ctx),
            "comparison": rows,
            "calibration_factor": cstr(cal, 12),
            "dominant_even_indices": dominant_subsequence(A, tuple(ns), ctx),
        }
    return report
