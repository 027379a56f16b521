"""Linear forms: closed-form coefficients, two evaluation routes, elimination."""

from fractions import Fraction

import pytest
from mpmath import mp

from zetaforms import forms
from zetaforms.arith import phi
from zetaforms.bigmath import DomainError, PrecisionContext, zeta_int
from zetaforms.forms import (
    EliminationForm,
    IntegralityError,
    S_direct,
    S_via_zeta,
    check_p_integrality,
    check_q_integrality,
    elimination_value,
    eliminate,
    integerize,
    q0_hat_alt,
    q_coefficients,
)
from zetaforms.rfunc import Parameters, PartialFractionTable, partial_fractions


def _form(n: int, A: int):
    return q_coefficients(partial_fractions(Parameters(n, A)))


def test_base_case_coefficients():
    form = _form(0, 68)
    q = form.q_dict()
    assert form.zeta_indices() == tuple(range(5, 70, 2))
    assert q[69] == Fraction(9112)
    assert all(q[j] == 0 for j in range(5, 68, 2))
    assert form.q0 == 0 and form.q0_hat == 0


def test_parity_gate():
    with pytest.raises(DomainError):
        _form(1, 16)
    with pytest.raises(DomainError):
        _form(2, 17)


def test_zeta_weight_hat_twist():
    form = _form(2, 16)
    for j, qj in form.q:
        assert form.zeta_weight(j, "plain") == qj
        assert form.zeta_weight(j, "hat") == qj * (2**j - 1)
    with pytest.raises(ValueError):
        form.constant("both")


def test_form_json_shape():
    d = _form(2, 16).to_json_dict()
    assert set(d) == {"n", "A", "omega", "q0", "q0_hat", "q"}
    assert d["omega"] == 0
    assert set(d["q"]) == {"5", "7", "9", "11", "13", "15", "17"}


def test_routes_agree_smoke(ctx256):
    # the acceptance gates sweep the full grid; one even-even case here
    p = Parameters(2, 16)
    form = _form(2, 16)
    for which in ("plain", "hat"):
        direct = S_direct(p, ctx256, which=which)
        via = S_via_zeta(form, ctx256, which=which)
        with ctx256.workprec():
            assert abs(direct - via) <= abs(direct) * mp.mpf(2) ** -240


def test_s_direct_handles_any_parity(ctx128):
    # the series route has no parity gate; n=3, A=17 sums fine
    v = S_direct(Parameters(3, 17), ctx128)
    with ctx128.workprec():
        assert v != 0


def test_s_direct_precision_self_consistency():
    # different cut and closure order at each precision, same number
    p = Parameters(2, 16)
    lo = S_direct(p, PrecisionContext(128, 64))
    hi = S_direct(p, PrecisionContext(320, 64))
    with PrecisionContext(320, 64).workprec():
        assert abs(lo - hi) <= abs(hi) * mp.mpf(2) ** -126


def test_q0_hat_alt_equals_direct():
    for n in (2, 4):
        table = partial_fractions(Parameters(n, 16))
        assert q0_hat_alt(table) == q_coefficients(table).q0_hat
    with pytest.raises(DomainError):
        q0_hat_alt(partial_fractions(Parameters(0, 68)))


def test_eliminate_cancels_target():
    form = _form(2, 16)
    elim = eliminate(form, 5)
    assert 5 not in elim.c_dict()
    assert elim.c0 == (2**5 - 1) * form.q0 - form.q0_hat
    for j, cj in elim.c:
        assert cj == (2**5 - 2**j) * form.q_dict()[j]
    for bad in (4, 3, 19):
        with pytest.raises(DomainError):
            eliminate(form, bad)


def test_elimination_value_matches_combination(ctx256):
    p = Parameters(2, 16)
    form = _form(2, 16)
    elim = eliminate(form, 5)
    val = elimination_value(elim, ctx256)
    with ctx256.workprec():
        combo = (2**5 - 1) * S_direct(p, ctx256, "plain") - S_direct(p, ctx256, "hat")
        assert abs(val - combo) <= abs(combo) * mp.mpf(2) ** -240


def test_integerize_scales_exactly():
    elim = eliminate(_form(2, 16), 5)
    intf = integerize(elim)
    denoms = phi(2)
    scale = Fraction(denoms.d_n**18, denoms.phi_n**3)
    assert Fraction(intf.Q0) == scale * elim.c0
    for (j, Qj), (j2, cj) in zip(intf.Q, elim.c):
        assert j == j2 and Fraction(Qj) == scale * cj


def test_integerize_rejects_foreign_denominators():
    elim = eliminate(_form(2, 16), 5)
    with pytest.raises(DomainError):
        integerize(elim, phi(4))


def test_integerize_raises_on_non_integral():
    base = eliminate(_form(2, 16), 5)
    bad = EliminationForm(base.params, base.m, Fraction(1, 10**9 + 7), base.c)
    with pytest.raises(IntegralityError):
        integerize(bad)


def test_integrality_checks_pass_small():
    table = partial_fractions(Parameters(2, 16))
    assert check_p_integrality(table, refined=False)
    assert check_p_integrality(table, refined=True)
    assert check_q_integrality(q_coefficients(table))


def test_p_integrality_detects_corruption():
    table = partial_fractions(Parameters(2, 16))
    rows = [list(r) for r in table.rows]
    rows[0][1] += Fraction(1, 10**9 + 9)
    bad = PartialFractionTable(table.params, tuple(tuple(r) for r in rows))
    with pytest.raises(IntegralityError):
        check_p_integrality(bad, refined=False)


def test_zeta_combination_survives_huge_cancellation(ctx256):
    # the n=2, A=16 plain value is ~26 bits below its largest term; push a
    # synthetic case with q ~ 2^200 against the exact zeta relation
    big = Fraction(2**200 + 1)
    val = forms._zeta_combination(
        -big * 2, [(3, big), (3, big)], ctx256
    )
    with ctx256.workprec():
        expect = big * 2 * (zeta_int(3, ctx256) - 1)
        assert abs(val - expect) <= abs(expect) * mp.mpf(2) ** -250
