"""The rational-function family: exact construction, expansion, certification."""

from fractions import Fraction

import pytest

from zetaforms.bigmath import DomainError
from zetaforms.rfunc import (
    CertificationError,
    Parameters,
    PartialFractionTable,
    PoleError,
    build_R,
    evaluate_R,
    partial_fractions,
    reconstruction_points,
    series_at,
    vanishing_check,
    verify_reconstruction,
)


def test_parameters_validation():
    with pytest.raises(ValueError):
        Parameters(-1, 16)
    with pytest.raises(ValueError):
        Parameters(2, 14)
    p = Parameters(4, 16)
    assert p.even_even
    assert not Parameters(3, 16).even_even
    assert not Parameters(4, 17).even_even
    with pytest.raises(DomainError):
        Parameters(1, 16).require_even_even()


def test_degree_identity():
    # degree as t -> inf must match the factor bookkeeping for both builds
    for n, A in ((0, 15), (1, 16), (2, 16), (3, 17), (2, 68)):
        p = Parameters(n, A)
        assert build_R(p, 1).degree == p.degree
        assert build_R(p, 2).degree == p.degree
        assert p.degree <= -2


def test_constructions_agree_pointwise(rng):
    for n, A in ((1, 15), (2, 16), (3, 16), (4, 17)):
        p = Parameters(n, A)
        f1, f2 = build_R(p, 1), build_R(p, 2)
        for _ in range(12):
            t = Fraction(rng.randint(1, 400), rng.randint(1, 40)) + Fraction(1, 7)
            assert evaluate_R(f1, t) == evaluate_R(f2, t)
    with pytest.raises(ValueError):
        build_R(Parameters(2, 16), 3)


def test_evaluate_at_poles_and_roots():
    fr = build_R(Parameters(2, 16))
    for m in (0, -1, -2):
        with pytest.raises(PoleError):
            evaluate_R(fr, m)
    # triple roots at 1..n and the half-integer block
    assert evaluate_R(fr, 1) == 0
    assert evaluate_R(fr, Fraction(3, 2)) == 0
    assert evaluate_R(fr, Fraction(700, 3)) != 0


def test_vanishing_and_multiplicities():
    for n, A in ((1, 15), (2, 16), (4, 16)):
        assert vanishing_check(Parameters(n, A))
    fr = build_R(Parameters(2, 16))
    assert fr.root_multiplicity(1) == 3
    assert fr.root_multiplicity(Fraction(1, 2)) == 3
    assert fr.root_multiplicity(0) == -16
    assert fr.root_multiplicity(-1) == -15  # affine zero cancels one pole order
    assert fr.root_multiplicity(Fraction(9, 4)) == 0


def test_series_matches_construction_cross_check(rng):
    # the two factorizations expand to the identical jet at shared centers
    p = Parameters(2, 16)
    f1, f2 = build_R(p, 1), build_R(p, 2)
    for _ in range(6):
        c = Fraction(rng.randint(3, 60), 7)
        assert series_at(f1, c, 6) == series_at(f2, c, 6)


def test_series_at_root_center_has_zero_head():
    fr = build_R(Parameters(2, 16))
    s = series_at(fr, 1, 5)
    assert s.coeffs[0] == s.coeffs[1] == s.coeffs[2] == 0
    assert s.coeffs[3] != 0
    with pytest.raises(PoleError):
        series_at(fr, -1, 4)


def test_partial_fraction_reconstruction_small():
    for n, A in ((0, 15), (1, 15), (2, 16), (3, 17)):
        table = partial_fractions(Parameters(n, A))
        assert verify_reconstruction(table)


def test_reconstruction_point_count():
    p = Parameters(2, 16)
    pts = reconstruction_points(p)
    assert len(pts) == 16 * 3 + 31 + 8
    assert len(set(pts)) == len(pts)


def test_reconstruction_rejects_corruption():
    table = partial_fractions(Parameters(2, 16))
    rows = [list(r) for r in table.rows]
    rows[4][1] += Fraction(1, 97)
    bad = PartialFractionTable(table.params, tuple(tuple(r) for r in rows))
    with pytest.raises(CertificationError):
        verify_reconstruction(bad)


def test_residue_sum_and_even_rows():
    table = partial_fractions(Parameters(2, 16))
    table.check_residue_sum()
    table.check_even_rows()
    table.check_symmetry()
    with pytest.raises(DomainError):
        partial_fractions(Parameters(3, 17)).check_even_rows()


def test_symmetry_detects_corruption():
    table = partial_fractions(Parameters(2, 16))
    rows = [list(r) for r in table.rows]
    rows[1][0] += 1  # j=2 row, breaks the antisymmetric pairing
    bad = PartialFractionTable(table.params, tuple(tuple(r) for r in rows))
    with pytest.raises(CertificationError):
        bad.check_symmetry()
    with pytest.raises(CertificationError):
        bad.check_even_rows()


def test_coefficient_indexing():
    table = partial_fractions(Parameters(1, 15))
    assert table.coefficient(1, 0) == table.rows[0][0]
    with pytest.raises(IndexError):
        table.coefficient(0, 0)
    with pytest.raises(IndexError):
        table.coefficient(16, 0)
    with pytest.raises(IndexError):
        table.coefficient(1, 2)


def test_table_json_shape():
    table = partial_fractions(Parameters(1, 15))
    d = table.to_json_dict()
    assert d["n"] == 1 and d["A"] == 15
    assert len(d["p"]) == 15 and len(d["p"][0]) == 2
    assert all(isinstance(x, str) and "/" in x for row in d["p"] for x in row)
