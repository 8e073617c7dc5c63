import numpy as np
import pytest

from scripts.exact import LaurentPoly, RatMatrix, rank
from scripts.p1sheaf import (
    CHARTS,
    CechCochain,
    TwistMismatchError,
    cech_delta,
    euler_characteristic,
    h0_basis,
    h0_dim,
    h1_basis,
    h1_coordinates,
    h1_dim,
    pairing_matrix,
    residue_pair,
    split_coboundary,
)

Z = LaurentPoly.monomial


@pytest.mark.parametrize("d, expected", [(0, [0]), (3, [0, 1, 2, 3]), (-1, [])])
def test_h0_basis(d, expected):
    assert h0_basis(d) == [Z(k) for k in expected]


@pytest.mark.parametrize("d, expected", [(-2, [-1]), (-5, [-4, -3, -2, -1]), (0, [])])
def test_h1_basis(d, expected):
    assert h1_basis(d) == [Z(k) for k in expected]


@pytest.mark.parametrize("d", range(-8, 9))
def test_riemann_roch(d):
    assert h0_dim(d) - h1_dim(d) == euler_characteristic(d) == d + 1


def test_delta_of_global_section_vanishes():
    one = LaurentPoly.constant(1)
    assert cech_delta(CechCochain.zero_cochain(one, one, 0)).overlap.is_zero


def test_delta_sign_convention():
    c = CechCochain.zero_cochain(Z(2), LaurentPoly.zero(), 0)
    assert cech_delta(c).overlap == -Z(2)


def test_chart_one_section_has_no_h1_class():
    # g(w) = w on U1 for O(-3) has z-form z^-4
    c = CechCochain.from_charts(LaurentPoly.zero(), Z(1), -3)
    overlap = cech_delta(c).overlap
    assert overlap == Z(-4)
    assert h1_coordinates(overlap, -3) == [0, 0]


def test_chart_regularity_is_enforced():
    with pytest.raises(ValueError):
        CechCochain.zero_cochain(Z(-1), LaurentPoly.zero(), 0)
    with pytest.raises(ValueError):
        CechCochain.zero_cochain(LaurentPoly.zero(), Z(1), 0)


def test_chart_transition_round_trip():
    f = LaurentPoly.from_list([1, -2, 0, 5])
    assert CHARTS.from_chart1(CHARTS.to_chart1(f, 3), 3) == f
    assert CHARTS.is_global(f, 3)
    assert not CHARTS.is_global(f, 2)


def test_split_coboundary_recovers_overlap():
    f = Z(2) + Z(-3)
    c = split_coboundary(f, -2)
    assert cech_delta(c).overlap == f


def test_split_coboundary_rejects_nonzero_class():
    with pytest.raises(ValueError):
        split_coboundary(Z(-1), -2)


def test_residue_pairing():
    assert residue_pair(Z(1), 1, Z(-2), -3) == 1
    assert residue_pair(Z(1), 1, Z(-3), -3) == 0


def test_twist_mismatch():
    with pytest.raises(TwistMismatchError):
        residue_pair(Z(0), 0, Z(-1), -1)


def test_pairing_matrix_is_antidiagonal():
    assert pairing_matrix(1) == RatMatrix([[0, 1], [1, 0]])


@pytest.mark.parametrize("d", range(-8, 9))
def test_residue_pairing_is_perfect(d):
    m = pairing_matrix(d)
    assert m.shape == (h0_dim(d), h1_dim(-2 - d))
    assert rank(m) == h0_dim(d) == h1_dim(-2 - d)


@pytest.mark.parametrize("d", range(-6, 7))
def test_coboundaries_have_zero_class(d):
    rng = np.random.Generator(np.random.PCG64(100 + d))
    for _ in range(5):
        c0 = LaurentPoly.from_list([int(c) for c in rng.integers(-4, 4, size=6, endpoint=True)])
        c1 = LaurentPoly.from_list([int(c) for c in rng.integers(-4, 4, size=6, endpoint=True)], start=d - 5)
        overlap = cech_delta(CechCochain.zero_cochain(c0, c1, d)).overlap
        assert not any(h1_coordinates(overlap, d))
