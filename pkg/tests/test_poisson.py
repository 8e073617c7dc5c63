import pytest

from scripts.exact import LaurentPoly, rank
from scripts.hitchin import PoissonSection, hitchin_base_dim
from scripts.poisson import (
    adjoint_check,
    commutation_data,
    hamiltonian_commutation,
    hitchin_differential,
    hitchin_matrix,
    linearity_check,
    moduli_point,
    poisson_hitchin,
    poisson_sheaf,
    sheaf_side,
    skew_check,
    verify_theorem1,
)


# ================================
# Phi_* B^H = B
# ================================
def test_rank_one_passes(r1n1):
    pair, sigma = r1n1
    report = verify_theorem1(pair, sigma)
    assert report.passed
    assert report.difference.is_zero()
    # genus-0 spectral curve: B^H vanishes identically
    assert report.hitchin.is_zero()
    assert poisson_sheaf(pair, sigma).matrix == poisson_hitchin(pair, sigma).matrix


def test_smooth_rank_two_passes(r2n1):
    pair, sigma = r2n1
    report = verify_theorem1(pair, sigma)
    assert report.passed
    assert report.hitchin.shape == (5, 5)
    assert report.adjoint_ok


def test_genus_one_passes_with_nonzero_bracket(r2n2):
    pair, sigma = r2n2
    report = verify_theorem1(pair, sigma)
    assert report.passed
    assert report.detectable
    assert not report.hitchin.is_zero()


def test_sign_fault_is_detected(r2n2):
    pair, sigma = r2n2
    report = verify_theorem1(pair, sigma, inject_sign_fault=True)
    assert not report.passed
    assert report.difference == report.hitchin * -2


def test_sign_fault_invisible_when_bracket_vanishes(r2n1):
    pair, sigma = r2n1
    report = verify_theorem1(pair, sigma, inject_sign_fault=True)
    assert not report.detectable
    assert report.passed


@pytest.mark.slow
def test_rank_three_passes(r3n1):
    pair, sigma = r3n1
    assert verify_theorem1(pair, sigma).passed


# ================================
# Poisson properties
# ================================
@pytest.mark.parametrize("sample", ["r1n1", "r2n1", "r2n2"])
def test_skew_symmetry(sample, request):
    pair, sigma = request.getfixturevalue(sample)
    assert skew_check(pair, sigma)
    assert poisson_hitchin(pair, sigma).rank % 2 == 0


def test_hamiltonians_commute(r2n1, r2n2):
    for pair, sigma in (r2n1, r2n2):
        assert hamiltonian_commutation(pair, sigma) == 0


def test_casimirs_on_genus_one_sample(r2n2):
    pair, sigma = r2n2
    data = commutation_data(pair, sigma)
    assert data.max_abs == 0
    assert data.brackets.shape == (hitchin_base_dim(2, 2),) * 2
    assert data.poisson_rank == rank(poisson_hitchin(pair, sigma).matrix) > 0


def test_linearity_in_sigma(r2n2):
    pair, sigma = r2n2
    other = PoissonSection(pair.n, (0, 1, -1, 0, 2))
    assert linearity_check(pair, sigma, other)


def test_scaling_sigma_scales_both_sides(r2n2):
    pair, sigma = r2n2
    point = moduli_point(pair)
    doubled = sigma.scaled(2)
    assert hitchin_matrix(point, doubled.poly) == hitchin_matrix(point, sigma.poly) * 2
    assert poisson_sheaf(pair, doubled).matrix == poisson_sheaf(pair, sigma).matrix * 2


def test_zero_section_gives_zero_matrix(r2n2):
    point = moduli_point(r2n2[0])
    assert sheaf_side(point, LaurentPoly.zero()).matrix.is_zero()


def test_identifications_are_adjoint(r2n2):
    point = moduli_point(r2n2[0])
    side = sheaf_side(point, r2n2[1].poly)
    assert adjoint_check(point, side.phi_tangent, side.phi_cotangent)


def test_section_degree_is_checked(r2n1):
    point = moduli_point(r2n1[0])
    with pytest.raises(ValueError):
        hitchin_matrix(point, LaurentPoly.monomial(4))


@pytest.mark.parametrize("sample", ["r2n1", "r2n2"])
def test_hitchin_differential_shape(sample, request):
    pair, _ = request.getfixturevalue(sample)
    point = moduli_point(pair)
    g = hitchin_differential(point)
    assert g.shape == (hitchin_base_dim(pair.rank, pair.n), point.dim)
