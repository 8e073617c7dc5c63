from fractions import Fraction

import numpy as np
import pytest

from scripts.exact import LaurentPoly
from scripts.hitchin import (
    BundleMap,
    BundleP1,
    HitchinPair,
    PoissonSection,
    StabilityCertificate,
    UnstablePairError,
    cayley_hamilton_residual,
    char_poly,
    char_poly_derivative,
    conjugate,
    endomorphism_check,
    hitchin_base_dim,
    hitchin_map,
    is_stable,
    pair_from_json,
    pair_to_json,
    random_pair,
    require_stable,
)
from scripts.spectral import SmoothnessCertificate, smoothness_certificate, spectral_curve

Z = LaurentPoly.monomial


def tilted_pair():
    """[[z, 1], [z^2 + 1, -z]] on O + O(1): c_2 = -2z^2 - 1."""
    return HitchinPair.build((0, 1), 1, [[[0, 1], [1]], [[1, 0, 1], [0, -1]]])


# ================================
# char_poly / hitchin_map
# ================================
def test_rank_one_char_poly(r1n1):
    pair, _ = r1n1
    assert char_poly(pair) == [LaurentPoly.from_list([-2, -3])]
    assert hitchin_map(pair) == [-2, -3]


def test_trace_free_two_by_two(r2n2):
    pair, _ = r2n2
    c1, c2 = char_poly(pair)
    p, q = pair.theta.entries[0][1], pair.theta.entries[1][0]
    assert c1.is_zero
    assert c2 == -(p * q)


def test_tilted_example():
    pair = tilted_pair()
    assert char_poly(pair) == [LaurentPoly.zero(), LaurentPoly.from_list([-1, 0, -2])]
    assert hitchin_map(pair) == [0, 0, -1, 0, -2]


def test_zero_theta_has_zero_hitchin_image(zero_pair):
    assert hitchin_map(zero_pair) == [0] * hitchin_base_dim(2, 1)


def test_cayley_hamilton(r2n2, r3n1):
    for pair, _ in (r2n2, r3n1):
        assert all(e.is_zero for row in cayley_hamilton_residual(pair) for e in row)


def test_char_poly_derivative_matches_central_difference(r2n2):
    # c(theta + tB) has degree <= 2 in t for r = 2, so the central difference is exact
    pair, _ = r2n2
    theta = pair.theta.entries
    direction = [[Z(1), LaurentPoly.constant(2)], [Z(2), -Z(1)]]
    plus = HitchinPair.build((0, 0), 2, [[theta[i][j] + direction[i][j] for j in range(2)] for i in range(2)])
    minus = HitchinPair.build((0, 0), 2, [[theta[i][j] - direction[i][j] for j in range(2)] for i in range(2)])
    expected = [Fraction(1, 2) * (a - b) for a, b in zip(char_poly(plus), char_poly(minus))]
    assert char_poly_derivative(theta, direction) == expected


# ================================
# stability / endomorphisms
# ================================
def test_rank_one_is_integral(r1n1):
    assert is_stable(r1n1[0]) is StabilityCertificate.INTEGRAL_SPECTRAL_CURVE


def test_smooth_sample_is_certified(r2n1):
    assert is_stable(r2n1[0]) is StabilityCertificate.SMOOTH_SPECTRAL_CURVE


def test_zero_theta_is_unknown(zero_pair):
    assert is_stable(zero_pair) is StabilityCertificate.UNKNOWN
    with pytest.raises(UnstablePairError):
        require_stable(zero_pair)


def test_endomorphisms(r1n1, r2n1, zero_pair):
    assert endomorphism_check(r1n1[0]) == 1
    assert endomorphism_check(r2n1[0]) == 1
    assert endomorphism_check(zero_pair) == 4


def test_conjugation_preserves_char_poly(r2n2):
    pair, _ = r2n2
    e = pair.bundle
    one, zero = LaurentPoly.constant(1), LaurentPoly.zero()
    g = BundleMap(e, e, [[one, one], [zero, one]])
    g_inv = BundleMap(e, e, [[one, -one], [zero, one]])
    other = conjugate(pair, g, g_inv)
    assert other != pair
    assert char_poly(other) == char_poly(pair)


# ================================
# validation
# ================================
def test_entry_degree_is_checked():
    with pytest.raises(ValueError):
        HitchinPair.build((0, 0), 1, [[[0, 0, 1], [0]], [[0], [0]]])


def test_twist_must_be_positive():
    with pytest.raises(ValueError):
        HitchinPair.build((0,), 0, [[[1]]])


def test_poisson_section_shape():
    with pytest.raises(ValueError):
        PoissonSection(1, (1, 0, 0))
    with pytest.raises(ValueError):
        PoissonSection(1, (0, 0, 0, 0))
    assert PoissonSection(1, ("1", 0, 0, 1)).poly == 1 + Z(3)


def test_bundle_operations():
    e = BundleP1((0, -1))
    assert e.dual().splitting == (0, 1)
    assert e.twist(2).splitting == (2, 1)
    assert e.tensor(e.dual()).splitting == (0, 1, -1, 0)
    assert e.euler_characteristic() == 1


# ================================
# sampling and JSON
# ================================
def test_random_pair_is_seeded():
    a = random_pair(np.random.Generator(np.random.PCG64(3)), (0, 0), 1, 5)
    b = random_pair(np.random.Generator(np.random.PCG64(3)), (0, 0), 1, 5)
    assert a == b


def test_json_round_trip(r2n2):
    pair, sigma = r2n2
    again, sigma_again = pair_from_json(pair_to_json(pair, sigma))
    assert again == pair
    assert sigma_again == sigma


@pytest.mark.parametrize(
    "splitting, n",
    [((0,), 2), ((0, 0), 1), ((0, 1), 2), ((0, 0), 3), ((0, 0, 0), 1), ((0, -1, 1), 2), ((1, 0, 0), 1)],
)
@pytest.mark.parametrize("seed", range(3))
def test_cayley_hamilton_on_random_pairs(splitting, n, seed):
    pair = random_pair(np.random.Generator(np.random.PCG64(seed)), splitting, n, 4)
    assert all(e.is_zero for row in cayley_hamilton_residual(pair) for e in row)


@pytest.mark.parametrize("splitting, n", [((0, 0), 1), ((0, 0), 2), ((0, 1), 1), ((0, 0, 0), 1)])
def test_smooth_spectral_curve_has_scalar_endomorphisms(splitting, n):
    rng = np.random.Generator(np.random.PCG64(41))
    smooth = 0
    for _ in range(6):
        pair = random_pair(rng, splitting, n, 5)
        if smoothness_certificate(spectral_curve(pair)) is SmoothnessCertificate.SMOOTH:
            smooth += 1
            assert endomorphism_check(pair) == 1
    assert smooth > 0
