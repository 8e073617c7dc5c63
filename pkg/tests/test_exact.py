from fractions import Fraction

import numpy as np
import pytest
import sympy

from scripts.exact import (
    LaurentPoly,
    NoSolution,
    RatMatrix,
    SparseEchelon,
    determinant,
    inverse,
    kernel_basis,
    quotient_basis,
    rank,
    rank_of_rows,
    rational_str,
    solve,
    solve_columns,
    to_rational,
)


# ================================
# kernel_basis
# ================================
def test_kernel_of_identity_is_empty():
    assert kernel_basis(RatMatrix.identity(2)) == []


def test_kernel_of_zero_row():
    basis = kernel_basis(RatMatrix([[0, 0]]))
    assert len(basis) == 2


def test_kernel_of_rank_one_matrix():
    m = RatMatrix([[1, 2], [2, 4]])
    (v,) = kernel_basis(m)
    assert v[0] == -2 * v[1]
    assert m @ v == [0, 0]


# ================================
# solve
# ================================
def test_solve_identity():
    assert solve(RatMatrix.identity(3), [1, "1/2", -4]) == [1, Fraction(1, 2), -4]


def test_solve_zero_matrix_raises():
    with pytest.raises(NoSolution):
        solve(RatMatrix.zeros(2, 2), [1, 0])


def test_solve_scalar():
    assert solve(RatMatrix([[2]]), [3]) == [Fraction(3, 2)]


def test_solve_columns_many_rhs():
    m = RatMatrix([[1, 1], [0, 1]])
    rhs = RatMatrix([[1, 0], [2, 1]])
    x = solve_columns(m, rhs)
    assert m @ x == rhs


# ================================
# quotient_basis
# ================================
def test_quotient_of_line_in_three_space():
    assert len(quotient_basis(3, [[1, 0, 0]])) == 2


def test_quotient_by_whole_space_is_empty():
    assert quotient_basis(2, [[1, 0], [0, 1]]) == []


def test_quotient_representatives_complete_the_span():
    reps = quotient_basis(4, [[1, 1, 1, 1]])
    assert len(reps) == 3
    assert rank(RatMatrix([[1, 1, 1, 1]] + reps)) == 4


# ================================
# determinant / inverse / rank
# ================================
def test_determinant_and_inverse():
    m = RatMatrix([[1, 2], [3, 4]])
    assert determinant(m) == -2
    assert m @ inverse(m) == RatMatrix.identity(2)


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(ValueError):
        inverse(RatMatrix([[1, 2], [2, 4]]))


def test_rank_of_empty_matrix():
    assert rank(RatMatrix.zeros(0, 3)) == 0


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        RatMatrix([[1, 2], [3]])


def test_sparse_echelon_detects_dependence():
    echelon = SparseEchelon()
    assert echelon.add({0: 1, 3: 2})
    assert echelon.add({3: 1})
    assert not echelon.add({0: 2})
    assert echelon.contains({0: 5, 3: 7})
    assert rank_of_rows([{1: 1}, {1: 2}, {2: 1}]) == 2


# ================================
# LaurentPoly
# ================================
def test_laurent_arithmetic():
    z = LaurentPoly.monomial(1)
    assert (1 + z) * (1 - z) == 1 - z * z
    assert (z ** 3).shift(-5) == LaurentPoly.monomial(-2)
    assert (3 * z - 3 * z).is_zero


def test_reflect_is_the_chart_change():
    f = LaurentPoly.from_list([1, 2, 3])  # 1 + 2z + 3z^2
    assert f.reflect(2) == LaurentPoly.from_list([3, 2, 1])
    assert f.reflect(2).reflect(2) == f


def test_restrict_and_derivative():
    f = LaurentPoly({-2: 1, 0: 5, 3: 2})
    assert f.restrict(0, None) == LaurentPoly({0: 5, 3: 2})
    assert f.restrict(None, -1) == LaurentPoly({-2: 1})
    assert f.derivative() == LaurentPoly({-3: -2, 2: 6})


def test_sympy_bridge():
    z = sympy.Symbol("z")
    f = LaurentPoly({-1: Fraction(1, 2), 2: -3})
    assert LaurentPoly.from_sympy(f.to_sympy(z), z) == f


def test_rational_strings():
    assert rational_str(Fraction(-7, 3)) == "-7/3"
    assert rational_str(Fraction(4, 2)) == "2"
    assert to_rational("−3/2") == Fraction(-3, 2)
    with pytest.raises(TypeError):
        to_rational(0.5)


# ================================
# seeded properties
# ================================
def random_matrix(seed, rows, cols, inner):
    """rows x cols integer matrix of rank <= inner."""
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.integers(-3, 3, size=(rows, inner), endpoint=True)
    b = rng.integers(-3, 3, size=(inner, cols), endpoint=True)
    return RatMatrix(a @ b)


def random_laurent(rng, lo=-4, hi=4, terms=4):
    exps = rng.integers(lo, hi, size=terms, endpoint=True)
    coeffs = rng.integers(-5, 5, size=terms, endpoint=True)
    return LaurentPoly({int(e): Fraction(int(c), int(rng.integers(1, 4))) for e, c in zip(exps, coeffs)})


@pytest.mark.parametrize(
    "seed, rows, cols, inner",
    [(0, 3, 5, 2), (1, 8, 8, 8), (2, 12, 7, 4), (3, 20, 25, 11), (4, 40, 40, 23), (5, 40, 31, 40)],
)
def test_rank_nullity(seed, rows, cols, inner):
    m = random_matrix(seed, rows, cols, inner)
    kernel = kernel_basis(m)
    assert rank(m) + len(kernel) == cols
    assert rank(m) <= min(inner, rows, cols)
    for v in kernel:
        assert m @ v == [0] * rows


@pytest.mark.parametrize("seed, rows, cols, inner", [(10, 4, 4, 4), (11, 9, 6, 3), (12, 15, 20, 15), (13, 30, 30, 17)])
def test_solve_recovers_consistent_systems(seed, rows, cols, inner):
    m = random_matrix(seed, rows, cols, inner)
    rng = np.random.Generator(np.random.PCG64(seed + 100))
    x = [Fraction(int(v), int(d)) for v, d in zip(rng.integers(-9, 9, size=cols), rng.integers(1, 5, size=cols))]
    b = m @ x
    y = solve(m, b)
    assert m @ y == b


@pytest.mark.parametrize("seed", range(8))
def test_laurent_ring_axioms(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    f, g, h = (random_laurent(rng) for _ in range(3))
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == LaurentPoly.zero()
