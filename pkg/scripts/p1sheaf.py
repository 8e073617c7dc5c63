"""
p1sheaf.py
-----------------
Line bundles O(d) on the projective line in the two-chart model.

Chart U0 has coordinate z, chart U1 has w = 1/z. Every section is stored in
its "z-form" (the chart-0 trivialisation written as a Laurent polynomial in
z); a chart-1 section g(w) of O(d) has z-form z**d * g(1/z). With this
convention:

  * chart-0 regular  <=> all exponents >= 0
  * chart-1 regular  <=> all exponents <= d
  * global section   <=> polynomial in z of degree <= d

H^1(O(d)) is the overlap space modulo those two, with monomial basis
z**k, d+1 <= k <= -1, and Serre duality is the residue (coefficient of
z**-1) of a product of twists d and -2-d.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from .exact import LaurentPoly, RatMatrix, Vector


class TwistMismatchError(ValueError):
    """Raised when a residue pairing is asked for twists that do not sum to -2."""


# ================================
# CHARTS
# ================================
@dataclass(frozen=True)
class ChartConvention:
    """z on U0, w = 1/z on U1; a section f(z) of O(d) reads w**d * f(1/w) on U1."""

    z: str = "z"
    w: str = "w"

    @staticmethod
    def to_chart1(f: LaurentPoly, d: int) -> LaurentPoly:
        """z-form -> Laurent polynomial in w (same dict keys read as w-exponents)."""
        return f.reflect(d)

    @staticmethod
    def from_chart1(g: LaurentPoly, d: int) -> LaurentPoly:
        """Chart-1 section g(w) of O(d) -> its z-form."""
        return g.reflect(d)

    @staticmethod
    def is_chart0_regular(f: LaurentPoly) -> bool:
        return f.exponents_within(0, None)

    @staticmethod
    def is_chart1_regular(f: LaurentPoly, d: int) -> bool:
        return f.exponents_within(None, d)

    @staticmethod
    def is_global(f: LaurentPoly, d: int) -> bool:
        return f.exponents_within(0, d)


CHARTS = ChartConvention()


# ================================
# COCHAINS
# ================================
@dataclass(frozen=True)
class CechCochain:
    """A Cech cochain of O(d): degree 0 holds (c0, c1), degree 1 holds (overlap,)."""

    degree: int
    twist: int
    parts: Tuple[LaurentPoly, ...]

    def __post_init__(self):
        if self.degree == 0:
            if len(self.parts) != 2:
                raise ValueError("a degree-0 cochain has one component per chart")
            c0, c1 = self.parts
            if not CHARTS.is_chart0_regular(c0):
                raise ValueError(f"chart-0 component {c0} has negative exponents")
            if not CHARTS.is_chart1_regular(c1, self.twist):
                raise ValueError(f"chart-1 component {c1} has exponents above {self.twist}")
        elif self.degree == 1:
            if len(self.parts) != 1:
                raise ValueError("a degree-1 cochain has a single overlap component")
        else:
            raise ValueError(f"no degree-{self.degree} Cech cochains on two charts")

    @classmethod
    def zero_cochain(cls, c0: LaurentPoly, c1: LaurentPoly, d: int) -> "CechCochain":
        """(c0, c1) both given in z-form."""
        return cls(0, d, (c0, c1))

    @classmethod
    def from_charts(cls, c0: LaurentPoly, g1: LaurentPoly, d: int) -> "CechCochain":
        """c0 a polynomial in z, g1 a polynomial in w."""
        return cls(0, d, (c0, CHARTS.from_chart1(g1, d)))

    @classmethod
    def one_cochain(cls, f: LaurentPoly, d: int) -> "CechCochain":
        return cls(1, d, (f,))

    @property
    def overlap(self) -> LaurentPoly:
        if self.degree != 1:
            raise ValueError("only degree-1 cochains live on the overlap")
        return self.parts[0]


def cech_delta(c: CechCochain) -> CechCochain:
    """delta(c0, c1) = c1 - c0 on the overlap."""
    if c.degree != 0:
        raise ValueError("cech_delta takes a degree-0 cochain")
    c0, c1 = c.parts
    return CechCochain.one_cochain(c1 - c0, c.twist)


def split_coboundary(f: LaurentPoly, d: int) -> CechCochain:
    """A degree-0 cochain c with delta(c) = f; f must have zero H^1 class."""
    if any(h1_coordinates(f, d)):
        raise ValueError(f"{f} is not a coboundary in O({d})")
    return CechCochain.zero_cochain(-f.restrict(0, None), f.restrict(None, -1), d)


# ================================
# COHOMOLOGY
# ================================
def h0_dim(d: int) -> int:
    return max(d + 1, 0)


def h1_dim(d: int) -> int:
    return max(-d - 1, 0)


def euler_characteristic(d: int) -> int:
    return d + 1


def h0_exponents(d: int) -> range:
    return range(0, d + 1)


def h1_exponents(d: int) -> range:
    return range(d + 1, 0)


def h0_basis(d: int) -> List[LaurentPoly]:
    return [LaurentPoly.monomial(k) for k in h0_exponents(d)]


def h1_basis(d: int) -> List[LaurentPoly]:
    return [LaurentPoly.monomial(k) for k in h1_exponents(d)]


def h0_coordinates(f: LaurentPoly, d: int) -> Vector:
    if not CHARTS.is_global(f, d):
        raise ValueError(f"{f} is not a global section of O({d})")
    return [f.coefficient(k) for k in h0_exponents(d)]


def h1_coordinates(f: LaurentPoly, d: int) -> Vector:
    """Class of an overlap section in the basis h1_basis(d)."""
    return [f.coefficient(k) for k in h1_exponents(d)]


def residue(f: LaurentPoly) -> Fraction:
    return f.coefficient(-1)


def residue_pair(a: LaurentPoly, d_a: int, b: LaurentPoly, d_b: int) -> Fraction:
    """<a, b> = Res(a*b) for a in H^0(O(d_a)), b an overlap representative in H^1(O(d_b))."""
    if d_a + d_b != -2:
        raise TwistMismatchError(f"twists {d_a} and {d_b} do not pair into O(-2)")
    if not CHARTS.is_global(a, d_a):
        raise ValueError(f"{a} is not a global section of O({d_a})")
    return residue(a * b)


def pairing_matrix(d: int) -> RatMatrix:
    """Residue pairing of h0_basis(d) (rows) against h1_basis(-2-d) (columns)."""
    left, right = h0_basis(d), h1_basis(-2 - d)
    return RatMatrix(
        [[residue_pair(a, d, b, -2 - d) for b in right] for a in left],
        rows=len(left),
        cols=len(right),
    )
