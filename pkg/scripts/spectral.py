"""
spectral.py
-----------------
Spectral curves Y in S = Tot(O(n)) and spectral sheaves, the latter held as
their push-forward pair (P, psi) to P^1. p is affine, so p_* loses nothing
and every Ext group below is computed on P^1.

Smoothness is certified on both surface charts with the Fitting ideal of
Q[u, y]/(F, F_y, F_u) presented over Q[u].
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Tuple

import sympy

from .exact import LaurentPoly, rational_str, to_rational
from .hitchin import (
    BundleP1,
    HitchinPair,
    TwistedEndo,
    UnstablePairError,
    Z,
    char_poly,
    is_stable,
    to_sympy_matrix,
)
from .p1sheaf import CHARTS, euler_characteristic, h0_dim

Y = sympy.Symbol("y")
W = sympy.Symbol("w")


class SmoothnessCertificate(str, Enum):
    SMOOTH = "Smooth"
    SINGULAR_OR_UNDETERMINED = "SingularOrUndetermined"


# ================================
# SURFACE AND CURVES
# ================================
@dataclass(frozen=True)
class SurfaceChart:
    """Chart of S: (z, y0) over U0 or (w, y1) over U1, with w = 1/z and y1 = w^n y0."""

    index: int

    @property
    def base(self) -> sympy.Symbol:
        return Z if self.index == 0 else W

    @property
    def fibre(self) -> sympy.Symbol:
        return Y


SURFACE_CHARTS = (SurfaceChart(0), SurfaceChart(1))


@dataclass(frozen=True)
class SpectralCurve:
    """F = y^r + c_1 y^(r-1) + ... + c_r with c_i in H^0(O(i n))."""

    n: int
    r: int
    coefficients: Tuple[LaurentPoly, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.r:
            raise ValueError(f"{len(self.coefficients)} coefficients for a degree-{self.r} curve")
        for i, c in enumerate(self.coefficients, start=1):
            if not CHARTS.is_global(c, i * self.n):
                raise ValueError(f"c_{i} = {c} is not a section of O({i * self.n})")

    def chart_coefficients(self, chart: int) -> List[LaurentPoly]:
        if chart == 0:
            return list(self.coefficients)
        return [CHARTS.to_chart1(c, i * self.n) for i, c in enumerate(self.coefficients, start=1)]

    def polynomial(self, chart: int = 0) -> sympy.Expr:
        """F0(z, y) on chart 0, F1(w, y) = w^(rn) F0(1/w, y/w^n) on chart 1."""
        u = SURFACE_CHARTS[chart].base
        coeffs = self.chart_coefficients(chart)
        return sympy.expand(Y ** self.r + sum(c.to_sympy(u) * Y ** (self.r - i) for i, c in enumerate(coeffs, start=1)))

    def to_json(self) -> dict:
        poly = sympy.Poly(self.polynomial(0), Z, Y)
        terms = sorted(((int(i), int(j), rational_str(to_rational(c))) for (i, j), c in poly.terms()))
        return {"n": self.n, "r": self.r, "F0": [list(t) for t in terms]}

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralCurve":
        n, r = int(obj["n"]), int(obj["r"])
        by_power: Dict[int, Dict[int, object]] = {}
        for i, j, c in obj["F0"]:
            by_power.setdefault(int(j), {})[int(i)] = c
        lead = by_power.pop(r, {})
        if {k: to_rational(v) for k, v in lead.items()} != {0: 1}:
            raise ValueError("F0 must be monic in y")
        if any(j > r or j < 0 for j in by_power):
            raise ValueError(f"F0 has y-degree above {r}")
        coeffs = tuple(LaurentPoly(by_power.get(r - i, {})) for i in range(1, r + 1))
        return cls(n, r, coeffs)


def spectral_curve(p: HitchinPair) -> SpectralCurve:
    return SpectralCurve(p.n, p.rank, tuple(char_poly(p)))


@dataclass(frozen=True)
class SpectralSheafRep:
    """A spectral sheaf L held as (P, psi) = (p_* L, p_* x)."""

    pair: HitchinPair

    @property
    def bundle(self) -> BundleP1:
        return self.pair.bundle

    @property
    def psi(self) -> TwistedEndo:
        return self.pair.theta

    @property
    def rank(self) -> int:
        return self.pair.rank

    @property
    def degree(self) -> int:
        return self.pair.degree

    def euler_characteristic(self) -> int:
        """chi(L) = chi(p_* L) = sum chi(O(a_i)); equals degree + rank."""
        return sum(euler_characteristic(a) for a in self.bundle.splitting)

    def support(self) -> SpectralCurve:
        return spectral_curve(self.pair)


# ================================
# CORRESPONDENCE
# ================================
def phi(p: HitchinPair, check_stable: bool = True) -> SpectralSheafRep:
    if check_stable and not is_stable(p).is_stable:
        raise UnstablePairError("phi is only defined on certified stable pairs")
    return SpectralSheafRep(p)


def phi_inverse(s: SpectralSheafRep) -> HitchinPair:
    return s.pair


def structure_sheaf_rep(curve: SpectralCurve) -> SpectralSheafRep:
    """p_* O_Y = O + O(-n) + ... + O(-(r-1)n) in the basis 1, y, ..., y^(r-1); psi = companion of F."""
    r, n = curve.r, curve.n
    bundle = BundleP1(tuple(-i * n for i in range(r)))
    psi = [[LaurentPoly.zero() for _ in range(r)] for _ in range(r)]
    for j in range(r - 1):
        psi[j + 1][j] = LaurentPoly.constant(1)
    for k in range(r):
        psi[k][r - 1] = -curve.coefficients[r - k - 1]
    return SpectralSheafRep(HitchinPair(bundle, TwistedEndo(bundle, n, psi)))


# ================================
# SMOOTHNESS
# ================================
def _presentation(f: sympy.Expr, u: sympy.Symbol, r: int) -> sympy.Matrix:
    """r x 2r matrix over Q[u] whose cokernel is Q[u, y]/(F, F_y, F_u)."""
    fy, fu = sympy.diff(f, Y), sympy.diff(f, u)
    mod = sympy.Poly(f, Y)
    columns = []
    for g in (fy, fu):
        for j in range(r):
            rem = sympy.Poly(sympy.expand(Y ** j * g), Y).rem(mod)
            coeffs = dict((k[0], c) for k, c in rem.terms())
            columns.append([sympy.expand(coeffs.get(i, 0)) for i in range(r)])
    return sympy.Matrix(r, 2 * r, lambda i, j: columns[j][i])


def chart_fitting_gcd(curve: SpectralCurve, chart: int) -> sympy.Expr:
    """gcd of the maximal minors of the presentation on one chart."""
    u = SURFACE_CHARTS[chart].base
    m = _presentation(curve.polynomial(chart), u, curve.r)
    g = sympy.Integer(0)
    for cols in itertools.combinations(range(2 * curve.r), curve.r):
        minor = sympy.expand(m.extract(list(range(curve.r)), list(cols)).det(method="berkowitz"))
        if minor == 0:
            continue
        g = sympy.gcd(g, minor) if g != 0 else minor
        if g.is_number:
            break
    return g


def smoothness_certificate(c: SpectralCurve) -> SmoothnessCertificate:
    for chart in (0, 1):
        g = chart_fitting_gcd(c, chart)
        if g == 0 or not g.is_number:
            logging.debug("Chart %d Fitting gcd = %s: not certified smooth", chart, g)
            return SmoothnessCertificate.SINGULAR_OR_UNDETERMINED
    return SmoothnessCertificate.SMOOTH


@dataclass(frozen=True)
class ResultantCheck:
    discriminants_nonzero: bool
    no_common_root: bool


def resultant_certificate(c: SpectralCurve) -> ResultantCheck:
    """Res_y(F, F_y) and Res_y(F, F_u) on both charts.

    no_common_root implies smoothness; smoothness implies discriminants_nonzero.
    """
    disc_ok, coprime = True, True
    for chart in (0, 1):
        u = SURFACE_CHARTS[chart].base
        f = c.polynomial(chart)
        disc = sympy.expand(sympy.resultant(f, sympy.diff(f, Y), Y))
        other = sympy.expand(sympy.resultant(f, sympy.diff(f, u), Y))
        if disc == 0:
            disc_ok = False
        g = sympy.gcd(disc, other)
        if disc == 0 or g == 0 or not g.is_number:
            coprime = False
    return ResultantCheck(discriminants_nonzero=disc_ok, no_common_root=coprime)


# ================================
# FITTING IDEAL AND INVARIANTS
# ================================
def fitting_generator(p: HitchinPair) -> sympy.Expr:
    """det(p^* theta - y), the single maximal minor of the resolution matrix h."""
    h = to_sympy_matrix(p.theta.entries) - Y * sympy.eye(p.rank)
    return sympy.expand(h.det(method="bareiss"))


def fitting_agreement(p: HitchinPair) -> bool:
    """det(theta - y) == (-1)^r F0."""
    return sympy.expand(fitting_generator(p) - (-1) ** p.rank * spectral_curve(p).polynomial(0)) == 0


def genus(c: SpectralCurve) -> int:
    """Arithmetic genus 1 - chi(p_* O_Y)."""
    return 1 - sum(euler_characteristic(-i * c.n) for i in range(c.r))


def genus_closed_form(r: int, n: int) -> int:
    return 1 - r + n * r * (r - 1) // 2


def normal_sections_dimension(c: SpectralCurve) -> int:
    """h^0(Y, p^* N^r |_Y) = sum_i h^0(O((r - i) n))."""
    return sum(h0_dim((c.r - i) * c.n) for i in range(c.r))


def moduli_dimension(r: int, n: int) -> int:
    return r * r * n + 1
