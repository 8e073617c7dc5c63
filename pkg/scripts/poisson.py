"""
poisson.py
-----------------
The two Poisson maps at a moduli point and the comparison Phi_* B^H = B.

Hitchin side: multiply a cotangent cocycle of [End E (x) N^-1 (x) K -> End E (x) K]
by sigma0 and read the result in the tangent basis of [End E -> End E (x) N].

Sheaf side: multiplication by s = p^* sigma0 is the morphism W = L (x) K_S -> L;
its effect on Ext^1 goes through the phi_W complexes and their functoriality,
then back to the Hitchin bases through the factor-switch identifications.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List

from .defm import (
    ChainMap,
    DualityData,
    NotACocycleError,
    TwoTermComplex,
    canonical_coefficient,
    cotangent_complex,
    duality_data,
    end_complex,
    functoriality_map,
    hyper_h1_basis,
    induced_h1,
    label_identification,
    phi_W,
    scalar_morphism,
    sheaf_coefficient,
    swap_label,
)
from .exact import LaurentPoly, RatMatrix, Vector, inverse, rank, solve_columns
from .hitchin import HitchinPair, PoissonSection, char_poly_derivative, hitchin_coordinate_labels
from .p1sheaf import CHARTS, h0_coordinates

HITCHIN = "Hitchin"
SHEAF = "Sheaf"


# ================================
# MODULI POINT
# ================================
@dataclass(frozen=True, eq=False)
class ModuliPoint:
    """Complexes, bases and pairings attached to one stable pair."""

    pair: HitchinPair
    tangent: TwoTermComplex
    cotangent: TwoTermComplex
    duality: DualityData
    sheaf_tangent: TwoTermComplex
    sheaf_cotangent: TwoTermComplex
    sheaf_duality: DualityData

    @property
    def dim(self) -> int:
        return hyper_h1_basis(self.tangent).dim

    def tangent_identification(self) -> ChainMap:
        """dPhi on tangent spaces: End complex -> phi_W(L), phi_ij -> u_ij."""
        return label_identification(self.tangent, self.sheaf_tangent, swap_label)

    def cotangent_identification(self) -> ChainMap:
        """Hitchin cotangent complex -> phi_W(L (x) K_S)."""
        return label_identification(self.cotangent, self.sheaf_cotangent, swap_label)


@lru_cache(maxsize=64)
def moduli_point(p: HitchinPair) -> ModuliPoint:
    tangent, cotangent = end_complex(p), cotangent_complex(p)
    sheaf_tangent = phi_W(p, sheaf_coefficient(p))
    sheaf_cotangent = phi_W(p, canonical_coefficient(p))
    point = ModuliPoint(
        pair=p,
        tangent=tangent,
        cotangent=cotangent,
        duality=duality_data(tangent, cotangent),
        sheaf_tangent=sheaf_tangent,
        sheaf_cotangent=sheaf_cotangent,
        sheaf_duality=duality_data(sheaf_tangent, sheaf_cotangent),
    )
    logging.debug("Moduli point r=%d n=%d: dim T = %d", p.rank, p.n, point.dim)
    return point


# ================================
# POISSON MATRICES
# ================================
@dataclass(frozen=True, eq=False)
class PoissonMatrix:
    """Matrix from the cotangent basis (columns) to the tangent basis (rows)."""

    matrix: RatMatrix
    pair: HitchinPair
    side: str

    @property
    def rank(self) -> int:
        return rank(self.matrix)


def hitchin_matrix(point: ModuliPoint, section: LaurentPoly) -> RatMatrix:
    """Bracket-complex cochains multiplied termwise by a section of O(n + 2)."""
    if not CHARTS.is_global(section, point.pair.n + 2):
        raise ValueError(f"{section} is not a section of O({point.pair.n + 2})")
    images = [xi.multiply(section) for xi in hyper_h1_basis(point.cotangent).classes]
    return hyper_h1_basis(point.tangent).coordinates_many(images)


def poisson_hitchin(p: HitchinPair, sigma: PoissonSection) -> PoissonMatrix:
    return PoissonMatrix(hitchin_matrix(moduli_point(p), sigma.poly), p, HITCHIN)


@dataclass(frozen=True, eq=False)
class SheafSide:
    raw: RatMatrix
    phi_tangent: RatMatrix
    phi_cotangent: RatMatrix
    matrix: RatMatrix


def sheaf_side(point: ModuliPoint, section: LaurentPoly) -> SheafSide:
    p = point.pair
    morphism = scalar_morphism(canonical_coefficient(p), sheaf_coefficient(p), section)
    raw = functoriality_map(p, morphism)
    phi_t = induced_h1(point.tangent_identification())
    phi_c = induced_h1(point.cotangent_identification())
    return SheafSide(raw=raw, phi_tangent=phi_t, phi_cotangent=phi_c, matrix=inverse(phi_t) @ raw @ phi_c)


def poisson_sheaf(p: HitchinPair, sigma: PoissonSection, inject_sign_fault: bool = False) -> PoissonMatrix:
    """B pulled back to the Hitchin bases; with inject_sign_fault, s = -p^* sigma0."""
    section = -sigma.poly if inject_sign_fault else sigma.poly
    side = sheaf_side(moduli_point(p), section)
    return PoissonMatrix(side.matrix, p, SHEAF)


# ================================
# THEOREM CHECK
# ================================
@dataclass(frozen=True, eq=False)
class TheoremReport:
    pair: HitchinPair
    sigma: PoissonSection
    hitchin: RatMatrix
    sheaf: RatMatrix
    sheaf_raw: RatMatrix
    phi_tangent: RatMatrix
    phi_cotangent: RatMatrix
    difference: RatMatrix
    adjoint_ok: bool
    fault_injected: bool

    @property
    def passed(self) -> bool:
        return self.adjoint_ok and self.difference.is_zero()

    @property
    def detectable(self) -> bool:
        """Whether a sign fault on the sheaf side could change the verdict at this point."""
        return not self.hitchin.is_zero()


def adjoint_check(point: ModuliPoint, phi_t: RatMatrix, phi_c: RatMatrix) -> bool:
    """<phi'(w), phi(v)>_sheaf == <w, v>_Hitchin on all basis vectors."""
    return phi_c.T @ point.sheaf_duality.pairing @ phi_t == point.duality.pairing


def verify_theorem1(p: HitchinPair, sigma: PoissonSection, inject_sign_fault: bool = False) -> TheoremReport:
    point = moduli_point(p)
    hitchin = hitchin_matrix(point, sigma.poly)
    section = -sigma.poly if inject_sign_fault else sigma.poly
    side = sheaf_side(point, section)
    report = TheoremReport(
        pair=p,
        sigma=sigma,
        hitchin=hitchin,
        sheaf=side.matrix,
        sheaf_raw=side.raw,
        phi_tangent=side.phi_tangent,
        phi_cotangent=side.phi_cotangent,
        difference=side.matrix - hitchin,
        adjoint_ok=adjoint_check(point, side.phi_tangent, side.phi_cotangent),
        fault_injected=inject_sign_fault,
    )
    if inject_sign_fault and not report.detectable:
        logging.warning("B^H vanishes at this point (r=%d, n=%d); the injected fault cannot show", p.rank, p.n)
    logging.info("Theorem check r=%d n=%d dim=%d: %s", p.rank, p.n, point.dim, "pass" if report.passed else "FAIL")
    return report


# ================================
# POISSON PROPERTIES
# ================================
def skew_matrix(p: HitchinPair, sigma: PoissonSection) -> RatMatrix:
    """S[i][j] = <xi_i, B^H xi_j> over the cotangent basis."""
    point = moduli_point(p)
    return point.duality.pairing @ hitchin_matrix(point, sigma.poly)


def skew_check(p: HitchinPair, sigma: PoissonSection) -> bool:
    s = skew_matrix(p, sigma)
    b_rank = poisson_hitchin(p, sigma).rank
    return (s + s.T).is_zero() and b_rank % 2 == 0


def linearity_check(p: HitchinPair, first: PoissonSection, second: PoissonSection) -> bool:
    point = moduli_point(p)
    total = first.poly + second.poly
    hitchin_ok = hitchin_matrix(point, total) == hitchin_matrix(point, first.poly) + hitchin_matrix(point, second.poly)
    sheaf_ok = sheaf_side(point, total).matrix == (
        sheaf_side(point, first.poly).matrix + sheaf_side(point, second.poly).matrix
    )
    return hitchin_ok and sheaf_ok


def hitchin_differential(point: ModuliPoint) -> RatMatrix:
    """G[l][j] = l(dHitchin(v_j)) for the coefficient functionals l of the Hitchin base."""
    p = point.pair
    r, n = p.rank, p.n
    theta = p.theta.entries
    index = {lab: i for i, lab in enumerate(point.tangent.target_labels)}
    columns: List[Vector] = []
    for v in hyper_h1_basis(point.tangent).classes:
        b0 = [[v.b0[index[(i, j)]] for j in range(r)] for i in range(r)]
        b1 = [[v.b1[index[(i, j)]] for j in range(r)] for i in range(r)]
        d0, d1 = char_poly_derivative(theta, b0), char_poly_derivative(theta, b1)
        if d0 != d1:
            raise NotACocycleError("dHitchin differs on the two charts")
        col: Vector = []
        for i, dc in enumerate(d0, start=1):
            col.extend(h0_coordinates(dc, i * n))
        columns.append(col)
    return RatMatrix.from_columns(columns, len(hitchin_coordinate_labels(r, n)))


@dataclass(frozen=True, eq=False)
class CommutationReport:
    brackets: RatMatrix
    max_abs: Fraction
    poisson_rank: int
    casimir_count: int


def commutation_data(p: HitchinPair, sigma: PoissonSection) -> CommutationReport:
    point = moduli_point(p)
    b = hitchin_matrix(point, sigma.poly)
    g = hitchin_differential(point)
    # covectors dH_l: <dH_l, v> = l(dHitchin(v))
    x = solve_columns(point.duality.pairing.T, g.T)
    flows = b @ x
    brackets = g @ flows
    return CommutationReport(
        brackets=brackets,
        max_abs=brackets.max_abs(),
        poisson_rank=rank(b),
        casimir_count=rank(x) - rank(flows),
    )


def hamiltonian_commutation(p: HitchinPair, sigma: PoissonSection) -> Fraction:
    """max |{H_l, H_l'}| over the coefficient functionals; exactly 0 when they commute."""
    return commutation_data(p, sigma).max_abs
