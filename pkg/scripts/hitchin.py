"""
hitchin.py
-----------------
Hitchin pairs (E, theta) on P^1 with twist N = O(n).

E is split, E = O(a_1) + ... + O(a_r), and theta is a matrix of sections:
entry (i, j) is the component O(a_j) -> O(a_i) (x) O(n), a polynomial in z
of degree <= a_i + n - a_j. All sections are kept in z-form (see p1sheaf).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .exact import LaurentPoly, RatMatrix, Vector, rank, rational_str, to_rational
from .p1sheaf import CHARTS, h0_coordinates, h0_dim, h0_exponents

Z = sympy.Symbol("z")
X = sympy.Symbol("x")

PolyMatrix = List[List[LaurentPoly]]


class UnstablePairError(ValueError):
    """Raised when an operation needs a certified stable pair and did not get one."""


class StabilityCertificate(str, Enum):
    SMOOTH_SPECTRAL_CURVE = "SmoothSpectralCurve"
    INTEGRAL_SPECTRAL_CURVE = "IntegralSpectralCurve"
    UNKNOWN = "Unknown"

    @property
    def is_stable(self) -> bool:
        return self is not StabilityCertificate.UNKNOWN


# ================================
# BUNDLES AND MAPS
# ================================
@dataclass(frozen=True)
class BundleP1:
    """Split bundle O(a_1) + ... + O(a_r)."""

    splitting: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "splitting", tuple(int(a) for a in self.splitting))
        if not self.splitting:
            raise ValueError("a bundle needs rank >= 1")

    @property
    def rank(self) -> int:
        return len(self.splitting)

    @property
    def degree(self) -> int:
        return sum(self.splitting)

    def dual(self) -> "BundleP1":
        return BundleP1(tuple(-a for a in self.splitting))

    def twist(self, t: int) -> "BundleP1":
        return BundleP1(tuple(a + t for a in self.splitting))

    def tensor(self, other: "BundleP1") -> "BundleP1":
        """Summands ordered (i, j) row-major."""
        return BundleP1(tuple(a + b for a in self.splitting for b in other.splitting))

    def euler_characteristic(self) -> int:
        return sum(a + 1 for a in self.splitting)

    def h0_dim(self) -> int:
        return sum(h0_dim(a) for a in self.splitting)


def _freeze(entries: Sequence[Sequence[object]]) -> Tuple[Tuple[LaurentPoly, ...], ...]:
    return tuple(
        tuple(e if isinstance(e, LaurentPoly) else LaurentPoly.from_list(e) for e in row)
        for row in entries
    )


@dataclass(frozen=True)
class BundleMap:
    """Map between split bundles; entries[i][j] is a section of O(target_i - source_j)."""

    source: BundleP1
    target: BundleP1
    entries: Tuple[Tuple[LaurentPoly, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _freeze(self.entries))
        if len(self.entries) != self.target.rank or any(len(row) != self.source.rank for row in self.entries):
            raise ValueError(f"entries must be {self.target.rank}x{self.source.rank}")
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                d = self.degree(i, j)
                if not CHARTS.is_global(e, d):
                    raise ValueError(f"entry ({i},{j}) = {e} is not a section of O({d})")

    def degree(self, i: int, j: int) -> int:
        return self.target.splitting[i] - self.source.splitting[j]

    def apply(self, vec: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        return [
            sum((e * v for e, v in zip(row, vec) if e and v), LaurentPoly.zero())
            for row in self.entries
        ]

    def compose(self, inner: "BundleMap") -> "BundleMap":
        """self o inner."""
        if inner.target != self.source:
            raise ValueError("bundle maps do not compose")
        return BundleMap(inner.source, self.target, poly_matmul(self.entries, inner.entries))

    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    @classmethod
    def identity(cls, bundle: BundleP1) -> "BundleMap":
        r = bundle.rank
        return cls(bundle, bundle, tuple(
            tuple(LaurentPoly.constant(1) if i == j else LaurentPoly.zero() for j in range(r))
            for i in range(r)
        ))

    @classmethod
    def zero(cls, source: BundleP1, target: BundleP1) -> "BundleMap":
        return cls(source, target, tuple(
            tuple(LaurentPoly.zero() for _ in range(source.rank)) for _ in range(target.rank)
        ))


@dataclass(frozen=True)
class TwistedEndo:
    """theta : E -> E (x) O(n)."""

    bundle: BundleP1
    n: int
    entries: Tuple[Tuple[LaurentPoly, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _freeze(self.entries))
        self.as_map()

    def entry_degree(self, i: int, j: int) -> int:
        a = self.bundle.splitting
        return a[i] + self.n - a[j]

    def as_map(self) -> BundleMap:
        return BundleMap(self.bundle, self.bundle.twist(self.n), self.entries)

    def trace(self) -> LaurentPoly:
        return sum((self.entries[i][i] for i in range(self.bundle.rank)), LaurentPoly.zero())


@dataclass(frozen=True)
class HitchinPair:
    bundle: BundleP1
    theta: TwistedEndo

    def __post_init__(self):
        if self.theta.bundle != self.bundle:
            raise ValueError("theta is not an endomorphism of the given bundle")
        if self.theta.n < 1:
            raise ValueError(f"twist n = {self.theta.n}; need n >= 1 so that deg(N (x) K^-1) >= 3")

    @property
    def n(self) -> int:
        return self.theta.n

    @property
    def rank(self) -> int:
        return self.bundle.rank

    @property
    def degree(self) -> int:
        return self.bundle.degree

    @classmethod
    def build(cls, splitting: Sequence[int], n: int, theta: Sequence[Sequence[object]]) -> "HitchinPair":
        """theta entries may be LaurentPoly or dense coefficient lists starting at z^0."""
        bundle = BundleP1(tuple(splitting))
        return cls(bundle, TwistedEndo(bundle, n, theta))


@dataclass(frozen=True)
class PoissonSection:
    """sigma_0 in H^0(O(n + 2)), coefficients of 1, z, ..., z^(n+2)."""

    n: int
    coefficients: Tuple[Fraction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        coeffs = tuple(to_rational(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) != self.n + 3:
            raise ValueError(f"sigma0 needs {self.n + 3} coefficients, got {len(coeffs)}")
        if not any(coeffs):
            raise ValueError("sigma0 must be nonzero")

    @property
    def poly(self) -> LaurentPoly:
        return LaurentPoly.from_list(self.coefficients)

    @classmethod
    def from_poly(cls, n: int, f: LaurentPoly) -> "PoissonSection":
        return cls(n, tuple(h0_coordinates(f, n + 2)))

    def scaled(self, c) -> "PoissonSection":
        return PoissonSection(self.n, tuple(to_rational(c) * v for v in self.coefficients))


# ================================
# POLYNOMIAL MATRIX HELPERS
# ================================
def poly_matmul(a: Sequence[Sequence[LaurentPoly]], b: Sequence[Sequence[LaurentPoly]]) -> PolyMatrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [
        [sum((row[k] * b[k][j] for k in range(inner) if row[k] and b[k][j]), LaurentPoly.zero())
         for j in range(cols)]
        for row in a
    ]


def poly_trace(a: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    return sum((a[i][i] for i in range(len(a))), LaurentPoly.zero())


def poly_identity(r: int) -> PolyMatrix:
    return [[LaurentPoly.constant(int(i == j)) for j in range(r)] for i in range(r)]


def to_sympy_matrix(entries: Sequence[Sequence[LaurentPoly]]) -> sympy.Matrix:
    return sympy.Matrix([[e.to_sympy(Z) for e in row] for row in entries])


# ================================
# CHARACTERISTIC POLYNOMIAL
# ================================
def char_poly(p: HitchinPair) -> List[LaurentPoly]:
    """[c_1, ..., c_r] with x^r + c_1 x^(r-1) + ... + c_r = det(x - theta)."""
    poly = to_sympy_matrix(p.theta.entries).charpoly(X)
    coeffs = poly.all_coeffs()[1:]
    out = [LaurentPoly.from_sympy(c, Z) for c in coeffs]
    for i, c in enumerate(out, start=1):
        if not CHARTS.is_global(c, i * p.n):
            raise ArithmeticError(f"c_{i} = {c} is not a section of O({i * p.n})")
    return out


def hitchin_map(p: HitchinPair) -> Vector:
    """Concatenated monomial coordinates of c_1, ..., c_r."""
    out: Vector = []
    for i, c in enumerate(char_poly(p), start=1):
        out.extend(h0_coordinates(c, i * p.n))
    return out


def hitchin_base_dim(r: int, n: int) -> int:
    return sum(h0_dim(i * n) for i in range(1, r + 1))


def hitchin_coordinate_labels(r: int, n: int) -> List[Tuple[int, int]]:
    """(i, k): coefficient of z^k in c_i, in hitchin_map order."""
    return [(i, k) for i in range(1, r + 1) for k in h0_exponents(i * n)]


def cayley_hamilton_residual(p: HitchinPair) -> PolyMatrix:
    """theta^r + c_1 theta^(r-1) + ... + c_r; identically zero."""
    r = p.rank
    theta = [list(row) for row in p.theta.entries]
    coeffs = [LaurentPoly.constant(1)] + char_poly(p)
    acc = [[coeffs[0] * e for e in row] for row in poly_identity(r)]
    for c in coeffs[1:]:
        acc = poly_matmul(acc, theta)
        for i in range(r):
            acc[i][i] = acc[i][i] + c
    return acc


def char_poly_derivative(theta: Sequence[Sequence[LaurentPoly]], direction: Sequence[Sequence[LaurentPoly]]) -> List[LaurentPoly]:
    """Derivative of (c_1, ..., c_r) at theta along direction, via Newton's identities."""
    r = len(theta)
    powers = [poly_identity(r)]
    for _ in range(r):
        powers.append(poly_matmul(powers[-1], theta))
    p_k = [LaurentPoly.zero()] + [poly_trace(powers[k]) for k in range(1, r + 1)]
    dp_k = [LaurentPoly.zero()] + [
        k * poly_trace(poly_matmul(powers[k - 1], direction)) for k in range(1, r + 1)
    ]
    e = [LaurentPoly.constant(1)]
    de = [LaurentPoly.zero()]
    for i in range(1, r + 1):
        acc, dacc = LaurentPoly.zero(), LaurentPoly.zero()
        for k in range(1, i + 1):
            sign = 1 if k % 2 == 1 else -1
            acc = acc + sign * (e[i - k] * p_k[k])
            dacc = dacc + sign * (de[i - k] * p_k[k] + e[i - k] * dp_k[k])
        e.append(Fraction(1, i) * acc)
        de.append(Fraction(1, i) * dacc)
    return [(-1) ** i * de[i] for i in range(1, r + 1)]


# ================================
# STABILITY AND ENDOMORPHISMS
# ================================
def is_stable(p: HitchinPair) -> StabilityCertificate:
    """Sufficient certificate: integral (in particular smooth) spectral curve."""
    if p.rank == 1:
        return StabilityCertificate.INTEGRAL_SPECTRAL_CURVE
    from .spectral import SmoothnessCertificate, smoothness_certificate, spectral_curve

    if smoothness_certificate(spectral_curve(p)) is SmoothnessCertificate.SMOOTH:
        return StabilityCertificate.SMOOTH_SPECTRAL_CURVE
    return StabilityCertificate.UNKNOWN


def require_stable(p: HitchinPair) -> StabilityCertificate:
    cert = is_stable(p)
    if not cert.is_stable:
        raise UnstablePairError(
            "no stability certificate: the spectral curve is not certified smooth "
            "(reducible, non-reduced or singular curves are out of scope)"
        )
    return cert


def commutator_matrix(p: HitchinPair) -> RatMatrix:
    """phi -> phi theta - theta phi from H^0(End E) to H^0(End E (x) N) in monomial coordinates."""
    a, n, r = p.bundle.splitting, p.n, p.rank
    theta = p.theta.entries
    target_index: Dict[Tuple[int, int, int], int] = {}
    for i in range(r):
        for m in range(r):
            for k in h0_exponents(a[i] + n - a[m]):
                target_index[(i, m, k)] = len(target_index)
    columns: List[Vector] = []
    for i in range(r):
        for j in range(r):
            for k in h0_exponents(a[i] - a[j]):
                col = [Fraction(0)] * len(target_index)
                phi = LaurentPoly.monomial(k)
                for m in range(r):
                    for e, c in (phi * theta[j][m]).terms():
                        col[target_index[(i, m, e)]] += c
                for l in range(r):
                    for e, c in (theta[l][i] * phi).terms():
                        col[target_index[(l, j, e)]] -= c
                columns.append(col)
    return RatMatrix.from_columns(columns, len(target_index))


def endomorphism_check(p: HitchinPair) -> int:
    """dim {phi in H^0(End E) : phi theta = theta phi}."""
    m = commutator_matrix(p)
    return m.cols - rank(m)


def conjugate(p: HitchinPair, g: BundleMap, g_inv: BundleMap) -> HitchinPair:
    """(E, g theta g^-1) for an automorphism g of E."""
    ident = BundleMap.identity(p.bundle)
    if g.source != p.bundle or g.target != p.bundle or g.compose(g_inv) != ident:
        raise ValueError("g is not an automorphism of E with inverse g_inv")
    theta = poly_matmul(poly_matmul(g.entries, p.theta.entries), g_inv.entries)
    return HitchinPair(p.bundle, TwistedEndo(p.bundle, p.n, theta))


# ================================
# SAMPLING
# ================================
def random_section(rng: np.random.Generator, d: int, bound: int) -> LaurentPoly:
    if d < 0:
        return LaurentPoly.zero()
    coeffs = rng.integers(-bound, bound, size=d + 1, endpoint=True)
    return LaurentPoly.from_list([int(c) for c in coeffs])


def random_pair(rng: np.random.Generator, splitting: Sequence[int], n: int, bound: int) -> HitchinPair:
    bundle = BundleP1(tuple(splitting))
    a = bundle.splitting
    theta = [
        [random_section(rng, a[i] + n - a[j], bound) for j in range(bundle.rank)]
        for i in range(bundle.rank)
    ]
    return HitchinPair(bundle, TwistedEndo(bundle, n, theta))


def random_poisson_section(rng: np.random.Generator, n: int, bound: int, max_tries: int = 100) -> PoissonSection:
    for _ in range(max_tries):
        f = random_section(rng, n + 2, max(bound, 1))
        if f:
            return PoissonSection.from_poly(n, f)
    raise RuntimeError("could not draw a nonzero sigma0")


# ================================
# JSON
# ================================
def section_to_json(f: LaurentPoly, d: int) -> List[str]:
    return [rational_str(c) for c in h0_coordinates(f, d)] if d >= 0 else []


def pair_to_json(p: HitchinPair, sigma: Optional[PoissonSection] = None) -> dict:
    out = {
        "splitting": list(p.bundle.splitting),
        "n": p.n,
        "theta": [
            [section_to_json(p.theta.entries[i][j], p.theta.entry_degree(i, j)) for j in range(p.rank)]
            for i in range(p.rank)
        ],
    }
    if sigma is not None:
        out["sigma0"] = [rational_str(c) for c in sigma.coefficients]
    return out


def pair_from_json(obj: dict) -> Tuple[HitchinPair, Optional[PoissonSection]]:
    """Inverse of pair_to_json; the caller validates obj against PAIR_SCHEMA first."""
    n = int(obj["n"])
    theta = [[[to_rational(c) for c in entry] for entry in row] for row in obj["theta"]]
    pair = HitchinPair.build(obj["splitting"], n, theta)
    sigma = None
    if obj.get("sigma0") is not None:
        sigma = PoissonSection(n, tuple(obj["sigma0"]))
    logging.debug("Loaded pair r=%d n=%d splitting=%s", pair.rank, n, pair.bundle.splitting)
    return pair, sigma
