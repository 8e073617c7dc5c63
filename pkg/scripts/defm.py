"""
defm.py
-----------------
Two-term complexes A0 --d--> A1 of split bundles on P^1 and their Cech
hypercohomology, with explicit cochain representatives.

Conventions (fixed once, everything downstream relies on them):

  * a degree-0 hypercochain is c = (c0, c1), one pair of chart sections per
    A0 summand; D(c) = (delta c, d c) = (c1 - c0, d c0, d c1)
  * a degree-1 hypercochain is (a, b0, b1): a on the overlap in A0, b0 and
    b1 chart sections in A1; it is a cocycle iff d(a) = b1 - b0
  * all sections are z-forms (see p1sheaf)

H^1 is computed from the long exact sequence

  0 -> H0 -> H^0(A0) -M0-> H^0(A1) -> H1 -> H^1(A0) -M1-> H^1(A1) -> H2 -> 0

and checked against a truncated Cech total complex (the "window").
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .exact import (
    LaurentPoly,
    NoSolution,
    RatMatrix,
    SparseEchelon,
    Vector,
    determinant,
    kernel_basis,
    quotient_basis,
    rank,
    solve_columns,
)
from .hitchin import BundleMap, BundleP1, HitchinPair, poly_matmul
from .p1sheaf import CHARTS, h0_exponents, h1_exponents, residue, split_coboundary
from .spectral import SpectralSheafRep, phi

Label = Hashable


class WindowInstabilityError(RuntimeError):
    """Raised when truncated Cech cohomology disagrees with the long exact sequence."""


class PairingConventionError(RuntimeError):
    """Raised when the Serre pairing depends on representatives or degenerates."""


class NonCommutingMorphismError(ValueError):
    """Raised when a would-be chain map does not commute with the differentials."""


class NotACocycleError(ValueError):
    """Raised when a hypercochain fails d(a) = b1 - b0 or a regularity condition."""


# ================================
# COMPLEXES
# ================================
@dataclass(frozen=True)
class TwoTermComplex:
    """A0 --d--> A1 with labelled line-bundle summands; A1 = A0 (x) O(n) summand-wise up to relabelling."""

    name: str
    source_labels: Tuple[Label, ...]
    target_labels: Tuple[Label, ...]
    differential: BundleMap
    n: int

    def __post_init__(self):
        if len(self.source_labels) != self.differential.source.rank:
            raise ValueError("one label per A0 summand")
        if len(self.target_labels) != self.differential.target.rank:
            raise ValueError("one label per A1 summand")

    @property
    def source(self) -> BundleP1:
        return self.differential.source

    @property
    def target(self) -> BundleP1:
        return self.differential.target

    @property
    def source_degrees(self) -> Tuple[int, ...]:
        return self.source.splitting

    @property
    def target_degrees(self) -> Tuple[int, ...]:
        return self.target.splitting

    @property
    def d(self) -> Tuple[Tuple[LaurentPoly, ...], ...]:
        return self.differential.entries

    def apply(self, vec: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        return self.differential.apply(vec)

    @property
    def max_abs_degree(self) -> int:
        return max(abs(e) for e in self.source_degrees + self.target_degrees)

    @property
    def max_entry_exponent(self) -> int:
        return max((e.max_exp for row in self.d for e in row if e), default=0)

    def default_window(self, window_extra: int = 0) -> int:
        return self.max_abs_degree + self.n + 2 + window_extra

    def euler_characteristic(self) -> int:
        """chi(A0) - chi(A1)."""
        return self.source.euler_characteristic() - self.target.euler_characteristic()


def build_complex(
    name: str,
    source_labels: Sequence[Label],
    source_degrees: Sequence[int],
    target_labels: Sequence[Label],
    target_degrees: Sequence[int],
    terms: Dict[Tuple[Label, Label], LaurentPoly],
    n: int,
) -> TwoTermComplex:
    """terms[(target_label, source_label)] is the matrix entry of d."""
    s_index = {lab: i for i, lab in enumerate(source_labels)}
    t_index = {lab: i for i, lab in enumerate(target_labels)}
    entries = [[LaurentPoly.zero() for _ in source_labels] for _ in target_labels]
    for (tl, sl), f in terms.items():
        entries[t_index[tl]][s_index[sl]] = entries[t_index[tl]][s_index[sl]] + f
    d = BundleMap(BundleP1(tuple(source_degrees)), BundleP1(tuple(target_degrees)), entries)
    return TwoTermComplex(name, tuple(source_labels), tuple(target_labels), d, n)


def _bracket_complex(p: HitchinPair, shift: int, name: str) -> TwoTermComplex:
    """[End E (x) O(shift) -> End E (x) O(shift + n)], phi -> phi theta - theta phi.

    Label (i, j) is the entry phi_ij : O(a_j) -> O(a_i).
    """
    a, r, n = p.bundle.splitting, p.rank, p.n
    theta = p.theta.entries
    labels = [(i, j) for i in range(r) for j in range(r)]
    terms: Dict[Tuple[Label, Label], LaurentPoly] = {}

    def add(t, s, f):
        if f:
            terms[(t, s)] = terms.get((t, s), LaurentPoly.zero()) + f

    for (pp, q) in labels:
        for j in range(r):
            add((pp, j), (pp, q), theta[q][j])
        for i in range(r):
            add((i, q), (pp, q), -theta[i][pp])
    return build_complex(
        name,
        labels, [a[i] - a[j] + shift for i, j in labels],
        labels, [a[i] - a[j] + shift + n for i, j in labels],
        terms, n,
    )


def end_complex(p: HitchinPair) -> TwoTermComplex:
    """Tangent complex [End E -> End E (x) N]."""
    return _bracket_complex(p, 0, "End")


def cotangent_complex(p: HitchinPair) -> TwoTermComplex:
    """Shifted dual [End E (x) N^-1 (x) K -> End E (x) K], K = O(-2)."""
    return _bracket_complex(p, -p.n - 2, "Cot")


# ================================
# COEFFICIENT SHEAVES (phi_W)
# ================================
@dataclass(frozen=True)
class CoefficientSheaf:
    """W = L (x) p^* O(t), held as (P, psi) = p_* L with the extra twist t."""

    rep: SpectralSheafRep
    twist: int = 0

    @property
    def bundle(self) -> BundleP1:
        return self.rep.bundle.twist(self.twist)

    @property
    def psi(self) -> Tuple[Tuple[LaurentPoly, ...], ...]:
        return self.rep.psi.entries


def sheaf_coefficient(p: HitchinPair) -> CoefficientSheaf:
    """W = L."""
    return CoefficientSheaf(phi(p, check_stable=False), 0)


def canonical_coefficient(p: HitchinPair) -> CoefficientSheaf:
    """W = L (x) K_S, K_S = p^*(K_X (x) N^-1), i.e. t = -n - 2."""
    return CoefficientSheaf(phi(p, check_stable=False), -p.n - 2)


@dataclass(frozen=True)
class CoefficientMorphism:
    source: CoefficientSheaf
    target: CoefficientSheaf
    g: BundleMap

    def __post_init__(self):
        if self.g.source != self.source.bundle or self.g.target != self.target.bundle:
            raise ValueError("g must map P(t) to P'(t')")

    def commutes(self) -> bool:
        return poly_matmul(self.g.entries, self.source.psi) == poly_matmul(self.target.psi, self.g.entries)


def scalar_morphism(source: CoefficientSheaf, target: CoefficientSheaf, f: LaurentPoly) -> CoefficientMorphism:
    """f * Id : P(t) -> P(t'), f a section of O(t' - t)."""
    if source.rep != target.rep:
        raise ValueError("scalar morphisms act on a single push-forward pair")
    r = source.rep.rank
    entries = [[f if i == j else LaurentPoly.zero() for j in range(r)] for i in range(r)]
    return CoefficientMorphism(source, target, BundleMap(source.bundle, target.bundle, entries))


def phi_W(p: HitchinPair, w: CoefficientSheaf) -> TwoTermComplex:
    """[E^v (x) P(t) -> E^v (x) P(t) (x) N], u -> u theta - psi u.

    Label (j, k) is u_kj : O(a_j) -> O(b_k + t).
    """
    a, r, n = p.bundle.splitting, p.rank, p.n
    b = w.bundle.splitting
    m = len(b)
    theta, psi = p.theta.entries, w.psi
    labels = [(j, k) for j in range(r) for k in range(m)]
    terms: Dict[Tuple[Label, Label], LaurentPoly] = {}

    def add(t, s, f):
        if f:
            terms[(t, s)] = terms.get((t, s), LaurentPoly.zero()) + f

    for j in range(r):
        for k in range(m):
            for q in range(r):
                add((j, k), (q, k), theta[q][j])
            for mm in range(m):
                add((j, k), (j, mm), -psi[k][mm])
    return build_complex(
        f"phi_W(t={w.twist})",
        labels, [b[k] - a[j] for j, k in labels],
        labels, [b[k] - a[j] + n for j, k in labels],
        terms, n,
    )


# ================================
# HYPERCOCHAINS
# ================================
@dataclass(frozen=True)
class HyperClass:
    """Degree-1 hypercochain (a, b0, b1) in z-form."""

    a: Tuple[LaurentPoly, ...]
    b0: Tuple[LaurentPoly, ...]
    b1: Tuple[LaurentPoly, ...]

    @classmethod
    def zero(cls, c: TwoTermComplex) -> "HyperClass":
        z = LaurentPoly.zero()
        return cls(tuple(z for _ in c.source_labels), tuple(z for _ in c.target_labels), tuple(z for _ in c.target_labels))

    def __add__(self, other: "HyperClass") -> "HyperClass":
        return HyperClass(
            tuple(x + y for x, y in zip(self.a, other.a)),
            tuple(x + y for x, y in zip(self.b0, other.b0)),
            tuple(x + y for x, y in zip(self.b1, other.b1)),
        )

    def __sub__(self, other: "HyperClass") -> "HyperClass":
        return self + other.scale(-1)

    def scale(self, c) -> "HyperClass":
        c = Fraction(c)
        return HyperClass(tuple(c * x for x in self.a), tuple(c * x for x in self.b0), tuple(c * x for x in self.b1))

    def multiply(self, f: LaurentPoly) -> "HyperClass":
        return HyperClass(tuple(f * x for x in self.a), tuple(f * x for x in self.b0), tuple(f * x for x in self.b1))

    def is_zero(self) -> bool:
        return not any(self.a) and not any(self.b0) and not any(self.b1)


def total_differential(c: TwoTermComplex, c0: Sequence[LaurentPoly], c1: Sequence[LaurentPoly]) -> HyperClass:
    for s, (x0, x1) in enumerate(zip(c0, c1)):
        if not CHARTS.is_chart0_regular(x0) or not CHARTS.is_chart1_regular(x1, c.source_degrees[s]):
            raise ValueError(f"summand {c.source_labels[s]}: ({x0}, {x1}) is not a 0-cochain")
    return HyperClass(
        tuple(x1 - x0 for x0, x1 in zip(c0, c1)),
        tuple(c.apply(c0)),
        tuple(c.apply(c1)),
    )


def cocycle_defect(c: TwoTermComplex, xi: HyperClass) -> List[LaurentPoly]:
    """d(a) - (b1 - b0), summand-wise in A1."""
    return [da - (y1 - y0) for da, y0, y1 in zip(c.apply(xi.a), xi.b0, xi.b1)]


def is_cocycle(c: TwoTermComplex, xi: HyperClass) -> bool:
    if len(xi.a) != len(c.source_labels) or len(xi.b0) != len(c.target_labels) or len(xi.b1) != len(c.target_labels):
        return False
    for k, deg in enumerate(c.target_degrees):
        if not CHARTS.is_chart0_regular(xi.b0[k]) or not CHARTS.is_chart1_regular(xi.b1[k], deg):
            return False
    return not any(cocycle_defect(c, xi))


def random_coboundary(c: TwoTermComplex, rng: np.random.Generator, window: int, bound: int = 3) -> HyperClass:
    def draw(lo: int, hi: int) -> LaurentPoly:
        if hi < lo:
            return LaurentPoly.zero()
        coeffs = rng.integers(-bound, bound, size=hi - lo + 1, endpoint=True)
        return LaurentPoly.from_list([int(v) for v in coeffs], start=lo)

    c0 = [draw(0, window) for _ in c.source_labels]
    c1 = [draw(-window, deg) for deg in c.source_degrees]
    return total_differential(c, c0, c1)


# ================================
# LONG EXACT SEQUENCE
# ================================
def _h0_slots(degrees: Sequence[int]) -> List[Tuple[int, int]]:
    return [(s, e) for s, deg in enumerate(degrees) for e in h0_exponents(deg)]


def _h1_slots(degrees: Sequence[int]) -> List[Tuple[int, int]]:
    return [(s, e) for s, deg in enumerate(degrees) for e in h1_exponents(deg)]


def _h0_vector(sections: Sequence[LaurentPoly], degrees: Sequence[int]) -> Vector:
    for s, (f, deg) in enumerate(zip(sections, degrees)):
        if not CHARTS.is_global(f, deg):
            raise NotACocycleError(f"summand {s}: {f} is not a global section of O({deg})")
    return [sections[s].coefficient(e) for s, e in _h0_slots(degrees)]


def _h1_vector(overlaps: Sequence[LaurentPoly], degrees: Sequence[int]) -> Vector:
    return [overlaps[s].coefficient(e) for s, e in _h1_slots(degrees)]


def _from_slots(vec: Sequence[Fraction], slots: Sequence[Tuple[int, int]], size: int) -> List[LaurentPoly]:
    coeffs: List[Dict[int, Fraction]] = [{} for _ in range(size)]
    for (s, e), v in zip(slots, vec):
        if v:
            coeffs[s][e] = v
    return [LaurentPoly(c) for c in coeffs]


def h0_map(c: TwoTermComplex) -> RatMatrix:
    """M0 : H^0(A0) -> H^0(A1) in monomial coordinates."""
    rows = {slot: i for i, slot in enumerate(_h0_slots(c.target_degrees))}
    columns = []
    for s, e in _h0_slots(c.source_degrees):
        col = [Fraction(0)] * len(rows)
        for k, row in enumerate(c.d):
            for exp, v in (row[s].shift(e)).terms():
                col[rows[(k, exp)]] += v
        columns.append(col)
    return RatMatrix.from_columns(columns, len(rows))


def h1_map(c: TwoTermComplex) -> RatMatrix:
    """M1 : H^1(A0) -> H^1(A1) in monomial coordinates."""
    rows = {slot: i for i, slot in enumerate(_h1_slots(c.target_degrees))}
    columns = []
    for s, e in _h1_slots(c.source_degrees):
        col = [Fraction(0)] * len(rows)
        for k, row in enumerate(c.d):
            for exp, v in (row[s].shift(e)).terms():
                if (k, exp) in rows:
                    col[rows[(k, exp)]] += v
        columns.append(col)
    return RatMatrix.from_columns(columns, len(rows))


def hyper_h0_dim(c: TwoTermComplex) -> int:
    m0 = h0_map(c)
    return m0.cols - rank(m0)


def hyper_h2_dim(c: TwoTermComplex) -> int:
    m1 = h1_map(c)
    return m1.rows - rank(m1)


@dataclass(frozen=True)
class HyperBasis:
    """Basis of H^1: cokernel segment first, then kernel segment."""

    complex: TwoTermComplex
    classes: Tuple[HyperClass, ...]
    coker_dim: int
    h0_map: RatMatrix
    h1_map: RatMatrix
    coker_reps: RatMatrix
    kernel: RatMatrix

    @property
    def dim(self) -> int:
        return len(self.classes)

    @property
    def ker_dim(self) -> int:
        return self.dim - self.coker_dim

    def coordinates(self, xi: HyperClass) -> Vector:
        return self.coordinates_many([xi]).column(0)

    def coordinates_many(self, xis: Sequence[HyperClass]) -> RatMatrix:
        """Columns of basis coordinates of the classes of the given cocycles."""
        c = self.complex
        if not xis:
            return RatMatrix.zeros(self.dim, 0)
        kappa = RatMatrix.from_columns([_h1_vector(x.a, c.source_degrees) for x in xis], self.kernel.rows)
        try:
            y = solve_columns(self.kernel, kappa)
        except NoSolution as e:
            raise NotACocycleError("overlap part does not map to zero in H^1(A1)") from e
        kernel_classes = self.classes[self.coker_dim:]
        globals_: List[Vector] = []
        for col, xi in enumerate(xis):
            rest = xi
            for j, basis_class in enumerate(kernel_classes):
                if y[j, col]:
                    rest = rest - basis_class.scale(y[j, col])
            c0, c1 = [], []
            for s, f in enumerate(rest.a):
                piece = split_coboundary(f, c.source_degrees[s])
                c0.append(piece.parts[0])
                c1.append(piece.parts[1])
            rest = rest - total_differential(c, c0, c1)
            if any(rest.a) or rest.b0 != rest.b1:
                raise NotACocycleError("cochain does not satisfy d(a) = b1 - b0")
            globals_.append(_h0_vector(rest.b0, c.target_degrees))
        s_mat = RatMatrix.from_columns(globals_, self.h0_map.rows)
        u = solve_columns(self.coker_reps.hstack(self.h0_map), s_mat)
        rows = [u.row(i) for i in range(self.coker_dim)] + [y.row(j) for j in range(self.ker_dim)]
        return RatMatrix(rows, rows=self.dim, cols=len(xis))

    def combination(self, coords: Sequence[Fraction]) -> HyperClass:
        out = HyperClass.zero(self.complex)
        for v, cls in zip(coords, self.classes):
            if v:
                out = out + cls.scale(v)
        return out


@lru_cache(maxsize=128)
def hyper_h1_basis(c: TwoTermComplex) -> HyperBasis:
    m0, m1 = h0_map(c), h1_map(c)
    image = [m0.column(j) for j in range(m0.cols)]
    reps = quotient_basis(m0.rows, image)
    kernel = kernel_basis(m1)
    h0_slots1 = _h0_slots(c.target_degrees)
    h1_slots0 = _h1_slots(c.source_degrees)

    classes: List[HyperClass] = []
    zero_a = tuple(LaurentPoly.zero() for _ in c.source_labels)
    for rep in reps:
        s = tuple(_from_slots(rep, h0_slots1, len(c.target_labels)))
        classes.append(HyperClass(zero_a, s, s))
    for kappa in kernel:
        a = _from_slots(kappa, h1_slots0, len(c.source_labels))
        b0, b1 = [], []
        for k, f in enumerate(c.apply(a)):
            piece = split_coboundary(f, c.target_degrees[k])
            b0.append(piece.parts[0])
            b1.append(piece.parts[1])
        classes.append(HyperClass(tuple(a), tuple(b0), tuple(b1)))

    logging.debug("%s: coker %d + ker %d = dim H1 %d", c.name, len(reps), len(kernel), len(classes))
    return HyperBasis(
        complex=c,
        classes=tuple(classes),
        coker_dim=len(reps),
        h0_map=m0,
        h1_map=m1,
        coker_reps=RatMatrix.from_columns(reps, m0.rows),
        kernel=RatMatrix.from_columns(kernel, m1.cols),
    )


def hyper_dims(c: TwoTermComplex) -> Tuple[int, int, int]:
    return hyper_h0_dim(c), hyper_h1_basis(c).dim, hyper_h2_dim(c)


def class_coordinates(c: TwoTermComplex, xi: HyperClass) -> Vector:
    return hyper_h1_basis(c).coordinates(xi)


def is_coboundary(c: TwoTermComplex, xi: HyperClass) -> bool:
    if not is_cocycle(c, xi):
        raise NotACocycleError("only cocycles have a class")
    return not any(class_coordinates(c, xi))


def euler_check(c: TwoTermComplex) -> bool:
    h0, h1, h2 = hyper_dims(c)
    return h0 - h1 + h2 == c.euler_characteristic()


# ================================
# WINDOWED CECH COMPLEX
# ================================
class _WindowLayout:
    """Index sets of the truncated total complex C^0_W -> C^1_W -> C^2_W."""

    def __init__(self, c: TwoTermComplex, window: int):
        if window < c.max_abs_degree:
            raise ValueError(f"window {window} below the largest summand degree {c.max_abs_degree}")
        self.c = c
        self.window = window
        top = window + c.max_entry_exponent
        self.x_index: Dict[Tuple[str, int, int], int] = {}
        for s, _ in enumerate(c.source_labels):
            for e in range(-window, window + 1):
                self.x_index[("a", s, e)] = len(self.x_index)
        for k, deg in enumerate(c.target_degrees):
            for e in range(0, top + 1):
                self.x_index[("b0", k, e)] = len(self.x_index)
            for e in range(-window, deg + 1):
                self.x_index[("b1", k, e)] = len(self.x_index)
        self.y_index: Dict[Tuple[int, int], int] = {}
        for k, _ in enumerate(c.target_labels):
            for e in range(-window, top + 1):
                self.y_index[(k, e)] = len(self.y_index)

    def cocycle_rank(self) -> int:
        """Rank of C^1_W -> C^2_W, (a, b) -> d(a) - b1 + b0."""
        echelon = SparseEchelon()
        for (part, k, e) in self.x_index:
            if part == "b0":
                echelon.add({self.y_index[(k, e)]: 1})
            elif part == "b1":
                echelon.add({self.y_index[(k, e)]: -1})
        for (part, s, e) in self.x_index:
            if part != "a":
                continue
            row: Dict[int, Fraction] = {}
            for k, d_row in enumerate(self.c.d):
                for exp, v in d_row[s].shift(e).terms():
                    idx = self.y_index[(k, exp)]
                    row[idx] = row.get(idx, 0) + v
            echelon.add(row)
        return echelon.rank

    def coboundary_echelon(self) -> SparseEchelon:
        """Row space of C^0_W -> C^1_W."""
        echelon = SparseEchelon()
        c = self.c
        for s, deg in enumerate(c.source_degrees):
            for chart, lo, hi in (("c0", 0, self.window), ("c1", -self.window, deg)):
                for e in range(lo, hi + 1):
                    mono = LaurentPoly.monomial(e)
                    sign = -1 if chart == "c0" else 1
                    row: Dict[int, Fraction] = {self.x_index[("a", s, e)]: Fraction(sign)}
                    part = "b0" if chart == "c0" else "b1"
                    for k, d_row in enumerate(c.d):
                        for exp, v in (d_row[s] * mono).terms():
                            idx = self.x_index[(part, k, exp)]
                            row[idx] = row.get(idx, 0) + v
                    echelon.add(row)
        return echelon

    def vector(self, xi: HyperClass) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for part, polys in (("a", xi.a), ("b0", xi.b0), ("b1", xi.b1)):
            for s, f in enumerate(polys):
                for e, v in f.terms():
                    key = (part, s, e)
                    if key not in self.x_index:
                        raise WindowInstabilityError(f"{part}[{s}] exponent {e} falls outside window {self.window}")
                    out[self.x_index[key]] = v
        return out


def windowed_h1_dim(c: TwoTermComplex, window: int) -> int:
    layout = _WindowLayout(c, window)
    return len(layout.x_index) - layout.cocycle_rank() - layout.coboundary_echelon().rank


def window_independent_classes(c: TwoTermComplex, window: int, classes: Sequence[HyperClass]) -> int:
    """Number of the given cocycles independent modulo windowed coboundaries."""
    layout = _WindowLayout(c, window)
    echelon = layout.coboundary_echelon()
    return sum(1 for xi in classes if echelon.add(layout.vector(xi)))


def check_window_stability(c: TwoTermComplex, window_extra: int = 0) -> List[int]:
    """Windowed H^1 at W, W+1, W+2 must equal the long-exact-sequence dimension."""
    basis = hyper_h1_basis(c)
    w = c.default_window(window_extra)
    dims = [windowed_h1_dim(c, w + k) for k in range(3)]
    if any(dim != basis.dim for dim in dims):
        raise WindowInstabilityError(f"{c.name}: windowed dims {dims} != {basis.dim}")
    independent = window_independent_classes(c, w, basis.classes)
    if independent != basis.dim:
        raise WindowInstabilityError(f"{c.name}: only {independent} of {basis.dim} basis classes survive in window {w}")
    logging.debug("%s: window %d stable at dim %d", c.name, w, basis.dim)
    return dims


# ================================
# CHAIN MAPS
# ================================
@dataclass(frozen=True)
class ChainMap:
    source: TwoTermComplex
    target: TwoTermComplex
    f0: BundleMap
    f1: BundleMap

    def __post_init__(self):
        if self.f0.source != self.source.source or self.f0.target != self.target.source:
            raise ValueError("f0 must map A0 to A0'")
        if self.f1.source != self.source.target or self.f1.target != self.target.target:
            raise ValueError("f1 must map A1 to A1'")
        left = poly_matmul(self.target.d, self.f0.entries)
        right = poly_matmul(self.f1.entries, self.source.d)
        if left != right:
            raise NonCommutingMorphismError(f"{self.source.name} -> {self.target.name} is not a chain map")

    def apply(self, xi: HyperClass) -> HyperClass:
        return HyperClass(tuple(self.f0.apply(xi.a)), tuple(self.f1.apply(xi.b0)), tuple(self.f1.apply(xi.b1)))


def induced_h1(f: ChainMap) -> RatMatrix:
    """Matrix of H^1(f) from the source basis to the target basis."""
    src = hyper_h1_basis(f.source)
    tgt = hyper_h1_basis(f.target)
    return tgt.coordinates_many([f.apply(xi) for xi in src.classes])


def label_identification(source: TwoTermComplex, target: TwoTermComplex, relabel: Callable[[Label], Label]) -> ChainMap:
    """Permutation chain map sending summand `label` to summand `relabel(label)`."""

    def perm(src_labels, tgt_labels, src_bundle, tgt_bundle):
        index = {lab: i for i, lab in enumerate(tgt_labels)}
        entries = [[LaurentPoly.zero() for _ in src_labels] for _ in tgt_labels]
        for j, lab in enumerate(src_labels):
            entries[index[relabel(lab)]][j] = LaurentPoly.constant(1)
        return BundleMap(src_bundle, tgt_bundle, entries)

    return ChainMap(
        source, target,
        perm(source.source_labels, target.source_labels, source.source, target.source),
        perm(source.target_labels, target.target_labels, source.target, target.target),
    )


def swap_label(label: Tuple[int, int]) -> Tuple[int, int]:
    return (label[1], label[0])


def functoriality_chain_map(p: HitchinPair, morphism: CoefficientMorphism) -> ChainMap:
    if not morphism.commutes():
        raise NonCommutingMorphismError("W -> W' does not commute with psi")
    src, tgt = phi_W(p, morphism.source), phi_W(p, morphism.target)
    g = morphism.g.entries

    def lift(src_labels, tgt_labels, src_bundle, tgt_bundle):
        s_index = {lab: i for i, lab in enumerate(src_labels)}
        entries = [[LaurentPoly.zero() for _ in src_labels] for _ in tgt_labels]
        for t, (j, k) in enumerate(tgt_labels):
            for m in range(len(g[0])):
                if g[k][m]:
                    entries[t][s_index[(j, m)]] = g[k][m]
        return BundleMap(src_bundle, tgt_bundle, entries)

    return ChainMap(
        src, tgt,
        lift(src.source_labels, tgt.source_labels, src.source, tgt.source),
        lift(src.target_labels, tgt.target_labels, src.target, tgt.target),
    )


def functoriality_map(p: HitchinPair, morphism: CoefficientMorphism) -> RatMatrix:
    """H^1(phi_W(W)) -> H^1(phi_W(W')) induced by u -> g o u."""
    return induced_h1(functoriality_chain_map(p, morphism))


# ================================
# SERRE DUALITY
# ================================
@dataclass(frozen=True)
class DualityData:
    """C and its shifted K-twisted dual C^dag with summand matchings and the pairing matrix.

    sigma[t]: A1 summand of C paired with A0 summand t of C^dag.
    tau[s]:   A0 summand of C paired with A1 summand s of C^dag.
    pairing[i][j] = <cotangent class i, tangent class j>.
    """

    tangent: TwoTermComplex
    cotangent: TwoTermComplex
    sigma: Tuple[int, ...]
    tau: Tuple[int, ...]
    pairing: RatMatrix

    @property
    def tangent_basis(self) -> HyperBasis:
        return hyper_h1_basis(self.tangent)

    @property
    def cotangent_basis(self) -> HyperBasis:
        return hyper_h1_basis(self.cotangent)


def _pair_cochains(tangent: TwoTermComplex, sigma, tau, xi: HyperClass, v: HyperClass) -> Fraction:
    total = LaurentPoly.zero()
    for t, f in enumerate(xi.a):
        if f:
            total = total + f * v.b1[sigma[t]]
    for s, f in enumerate(xi.b0):
        if f:
            total = total - f * v.a[tau[s]]
    return residue(total)


def _validate_dual(tangent: TwoTermComplex, cotangent: TwoTermComplex, sigma, tau) -> None:
    for t, deg in enumerate(cotangent.source_degrees):
        if deg + tangent.target_degrees[sigma[t]] != -2:
            raise PairingConventionError(f"summand {cotangent.source_labels[t]} does not pair into K")
    for s, deg in enumerate(cotangent.target_degrees):
        if deg + tangent.source_degrees[tau[s]] != -2:
            raise PairingConventionError(f"summand {cotangent.target_labels[s]} does not pair into K")
    for s in range(len(cotangent.target_labels)):
        for t in range(len(cotangent.source_labels)):
            if cotangent.d[s][t] != -tangent.d[sigma[t]][tau[s]]:
                raise PairingConventionError(
                    f"{cotangent.name} is not the negated transpose of {tangent.name} at ({s}, {t})"
                )


def duality_data(
    tangent: TwoTermComplex,
    cotangent: TwoTermComplex,
    match: Callable[[Label], Label] = swap_label,
) -> DualityData:
    t_index = {lab: i for i, lab in enumerate(tangent.target_labels)}
    s_index = {lab: i for i, lab in enumerate(tangent.source_labels)}
    sigma = tuple(t_index[match(lab)] for lab in cotangent.source_labels)
    tau = tuple(s_index[match(lab)] for lab in cotangent.target_labels)
    _validate_dual(tangent, cotangent, sigma, tau)
    tb, cb = hyper_h1_basis(tangent), hyper_h1_basis(cotangent)
    if tb.dim != cb.dim:
        raise PairingConventionError(f"dim H1 {tb.dim} vs dual {cb.dim}")
    pairing = RatMatrix(
        [[_pair_cochains(tangent, sigma, tau, xi, v) for v in tb.classes] for xi in cb.classes],
        rows=cb.dim,
        cols=tb.dim,
    )
    if tb.dim and determinant(pairing) == 0:
        raise PairingConventionError(f"Serre pairing between {cotangent.name} and {tangent.name} is degenerate")
    return DualityData(tangent, cotangent, sigma, tau, pairing)


def serre_pairing(dd: DualityData, xi: HyperClass, v: HyperClass) -> Fraction:
    """<xi, v> for a cocycle xi of C^dag and a cocycle v of C."""
    if not is_cocycle(dd.cotangent, xi) or not is_cocycle(dd.tangent, v):
        raise NotACocycleError("serre_pairing takes cocycles")
    return _pair_cochains(dd.tangent, dd.sigma, dd.tau, xi, v)


def check_representative_independence(
    dd: DualityData,
    rng: np.random.Generator,
    trials: int = 20,
    bound: int = 3,
    window: Optional[int] = None,
) -> int:
    """Perturb basis classes by random coboundaries; the pairing must not move."""
    tb, cb = dd.tangent_basis, dd.cotangent_basis
    if not tb.dim:
        return 0
    w = window if window is not None else dd.tangent.default_window()
    for trial in range(trials):
        i = int(rng.integers(0, cb.dim))
        j = int(rng.integers(0, tb.dim))
        xi = cb.classes[i] + random_coboundary(dd.cotangent, rng, w, bound)
        v = tb.classes[j] + random_coboundary(dd.tangent, rng, w, bound)
        value = serre_pairing(dd, xi, v)
        if value != dd.pairing[i, j]:
            raise PairingConventionError(
                f"trial {trial}: <{i}, {j}> moved from {dd.pairing[i, j]} to {value} under a coboundary"
            )
        if serre_pairing(dd, random_coboundary(dd.cotangent, rng, w, bound), tb.classes[j]) != 0:
            raise PairingConventionError(f"trial {trial}: a coboundary pairs nontrivially")
    return trials
