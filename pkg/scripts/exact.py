"""
exact.py
-----------------
Exact rational scalars, Laurent polynomials in one chart coordinate and
tolerance-free linear algebra over Q.

Matrices are numpy ``object`` arrays of ``fractions.Fraction`` so that every
row operation stays exact. Large, very sparse Cech systems go through
``SparseEchelon`` instead of a dense matrix.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

Rational = Fraction
Vector = List[Fraction]


class NoSolution(ValueError):
    """Raised when a right-hand side is not in the column space."""


def to_rational(value) -> Fraction:
    """Coerce ints, strings ("3/2"), Fractions and sympy rationals to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip().replace("−", "-"))
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, sympy.Basic) and value.is_Rational:
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"Cannot convert {value!r} to an exact rational")


def rational_str(value: Fraction) -> str:
    value = to_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ================================
# LAURENT POLYNOMIALS
# ================================
class LaurentPoly:
    """Sparse exact Laurent polynomial sum(c_k * z**k); immutable, no zero terms."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Optional[Mapping[int, object]] = None):
        clean: Dict[int, Fraction] = {}
        for k, c in (coeffs or {}).items():
            c = to_rational(c)
            if c != 0:
                clean[int(k)] = c
        self._coeffs = clean
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: Dict[int, Fraction]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._coeffs = {k: c for k, c in coeffs.items() if c != 0}
        obj._hash = None
        return obj

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls._raw({})

    @classmethod
    def constant(cls, c) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, c=1) -> "LaurentPoly":
        return cls({k: c})

    @classmethod
    def from_list(cls, coeffs: Sequence[object], start: int = 0) -> "LaurentPoly":
        """Dense coefficient list, ``coeffs[i]`` multiplying z**(start + i)."""
        return cls({start + i: c for i, c in enumerate(coeffs)})

    # --- accessors ---
    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    @property
    def min_exp(self) -> Optional[int]:
        return min(self._coeffs) if self._coeffs else None

    @property
    def max_exp(self) -> Optional[int]:
        return max(self._coeffs) if self._coeffs else None

    def coefficient(self, k: int) -> Fraction:
        return self._coeffs.get(k, Fraction(0))

    def terms(self) -> List[Tuple[int, Fraction]]:
        return sorted(self._coeffs.items())

    def exponents(self) -> List[int]:
        return sorted(self._coeffs)

    def dense(self, lo: int, hi: int) -> Vector:
        return [self.coefficient(k) for k in range(lo, hi + 1)]

    # --- arithmetic ---
    def __add__(self, other) -> "LaurentPoly":
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other) -> "LaurentPoly":
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return LaurentPoly._raw({k: c * v for k, v in self._coeffs.items()})
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out: Dict[int, Fraction] = {}
        for k1, c1 in self._coeffs.items():
            for k2, c2 in other._coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "LaurentPoly":
        if e < 0:
            raise ValueError("negative powers are not Laurent-closed in general")
        out = LaurentPoly.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by z**k."""
        return LaurentPoly._raw({e + k: c for e, c in self._coeffs.items()})

    def reflect(self, d: int) -> "LaurentPoly":
        """z**d * f(1/z): the chart change for a section of O(d)."""
        return LaurentPoly._raw({d - e: c for e, c in self._coeffs.items()})

    def restrict(self, lo: Optional[int] = None, hi: Optional[int] = None) -> "LaurentPoly":
        """Keep only the terms with lo <= exponent <= hi."""
        return LaurentPoly._raw({
            e: c for e, c in self._coeffs.items()
            if (lo is None or e >= lo) and (hi is None or e <= hi)
        })

    def exponents_within(self, lo: Optional[int], hi: Optional[int]) -> bool:
        return all((lo is None or e >= lo) and (hi is None or e <= hi) for e in self._coeffs)

    def derivative(self) -> "LaurentPoly":
        return LaurentPoly._raw({e - 1: e * c for e, c in self._coeffs.items() if e != 0})

    # --- sympy bridge ---
    def to_sympy(self, symbol: sympy.Symbol) -> sympy.Expr:
        return sympy.Add(*[
            sympy.Rational(c.numerator, c.denominator) * symbol ** e
            for e, c in self._coeffs.items()
        ])

    @classmethod
    def from_sympy(cls, expr, symbol: sympy.Symbol) -> "LaurentPoly":
        out: Dict[int, Fraction] = {}
        for term in sympy.Add.make_args(sympy.expand(expr)):
            if term == 0:
                continue
            coeff, exp = term.as_coeff_exponent(symbol)
            if not (coeff.is_Rational and exp.is_Integer):
                raise ValueError(f"Not a rational Laurent term in {symbol}: {term}")
            out[int(exp)] = out.get(int(exp), 0) + to_rational(coeff)
        return cls._raw(out)

    # --- protocol ---
    def __eq__(self, other) -> bool:
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._coeffs:
            return "LaurentPoly(0)"
        parts = [f"{rational_str(c)}*z^{e}" for e, c in self.terms()]
        return "LaurentPoly(" + " + ".join(parts) + ")"


def _as_laurent(value):
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return LaurentPoly.constant(value)
    return NotImplemented


# ================================
# DENSE MATRICES
# ================================
class RatMatrix:
    """Exact rational matrix backed by a numpy object array."""

    __slots__ = ("_a",)

    def __init__(self, entries, rows: Optional[int] = None, cols: Optional[int] = None):
        if isinstance(entries, np.ndarray):
            rows, cols = entries.shape
            entries = entries.tolist()
        else:
            entries = [list(row) for row in entries]
            rows = len(entries) if rows is None else rows
            cols = (len(entries[0]) if entries else 0) if cols is None else cols
        if len(entries) != rows:
            raise ValueError(f"{len(entries)} rows given, expected {rows}")
        a = np.empty((rows, cols), dtype=object)
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise ValueError(f"row {i} has {len(row)} entries, expected {cols}")
            for j, v in enumerate(row):
                a[i, j] = to_rational(v)
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "RatMatrix":
        obj = cls.__new__(cls)
        obj._a = a
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        a = np.empty((rows, cols), dtype=object)
        a.fill(Fraction(0))
        return cls._wrap(a)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m._a[i, i] = Fraction(1)
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[object]], rows: int) -> "RatMatrix":
        m = cls.zeros(rows, len(columns))
        for j, col in enumerate(columns):
            for i, v in enumerate(col):
                m._a[i, j] = to_rational(v)
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], cols: int) -> "RatMatrix":
        return cls([list(r) for r in rows], rows=len(rows), cols=cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self._a.shape

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def array(self) -> np.ndarray:
        return self._a.copy()

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix._wrap(self._a.T.copy())

    def __getitem__(self, idx):
        return self._a[idx]

    def row(self, i: int) -> Vector:
        return list(self._a[i])

    def column(self, j: int) -> Vector:
        return list(self._a[:, j])

    def is_zero(self) -> bool:
        return all(v == 0 for v in self._a.flat)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            if self.cols == 0:
                return RatMatrix.zeros(self.rows, other.cols)
            return RatMatrix._wrap(self._a @ other._a)
        vec = [to_rational(v) for v in other]
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} against {self.cols} columns")
        if self.cols == 0:
            return [Fraction(0)] * self.rows
        return list(self._a @ np.array(vec, dtype=object))

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return RatMatrix._wrap(self._a + other._a)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return RatMatrix._wrap(self._a - other._a)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix._wrap(-self._a)

    def __mul__(self, scalar) -> "RatMatrix":
        c = to_rational(scalar)
        return RatMatrix._wrap(self._a * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._a == other._a))

    __hash__ = None

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix._wrap(np.hstack([self._a, other._a]))

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix._wrap(np.vstack([self._a, other._a]))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix._wrap(self._a[np.ix_(list(rows), list(cols))].reshape(len(rows), len(cols)))

    def to_strings(self) -> List[List[str]]:
        return [[rational_str(v) for v in row] for row in self._a]

    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self._a.flat), default=Fraction(0))

    def __repr__(self) -> str:
        return f"RatMatrix({self.to_strings()})"


# ================================
# ELIMINATION
# ================================
def _rref(a: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form with first-nonzero pivoting."""
    a = a.copy()
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: RatMatrix) -> Tuple[RatMatrix, List[int]]:
    reduced, pivots = _rref(m.array)
    return RatMatrix._wrap(reduced), pivots


def rank(m: RatMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_rref(m.array)[1])


def kernel_basis(m: RatMatrix) -> List[Vector]:
    """Basis of {x : m x = 0}, one vector per free column in column order."""
    if m.rows == 0:
        return [[Fraction(int(i == j)) for i in range(m.cols)] for j in range(m.cols)]
    reduced, pivots = _rref(m.array)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    basis: List[Vector] = []
    for f in free:
        x = [Fraction(0)] * m.cols
        x[f] = Fraction(1)
        for k, pc in enumerate(pivots):
            x[pc] = -reduced[k, f]
        basis.append(x)
    return basis


def solve_columns(m: RatMatrix, rhs: RatMatrix) -> RatMatrix:
    """X with m X = rhs (free variables set to zero); raises NoSolution."""
    if rhs.rows != m.rows:
        raise ValueError(f"right-hand side has {rhs.rows} rows, matrix has {m.rows}")
    if m.rows == 0:
        return RatMatrix.zeros(m.cols, rhs.cols)
    reduced, pivots = _rref(np.hstack([m.array, rhs.array]))
    if any(p >= m.cols for p in pivots):
        raise NoSolution("right-hand side is not in the column space")
    x = RatMatrix.zeros(m.cols, rhs.cols)
    for k, pc in enumerate(pivots):
        for j in range(rhs.cols):
            x._a[pc, j] = reduced[k, m.cols + j]
    return x


def solve(m: RatMatrix, b: Sequence[object]) -> Vector:
    """One solution x of m x = b; raises NoSolution when b is not in the image."""
    b = [to_rational(v) for v in b]
    if len(b) != m.rows:
        raise ValueError(f"right-hand side of length {len(b)} against {m.rows} rows")
    x = solve_columns(m, RatMatrix.from_columns([b], m.rows))
    return x.column(0)


def quotient_basis(space_dim: int, subspace: Sequence[Sequence[object]]) -> List[Vector]:
    """Unit vectors e_j completing span(subspace) to the whole space."""
    vecs = [list(v) for v in subspace if len(v)]
    for v in vecs:
        if len(v) != space_dim:
            raise ValueError(f"subspace vector of length {len(v)} in a space of dimension {space_dim}")
    pivots = set(_rref(RatMatrix(vecs, rows=len(vecs), cols=space_dim).array)[1]) if vecs else set()
    return [
        [Fraction(int(i == j)) for i in range(space_dim)]
        for j in range(space_dim) if j not in pivots
    ]


def determinant(m: RatMatrix) -> Fraction:
    if m.rows != m.cols:
        raise ValueError(f"determinant of a non-square {m.shape} matrix")
    a = m.array
    n = m.rows
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[[c, p]] = a[[p, c]]
            det = -det
        det *= a[c, c]
        for i in range(c + 1, n):
            if a[i, c] != 0:
                a[i] = a[i] - (a[i, c] / a[c, c]) * a[c]
    return det


def inverse(m: RatMatrix) -> RatMatrix:
    if m.rows != m.cols:
        raise ValueError(f"inverse of a non-square {m.shape} matrix")
    try:
        return solve_columns(m, RatMatrix.identity(m.rows))
    except NoSolution as e:
        raise ValueError("matrix is singular") from e


# ================================
# SPARSE ROWS
# ================================
SparseRow = Dict[int, Fraction]


class SparseEchelon:
    """Incremental row echelon basis over Q with the smallest column as pivot."""

    def __init__(self):
        self._pivots: Dict[int, SparseRow] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def reduce(self, row: Mapping[int, object]) -> SparseRow:
        work: SparseRow = {c: to_rational(v) for c, v in row.items() if v != 0}
        done: SparseRow = {}
        while work:
            c = min(work)
            pivot_row = self._pivots.get(c)
            if pivot_row is None:
                done[c] = work.pop(c)
                continue
            factor = work[c]
            for k, v in pivot_row.items():
                nv = work.get(k, 0) - factor * v
                if nv == 0:
                    work.pop(k, None)
                else:
                    work[k] = nv
        return done

    def add(self, row: Mapping[int, object]) -> bool:
        """Insert a row; True iff it was independent of the rows seen so far."""
        reduced = self.reduce(row)
        if not reduced:
            return False
        c = min(reduced)
        lead = reduced[c]
        self._pivots[c] = {k: v / lead for k, v in reduced.items()}
        return True

    def contains(self, row: Mapping[int, object]) -> bool:
        return not self.reduce(row)


def rank_of_rows(rows: Iterable[Mapping[int, object]]) -> int:
    echelon = SparseEchelon()
    for row in rows:
        echelon.add(row)
    return echelon.rank
