"""
wllab Field Algebra - Exact Linear Algebra over Q and GF(p)

Dense matrices over exact fields and the simultaneous-similarity decision:
- Rationals stored as numpy object arrays of Fraction
- Prime fields stored as int64 arrays of representatives in [0, p)
- Gaussian elimination, rank, kernel bases and inverses
- Intertwiner spaces {T : T x_i = y_i T} computed by successive restriction
- Exact similarity: invertible intertwiner search with an exhaustive fallback
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from .config import settings
from .exceptions import ShapeMismatchError, SimilarityUndecidedError, ValidationError

logger = logging.getLogger(__name__)

MAX_PRIME = 2 ** 31


# =============================================================================
# FIELDS
# =============================================================================

class FieldKind(str, Enum):
    RATIONALS = "q"
    PRIME = "gf"


@dataclass(frozen=True)
class FieldSpec:
    """An exact field: the rationals or a prime field GF(p)"""
    kind: FieldKind = FieldKind.RATIONALS
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == FieldKind.PRIME:
            if self.p is None or not sympy.isprime(int(self.p)):
                raise ValidationError("prime field needs a prime modulus", field="p", value=self.p)
            if self.p > MAX_PRIME:
                raise ValidationError("prime must be at most 2^31", field="p", value=self.p)
        elif self.p is not None:
            raise ValidationError("the rationals take no modulus", field="p", value=self.p)

    @classmethod
    def parse(cls, text: Union[str, "FieldSpec"]) -> "FieldSpec":
        """Parse 'q' or 'gf:p'"""
        if isinstance(text, FieldSpec):
            return text
        value = str(text).strip().lower()
        if value in ("q", "rationals"):
            return cls()
        if value.startswith("gf:") or value.startswith("gf("):
            digits = value[3:].rstrip(")")
            try:
                return cls(FieldKind.PRIME, int(digits))
            except ValueError as e:
                raise ValidationError("prime field modulus is not an integer", field="field", value=text) from e
        raise ValidationError("unknown field, expected q or gf:p", field="field", value=text)

    @property
    def is_rationals(self) -> bool:
        return self.kind == FieldKind.RATIONALS

    @property
    def characteristic(self) -> int:
        return 0 if self.is_rationals else int(self.p)

    @property
    def label(self) -> str:
        return "q" if self.is_rationals else f"gf:{self.p}"

    def __str__(self):
        return self.label

    # -------------------------------------------------------------------------
    # element handling
    # -------------------------------------------------------------------------
    def asarray(self, data) -> np.ndarray:
        """Canonical array representation of data over this field"""
        if self.is_rationals:
            raw = np.asarray(data, dtype=object)
            out = np.empty(raw.shape, dtype=object)
            flat_in = raw.reshape(-1)
            flat_out = out.reshape(-1)
            for i, x in enumerate(flat_in):
                flat_out[i] = x if isinstance(x, Fraction) else Fraction(x)
            return out
        raw = np.asarray(data)
        if raw.dtype == object:
            return np.array([int(x) % self.p for x in raw.reshape(-1)], dtype=np.int64).reshape(raw.shape)
        return np.mod(raw.astype(np.int64), self.p)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.is_rationals:
            return arr
        return np.mod(arr, self.p)

    def inv(self, x):
        if self.is_rationals:
            if x == 0:
                raise ZeroDivisionError("inverse of zero")
            return Fraction(1) / x
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def random_array(self, rng: np.random.Generator, shape, coeff_range: Optional[int] = None) -> np.ndarray:
        if self.is_rationals:
            bound = coeff_range or settings.SIM_COEFF_RANGE
            return self.asarray(rng.integers(-bound, bound + 1, size=shape))
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact (batched) matrix product"""
        if self.is_rationals:
            return np.matmul(a, b)
        inner = a.shape[-1]
        if (self.p - 1) ** 2 * max(inner, 1) < 2 ** 63:
            return np.mod(np.matmul(a, b), self.p)
        wide = np.matmul(a.astype(object), b.astype(object))
        return self.asarray(wide)


Q = FieldSpec()


def GF(p: int) -> FieldSpec:
    return FieldSpec(FieldKind.PRIME, p)


# =============================================================================
# ELIMINATION
# =============================================================================

def row_reduce(field: FieldSpec, a: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form over the field

    Args:
        field: Field of the entries
        a: 2-D array in canonical representation

    Returns:
        (rref array, pivot columns)
    """
    a = a.copy()
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.nonzero(a[r:, c] != 0)[0]
        if nonzero.size == 0:
            continue
        pivot = r + int(nonzero[0])
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        a[r] = field.reduce(a[r] * field.inv(a[r, c]))
        others = np.nonzero(a[:, c] != 0)[0]
        others = others[others != r]
        if others.size:
            a[others] = field.reduce(a[others] - np.outer(a[others, c], a[r]))
        pivots.append(c)
        r += 1
    return a, pivots


def _row_gcd(row: np.ndarray) -> int:
    return reduce(math.gcd, (abs(int(x)) for x in row), 0)


def integer_rows(a: np.ndarray) -> np.ndarray:
    """Scale each row of a rational array to integers (object dtype)"""
    out = np.empty(a.shape, dtype=object)
    for i, row in enumerate(a):
        scale = reduce(math.lcm, (Fraction(x).denominator for x in row), 1)
        out[i] = [int(Fraction(x) * scale) for x in row]
    return out


def integer_row_reduce(a: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """
    Fraction-free reduced echelon form of an integer matrix

    Pivot rows keep an integer pivot and every other row is zero in the
    pivot columns; rows are divided by their content after each step.
    """
    a = a.astype(object, copy=True)
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        column = a[r:, c]
        nonzero = [i for i, x in enumerate(column.tolist()) if x != 0]
        if not nonzero:
            continue
        pivot = r + nonzero[0]
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        content = _row_gcd(a[r])
        if a[r, c] < 0:
            content = -content
        a[r] = a[r] // content
        pv = a[r, c]
        others = [j for j in range(rows) if j != r and a[j, c] != 0]
        if others:
            factors = a[others, c].copy()
            a[others] = a[others] * pv - np.outer(factors, a[r])
            for j in others:
                g = _row_gcd(a[j])
                if g > 1:
                    a[j] = a[j] // g
        pivots.append(c)
        r += 1
    return a, pivots


def integer_kernel(a: np.ndarray) -> np.ndarray:
    """Integer basis of {x : a x = 0} for an integer matrix, as rows"""
    rows, cols = a.shape
    rref, pivots = integer_row_reduce(a)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=object)
    for j, f in enumerate(free):
        scale = reduce(math.lcm, (abs(int(rref[row, pc])) for row, pc in enumerate(pivots)
                                  if rref[row, f] != 0), 1)
        vector = [0] * cols
        vector[f] = scale
        for row, pc in enumerate(pivots):
            if rref[row, f] != 0:
                vector[pc] = -int(rref[row, f]) * (scale // int(rref[row, pc]))
        g = reduce(math.gcd, (abs(x) for x in vector), 0)
        basis[j] = [x // g for x in vector]
    return basis


def kernel_vectors(field: FieldSpec, a: np.ndarray) -> np.ndarray:
    """Basis of {x : a x = 0} as the rows of a 2-D array"""
    rows, cols = a.shape
    if field.is_rationals:
        return field.asarray(integer_kernel(integer_rows(a)) if rows else np.eye(cols, dtype=np.int64))
    rref, pivots = row_reduce(field, a)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for row, pc in enumerate(pivots):
            basis[j, pc] = (-int(rref[row, f])) % field.p
    return basis


def matrix_rank(field: FieldSpec, a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if field.is_rationals:
        return len(integer_row_reduce(integer_rows(a))[1])
    return len(row_reduce(field, a)[1])


# =============================================================================
# MATRICES
# =============================================================================

class FieldMatrix:
    """Dense matrix over an exact field with canonical entries"""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data, canonical: bool = False):
        self.field = field
        array = data if canonical else field.asarray(data)
        if array.ndim != 2:
            raise ShapeMismatchError("field matrices are 2-D", left=array.shape)
        self.data = array

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "FieldMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: Optional[int] = None) -> "FieldMatrix":
        return cls(field, np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def ones(cls, field: FieldSpec, rows: int, cols: Optional[int] = None) -> "FieldMatrix":
        return cls(field, np.ones((rows, rows if cols is None else cols), dtype=np.int64))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def _check(self, other: "FieldMatrix", op: str) -> None:
        if not isinstance(other, FieldMatrix):
            raise ValidationError(f"{op} needs a FieldMatrix", field="other")
        if other.field != self.field:
            raise ShapeMismatchError(f"{op} across fields", left=self.field, right=other.field)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other, "product")
        if self.cols != other.rows:
            raise ShapeMismatchError("product dimension mismatch", left=self.shape, right=other.shape)
        return FieldMatrix(self.field, self.field.matmul(self.data, other.data), canonical=True)

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other, "sum")
        if self.shape != other.shape:
            raise ShapeMismatchError("sum dimension mismatch", left=self.shape, right=other.shape)
        return FieldMatrix(self.field, self.field.reduce(self.data + other.data), canonical=True)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other, "difference")
        if self.shape != other.shape:
            raise ShapeMismatchError("difference dimension mismatch", left=self.shape, right=other.shape)
        return FieldMatrix(self.field, self.field.reduce(self.data - other.data), canonical=True)

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.field.reduce(-self.data), canonical=True)

    def scale(self, c) -> "FieldMatrix":
        c = self.field.asarray([c])[0]
        return FieldMatrix(self.field, self.field.reduce(self.data * c), canonical=True)

    def hadamard(self, other: "FieldMatrix") -> "FieldMatrix":
        """Schur-Hadamard (entrywise) product"""
        self._check(other, "hadamard product")
        if self.shape != other.shape:
            raise ShapeMismatchError("hadamard dimension mismatch", left=self.shape, right=other.shape)
        return FieldMatrix(self.field, self.field.reduce(self.data * other.data), canonical=True)

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.data.T.copy(), canonical=True)

    def trace(self):
        total = self.field.asarray([0])[0]
        for i in range(min(self.shape)):
            total = total + self.data[i, i]
        return total if self.field.is_rationals else int(total) % self.field.p

    def rank(self) -> int:
        return matrix_rank(self.field, self.data)

    def kernel_basis(self) -> List["FieldMatrix"]:
        """Column vectors spanning the null space"""
        vectors = kernel_vectors(self.field, self.data)
        return [FieldMatrix(self.field, row.reshape(-1, 1), canonical=True) for row in vectors]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.rows

    def inverse(self) -> "FieldMatrix":
        if not self.is_square():
            raise ShapeMismatchError("only square matrices invert", left=self.shape)
        n = self.rows
        augmented = np.concatenate([self.data, self.field.asarray(np.eye(n, dtype=np.int64))], axis=1)
        rref, pivots = row_reduce(self.field, augmented)
        if pivots[:n] != list(range(n)):
            raise ValidationError("matrix is singular", field="matrix")
        return FieldMatrix(self.field, rref[:, n:].copy(), canonical=True)

    def is_zero(self) -> bool:
        return not bool(np.any(self.data != 0))

    def to_list(self) -> List[List[object]]:
        if self.field.is_rationals:
            return [[str(x) if x.denominator != 1 else int(x) for x in row] for row in self.data]
        return self.data.tolist()

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (
            self.field == other.field and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, tuple(str(x) for x in self.data.reshape(-1))))

    def __repr__(self):
        return f"FieldMatrix({self.field.label}, {self.to_list()})"


def multiply(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    return a @ b


def add(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    return a + b


def hadamard(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    return a.hadamard(b)


def transpose(a: FieldMatrix) -> FieldMatrix:
    return a.T


def rank(a: FieldMatrix) -> int:
    return a.rank()


def kernel_basis(a: FieldMatrix) -> List[FieldMatrix]:
    return a.kernel_basis()


def combine(coefficients: Sequence, basis: Sequence[FieldMatrix]) -> FieldMatrix:
    """Linear combination sum_j c_j B_j"""
    field = basis[0].field
    coefficients = field.asarray(list(coefficients))
    stacked = np.stack([b.data for b in basis])
    total = np.tensordot(coefficients, stacked, axes=1)
    return FieldMatrix(field, field.reduce(total), canonical=True)


@dataclass(frozen=True)
class MatrixTuple:
    """Ordered square matrices of one dimension over one field"""
    matrices: Tuple[FieldMatrix, ...]

    def __post_init__(self):
        matrices = tuple(self.matrices)
        object.__setattr__(self, "matrices", matrices)
        if not matrices:
            return
        field = matrices[0].field
        n = matrices[0].rows
        for m in matrices:
            if m.field != field:
                raise ShapeMismatchError("matrix tuple mixes fields", left=field, right=m.field)
            if m.shape != (n, n):
                raise ShapeMismatchError("matrix tuple needs square matrices of one size", left=(n, n), right=m.shape)

    @classmethod
    def coerce(cls, xs: Union["MatrixTuple", Iterable[FieldMatrix]]) -> "MatrixTuple":
        return xs if isinstance(xs, MatrixTuple) else cls(tuple(xs))

    @property
    def field(self) -> FieldSpec:
        return self.matrices[0].field

    @property
    def dim(self) -> int:
        return self.matrices[0].rows

    def conjugate(self, s: FieldMatrix) -> "MatrixTuple":
        """S x S^-1 for each member"""
        s_inv = s.inverse()
        return MatrixTuple(tuple(s @ m @ s_inv for m in self.matrices))

    def __len__(self):
        return len(self.matrices)

    def __iter__(self) -> Iterator[FieldMatrix]:
        return iter(self.matrices)

    def __getitem__(self, i):
        return self.matrices[i]


def _check_pair(xs: MatrixTuple, ys: MatrixTuple) -> None:
    if len(xs) != len(ys):
        raise ShapeMismatchError("matrix tuples differ in length", left=len(xs), right=len(ys))
    if not len(xs):
        raise ValidationError("matrix tuples must be non-empty", field="xs")
    if xs.field != ys.field or xs.dim != ys.dim:
        raise ShapeMismatchError(
            "matrix tuples differ in field or dimension",
            left=(xs.field.label, xs.dim), right=(ys.field.label, ys.dim),
        )


# =============================================================================
# SIMULTANEOUS SIMILARITY
# =============================================================================

def word_invariants(xs: Union[MatrixTuple, Sequence[FieldMatrix]], max_length: int = 3) -> Tuple:
    """Rank and trace of every word of length <= max_length, in word order"""
    xs = MatrixTuple.coerce(xs)
    out = []
    for length in range(1, max_length + 1):
        for word in itertools.product(range(len(xs)), repeat=length):
            product = xs[word[0]]
            for letter in word[1:]:
                product = product @ xs[letter]
            out.append((word, product.rank(), product.trace()))
    return tuple(out)


def intertwiner_space(xs: Union[MatrixTuple, Sequence[FieldMatrix]],
                      ys: Union[MatrixTuple, Sequence[FieldMatrix]]) -> List[FieldMatrix]:
    """
    Basis of {T : T x_i = y_i T for all i}

    The solution space starts as all n x n matrices and is cut down by one
    linear condition block per pair (x_i, y_i).
    """
    xs = MatrixTuple.coerce(xs)
    ys = MatrixTuple.coerce(ys)
    _check_pair(xs, ys)
    field, n = xs.field, xs.dim
    if field.is_rationals:
        basis = _rational_intertwiners(xs, ys)
        if basis is None:
            return []
        rref, pivots = integer_row_reduce(basis)
        rows = field.asarray(rref[: len(pivots)])
    else:
        basis = np.eye(n * n, dtype=np.int64)
        for x, y in zip(xs, ys):
            ts = basis.reshape(-1, n, n)
            images = field.reduce(field.matmul(ts, x.data) - field.matmul(y.data, ts))
            coefficients = kernel_vectors(field, images.reshape(-1, n * n).T)
            if coefficients.shape[0] == 0:
                return []
            basis = field.matmul(coefficients, basis)
        rref, pivots = row_reduce(field, basis)
        rows = rref[: len(pivots)]
    return [FieldMatrix(field, row.reshape(n, n).copy(), canonical=True) for row in rows]


def _rational_intertwiners(xs: MatrixTuple, ys: MatrixTuple) -> Optional[np.ndarray]:
    """Integer rows spanning the intertwiner space over Q, or None when it is zero"""
    n = xs.dim
    basis = np.eye(n * n, dtype=np.int64).astype(object)
    for x, y in zip(xs, ys):
        # scaling a pair by a common denominator leaves T x = y T unchanged
        pair = integer_rows(np.concatenate([x.data, y.data], axis=1).reshape(1, -1)).reshape(n, 2 * n)
        xi, yi = pair[:, :n], pair[:, n:]
        ts = basis.reshape(-1, n, n)
        images = np.matmul(ts, xi) - np.matmul(yi, ts)
        coefficients = integer_kernel(images.reshape(-1, n * n).T)
        if coefficients.shape[0] == 0:
            return None
        basis = np.matmul(coefficients, basis)
    return basis


def _grid_search(basis: List[FieldMatrix], n: int) -> Optional[FieldMatrix]:
    """Exhaust {0..n}^d; exact whenever the field has more than n elements"""
    for point in itertools.product(range(n + 1), repeat=len(basis)):
        if not any(point):
            continue
        candidate = combine(point, basis)
        if candidate.is_invertible():
            return candidate
    return None


def _projective_search(basis: List[FieldMatrix], p: int) -> Optional[FieldMatrix]:
    """Exhaust the projective space of the intertwiner space over GF(p)"""
    d = len(basis)
    for lead in range(d):
        for tail in itertools.product(range(p), repeat=d - lead - 1):
            point = [0] * lead + [1] + list(tail)
            candidate = combine(point, basis)
            if candidate.is_invertible():
                return candidate
    return None


def _symbolic_search(basis: List[FieldMatrix], n: int) -> Optional[FieldMatrix]:
    """Decide det(sum c_j T_j) != 0 symbolically over Q and pick a nonvanishing point"""
    symbols = sympy.symbols(f"c0:{len(basis)}")
    matrix = sympy.zeros(n, n)
    for c, t in zip(symbols, basis):
        matrix += c * sympy.Matrix(t.data.tolist())
    determinant = sympy.expand(matrix.det(method="berkowitz"))
    if determinant == 0:
        return None
    point = []
    remaining = determinant
    for c in symbols:
        for value in range(n + 1):
            substituted = sympy.expand(remaining.subs(c, value))
            if substituted != 0:
                point.append(value)
                remaining = substituted
                break
    return combine(point, basis)


def simultaneously_similar(xs: Union[MatrixTuple, Sequence[FieldMatrix]],
                           ys: Union[MatrixTuple, Sequence[FieldMatrix]],
                           seed: Optional[int] = None,
                           cap: Optional[int] = None,
                           tries: Optional[int] = None,
                           symbolic_cap: Optional[int] = None,
                           centralizer_dim: Optional[int] = None) -> Optional[FieldMatrix]:
    """
    Decide whether one invertible S gives S x_i S^-1 = y_i for all i

    Args:
        xs, ys: Matrix tuples of equal length, dimension and field
        seed: Seed for random probing (defaults to settings.SEED)
        cap: Largest exhaustive search size (defaults to settings.CAP_SIM)
        tries: Random probes before the exact fallback
        symbolic_cap: Largest intertwiner dimension for symbolic determinants over Q
        centralizer_dim: Known common dimension of the centralizers of xs and ys

    Returns:
        An invertible witness S, or None when the tuples are not similar

    Raises:
        SimilarityUndecidedError: the exact fallback would exceed its caps
    """
    xs = MatrixTuple.coerce(xs)
    ys = MatrixTuple.coerce(ys)
    _check_pair(xs, ys)
    field, n = xs.field, xs.dim

    if all(x == y for x, y in zip(xs, ys)):
        return FieldMatrix.identity(field, n)
    for x, y in zip(xs, ys):
        if x.rank() != y.rank() or x.trace() != y.trace():
            return None

    basis = intertwiner_space(xs, ys)
    if not basis:
        return None
    d = len(basis)
    if centralizer_dim is not None:
        if centralizer_dim != d:
            return None
    elif len(intertwiner_space(xs, xs)) != d or len(intertwiner_space(ys, ys)) != d:
        return None

    for candidate in basis:
        if candidate.is_invertible():
            return candidate

    rng = np.random.default_rng(settings.SEED if seed is None else seed)
    for _ in range(settings.SIM_RANDOM_TRIES if tries is None else tries):
        candidate = combine(field.random_array(rng, d), basis)
        if candidate.is_invertible():
            return candidate

    limit = settings.cap("sim", cap)
    logger.debug(f"similarity probing inconclusive over {field.label}, intertwiner dimension {d}")
    if (field.is_rationals or field.p > n) and (n + 1) ** d <= limit:
        return _grid_search(basis, n)
    if not field.is_rationals and field.p ** d <= limit:
        return _projective_search(basis, field.p)
    if field.is_rationals and d <= settings.cap("symbolic_dim", symbolic_cap):
        return _symbolic_search(basis, n)
    raise SimilarityUndecidedError(
        "similarity undecided at this scale", field=field.label, dimension=d, cap=limit,
    )


__all__ = [
    # Fields
    'FieldKind', 'FieldSpec', 'Q', 'GF', 'MAX_PRIME',
    # Elimination
    'row_reduce', 'kernel_vectors',
    # Matrices
    'FieldMatrix', 'MatrixTuple', 'multiply', 'add', 'hadamard', 'transpose',
    'rank', 'kernel_basis', 'combine',
    # Similarity
    'word_invariants', 'intertwiner_space', 'simultaneously_similar',
]
