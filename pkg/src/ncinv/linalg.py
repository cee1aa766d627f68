"""Exact rational linear algebra.

Everything here works over the rationals with no rounding. Scalars are
``gmpy2.mpq`` values; matrices are small immutable row-major containers; a
:class:`Subspace` stores a reduced row-echelon basis.

Two echelon engines live side by side:

* :func:`rref` and friends operate on dense :class:`Matrix` values and use the
  usual leftmost-pivot convention.
* :class:`SparseEchelon` keeps an incrementally maintained reduced echelon
  basis of sparse ``dict`` vectors keyed by arbitrary sortable column labels.
  The algebra modules use it for the large degreewise computations.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from gmpy2 import mpq

from .errors import DimensionMismatch, NotInSubspace, SingularMatrixError

Scalar = type(mpq(0))
ZERO = mpq(0)
ONE = mpq(1)


def as_scalar(x: Any) -> Scalar:
    """Coerce ints, ``"p/q"`` strings, Fractions and mpq values to a scalar.

    Floats are refused: nothing in this package is allowed to round.
    """
    if isinstance(x, Scalar):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, float):
        raise TypeError(f"floating point value {x!r} is not an exact scalar")
    if isinstance(x, str):
        s = x.strip()
        if not s or any(c in s for c in ".eE"):
            raise ValueError(f"not an exact rational: {x!r}")
        return mpq(s)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot interpret {x!r} as a rational scalar")


def format_scalar(x: Any) -> str:
    """Serialize as ``"p/q"``, dropping ``q`` when it is 1."""
    return str(as_scalar(x))


def _height(x: Scalar) -> int:
    return int(x.numerator).bit_length() + int(x.denominator).bit_length()


# ---------------------------------------------------------------------------
# dense matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix of exact rationals."""

    nrows: int
    ncols: int
    entries: tuple  # row-major, length nrows * ncols

    def __post_init__(self):
        if len(self.entries) != self.nrows * self.ncols:
            raise DimensionMismatch(
                f"{self.nrows}x{self.ncols} matrix needs {self.nrows * self.ncols} entries, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]], ncols: int | None = None) -> Matrix:
        rows = [[as_scalar(x) for x in row] for row in rows]
        if not rows:
            return cls(0, ncols or 0, ())
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), width, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls(nrows, ncols, (ZERO,) * (nrows * ncols))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[Any]], nrows: int) -> Matrix:
        return cls.from_rows(
            [[cols[j][i] for j in range(len(cols))] for i in range(nrows)], ncols=len(cols)
        )

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.entries[i * self.ncols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.ncols : (i + 1) * self.ncols]

    def rows(self) -> list[tuple]:
        return [self.row(i) for i in range(self.nrows)]

    def column(self, j: int) -> tuple:
        return self.entries[j :: self.ncols] if self.ncols else ()

    def transpose(self) -> Matrix:
        return Matrix(
            self.ncols,
            self.nrows,
            tuple(self.entries[i * self.ncols + j] for j in range(self.ncols) for i in range(self.nrows)),
        )

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.column(j) for j in range(other.ncols)]
        out = []
        for i in range(self.nrows):
            r = self.row(i)
            for c in cols:
                s = ZERO
                for a, b in zip(r, c):
                    if a and b:
                        s += a * b
                out.append(s)
        return Matrix(self.nrows, other.ncols, tuple(out))

    def apply(self, v: Sequence[Any]) -> tuple:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), v) if a and b), ZERO) for i in range(self.nrows)
        )

    def scale(self, c: Any) -> Matrix:
        c = as_scalar(c)
        return Matrix(self.nrows, self.ncols, tuple(c * x for x in self.entries))

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        return Matrix(self.nrows, self.ncols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: Matrix) -> Matrix:
        return self + other.scale(-1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def trace(self) -> Scalar:
        return sum((self[i, i] for i in range(min(self.shape))), ZERO)

    def inverse(self) -> Matrix:
        if not self.is_square():
            raise DimensionMismatch("only square matrices are invertible")
        n = self.nrows
        aug = Matrix.from_rows(
            [list(self.row(i)) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        ) if n else Matrix(0, 0, ())
        red, pivots = rref(aug)
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise SingularMatrixError("matrix is singular")
        return Matrix.from_rows([red.row(i)[n:] for i in range(n)]) if n else self

    def is_invertible(self) -> bool:
        return self.is_square() and rank(self) == self.nrows

    def to_json(self) -> list[list[str]]:
        return [[format_scalar(x) for x in self.row(i)] for i in range(self.nrows)]

    def __repr__(self) -> str:
        return f"Matrix({[[str(x) for x in r] for r in self.rows()]})"


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form and pivot columns; the row space is preserved.

    Among candidate pivot rows of a column the one with the smallest bit
    height is used. The reduced form itself does not depend on that choice.
    """
    rows = [list(m.row(i)) for i in range(m.nrows)]
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        if r == len(rows):
            break
        cand = [i for i in range(r, len(rows)) if rows[i][c]]
        if not cand:
            continue
        best = min(cand, key=lambda i: (_height(rows[i][c]), i))
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][c]
        if piv != ONE:
            inv = ONE / piv
            rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return Matrix(m.nrows, m.ncols, tuple(x for row in rows for x in row)), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``Q^ambient_dim`` given by its reduced row-echelon basis."""

    ambient_dim: int
    basis: tuple  # tuple of tuples
    pivot_cols: tuple

    @classmethod
    def span(cls, vectors: Iterable[Sequence[Any]], ambient_dim: int) -> Subspace:
        vecs = [tuple(as_scalar(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        if not vecs:
            return cls.zero(ambient_dim)
        red, piv = rref(Matrix(len(vecs), ambient_dim, tuple(x for v in vecs for x in v)))
        return cls(ambient_dim, tuple(red.row(i) for i in range(len(piv))), tuple(piv))

    @classmethod
    def zero(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, (), ())

    @classmethod
    def full(cls, ambient_dim: int) -> Subspace:
        return cls.span(Matrix.identity(ambient_dim).rows(), ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v: Sequence[Any]) -> bool:
        return span_contains(self, v) is not None

    def __le__(self, other: Subspace) -> bool:
        return all(v in other for v in self.basis)


def span_contains(s: Subspace, v: Sequence[Any]) -> tuple | None:
    """Coordinates of ``v`` in the echelon basis of ``s``, or ``None``."""
    if len(v) != s.ambient_dim:
        raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {s.ambient_dim}")
    v = [as_scalar(x) for x in v]
    # reduced echelon: the coordinate on basis row k is simply v[pivot_k]
    coords = tuple(v[c] for c in s.pivot_cols)
    for k, c in enumerate(coords):
        if c:
            row = s.basis[k]
            v = [a - c * b if b else a for a, b in zip(v, row)]
    if any(v):
        return None
    return coords


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    return Subspace.span(list(a.basis) + list(b.basis), a.ambient_dim)


def kernel(m: Matrix) -> Subspace:
    """Right null space ``{x : m x = 0}``."""
    red, pivots = rref(m)
    free = [j for j in range(m.ncols) if j not in set(pivots)]
    vecs = []
    for f in free:
        x = [ZERO] * m.ncols
        x[f] = ONE
        for i, pc in enumerate(pivots):
            x[pc] = -red[i, f]
        vecs.append(x)
    return Subspace.span(vecs, m.ncols)


def intersection(a: Subspace, b: Subspace) -> Subspace:
    """Intersection computed from the kernel of the stacked system ``[A; -B]^T``."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    if not a.dim or not b.dim:
        return Subspace.zero(a.ambient_dim)
    cols = list(a.basis) + [tuple(-x for x in v) for v in b.basis]
    ker = kernel(Matrix.from_columns(cols, a.ambient_dim))
    vecs = []
    for x in ker.basis:
        w = [ZERO] * a.ambient_dim
        for c, v in zip(x[: a.dim], a.basis):
            if c:
                w = [p + c * q for p, q in zip(w, v)]
        vecs.append(w)
    return Subspace.span(vecs, a.ambient_dim)


def quotient_complement(big: Subspace, small: Subspace) -> Subspace:
    """A complement ``C`` of ``small`` inside ``big``.

    Deterministic: the echelon basis vectors of ``big`` are scanned in order
    and kept whenever they are independent of ``small`` plus those already
    kept; the result is the echelon form of the kept vectors.
    """
    if big.ambient_dim != small.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    if not small <= big:
        raise NotInSubspace("small subspace is not contained in big subspace")
    ech = SparseEchelon()
    for v in small.basis:
        ech.add(dense_to_sparse(v))
    kept = []
    for v in big.basis:
        if ech.add(dense_to_sparse(v)):
            kept.append(v)
    return Subspace.span(kept, big.ambient_dim)


# ---------------------------------------------------------------------------
# sparse vectors and the incremental echelon engine
# ---------------------------------------------------------------------------

SparseVector = dict  # column label -> nonzero scalar


def dense_to_sparse(v: Sequence[Any]) -> SparseVector:
    return {i: as_scalar(x) for i, x in enumerate(v) if x}


def sparse_to_dense(v: Mapping[int, Any], length: int) -> tuple:
    out = [ZERO] * length
    for i, x in v.items():
        out[i] = x
    return tuple(out)


def axpy(y: dict, a: Scalar, x: Mapping) -> None:
    """In place ``y += a * x`` for sparse vectors, dropping cancelled entries."""
    for k, v in x.items():
        s = y.get(k, ZERO) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class SparseEchelon:
    """Incrementally maintained reduced row-echelon basis of sparse vectors.

    Columns may be any mutually comparable hashable labels. The pivot of a
    row is its smallest column label, or its largest when ``reverse`` is set.
    Rows are kept fully reduced, so the stored basis depends only on the
    spanned subspace and never on insertion order.
    """

    def __init__(self, vectors: Iterable[Mapping] = (), reverse: bool = False):
        self.reverse = reverse
        self.rows: dict[Hashable, dict] = {}  # pivot column -> row with 1 at pivot
        self._where: dict[Hashable, set] = {}  # column -> pivots of rows using it off-pivot
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Mapping) -> dict:
        """Remainder of ``v`` modulo the span; zero on every pivot column."""
        out = {k: as_scalar(x) for k, x in v.items() if x}
        for c in [c for c in out if c in self.rows]:
            coef = out.get(c)
            if coef:
                axpy(out, -coef, self.rows[c])
        return out

    def coordinates(self, v: Mapping) -> dict | None:
        """Coordinates of ``v`` on the stored rows (keyed by pivot) or ``None``."""
        coords = {c: as_scalar(v[c]) for c in self.rows if v.get(c)}
        if self.reduce(v):
            return None
        return coords

    def __contains__(self, v: Mapping) -> bool:
        return not self.reduce(v)

    def add(self, v: Mapping) -> bool:
        """Insert ``v``; return ``True`` iff the span grew."""
        r = self.reduce(v)
        if not r:
            return False
        piv = max(r) if self.reverse else min(r)
        inv = ONE / r[piv]
        if inv != ONE:
            r = {k: x * inv for k, x in r.items()}
        for p in list(self._where.get(piv, ())):
            row = self.rows[p]
            self._unindex(p, row)
            axpy(row, -row[piv], r)
            self._index(p, row)
        self._where.pop(piv, None)
        self.rows[piv] = r
        self._index(piv, r)
        return True

    def extend(self, vectors: Iterable[Mapping]) -> int:
        return sum(1 for v in vectors if self.add(v))

    def _index(self, p, row):
        for k in row:
            if k != p:
                self._where.setdefault(k, set()).add(p)

    def _unindex(self, p, row):
        for k in row:
            if k != p:
                s = self._where.get(k)
                if s is not None:
                    s.discard(p)
                    if not s:
                        del self._where[k]

    def pivots(self) -> list:
        return sorted(self.rows, reverse=self.reverse)

    def basis(self) -> list[dict]:
        """Rows ordered by pivot (ascending, or descending when ``reverse``)."""
        return [dict(self.rows[p]) for p in self.pivots()]

    def non_pivots(self, columns: Iterable) -> list:
        return [c for c in columns if c not in self.rows]

    def copy(self) -> SparseEchelon:
        other = SparseEchelon(reverse=self.reverse)
        other.rows = {p: dict(r) for p, r in self.rows.items()}
        other._where = {k: set(s) for k, s in self._where.items()}
        return other

    def to_subspace(self, columns: Sequence) -> Subspace:
        """Dense :class:`Subspace` over the given ordered list of column labels."""
        pos = {c: i for i, c in enumerate(columns)}
        vecs = [sparse_to_dense({pos[k]: x for k, x in row.items()}, len(columns)) for row in self.basis()]
        return Subspace.span(vecs, len(columns))
