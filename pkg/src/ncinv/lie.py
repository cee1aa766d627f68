"""Lyndon bases, free nilpotent Lie algebras and graded Lie algebras.

:class:`GradedLieAlgebra` is a finite-dimensional Lie algebra with a basis
graded by positive integers and a table of structure constants. The free
nilpotent Lie algebra ``L_p(V)`` (:class:`FreeNilpotentLie`) is the main
instance: its basis consists of the Lyndon words of length at most ``p`` over
``n = dim V`` letters, ordered by (length, lex), and each basis word is realised
inside ``T(V)`` by its standard right bracketing.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

from sympy import divisors, mobius

from .errors import ContextMismatch, NotALieElement, SingularMatrixError, ValidationError
from .linalg import ONE, ZERO, Matrix, Scalar, SparseEchelon, as_scalar, axpy, format_scalar
from .tensor import (
    TensorAlgebra,
    NCPolynomial,
    commutator_terms,
    linear_substitution_images,
    substitute_letters,
)

# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------


def is_lyndon(w: Sequence[int]) -> bool:
    w = tuple(w)
    return bool(w) and all(w < w[i:] + w[:i] for i in range(1, len(w)))


def _lyndon_upto(n: int, d: int):
    # Duval's generation: all Lyndon words of length <= d in lex order
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < d:
            w.append(w[-m])
        while w and w[-1] == n - 1:
            w.pop()


@lru_cache(maxsize=None)
def lyndon_words(n: int, d: int) -> tuple:
    """All Lyndon words of length ``d`` over ``n`` letters, lex-sorted."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    return tuple(w for w in _lyndon_upto(n, d) if len(w) == d)


def witt(n: int, d: int) -> int:
    """Dimension of the degree ``d`` part of the free Lie algebra on ``n`` generators."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    total = sum(int(mobius(e)) * n ** (d // e) for e in divisors(d))
    assert total % d == 0
    return total // d


def standard_factorization(w: Sequence[int]) -> tuple[tuple, tuple]:
    """Split a Lyndon word ``w = uv`` with ``v`` its longest proper Lyndon suffix."""
    w = tuple(w)
    if len(w) < 2:
        raise ValueError("single letters have no standard factorization")
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise AssertionError("unreachable: the last letter is always Lyndon")


@lru_cache(maxsize=None)
def _bracketing_terms(w: tuple) -> dict:
    if len(w) == 1:
        return {w: ONE}
    u, v = standard_factorization(w)
    return commutator_terms(_bracketing_terms(u), _bracketing_terms(v))


def bracketing(w: Sequence[int], n: int | None = None) -> NCPolynomial:
    """Expansion of the standard bracketing of a Lyndon word inside ``T(V)``."""
    w = tuple(w)
    return NCPolynomial(TensorAlgebra(n if n is not None else max(w) + 1), dict(_bracketing_terms(w)))


# ---------------------------------------------------------------------------
# graded Lie algebras
# ---------------------------------------------------------------------------


class GradedLieAlgebra:
    """Finite-dimensional Lie algebra with a positively graded ordered basis.

    ``table[(i, j)]`` for ``i < j`` holds ``[b_i, b_j]`` as a sparse map
    ``k -> c``; missing pairs bracket to zero. ``[b_j, b_i]`` is obtained by
    antisymmetry.
    """

    def __init__(self, degrees: Sequence[int], table: Mapping, labels: Sequence[str] | None = None,
                 check: bool = True):
        self.degrees = tuple(int(d) for d in degrees)
        if any(d < 1 for d in self.degrees):
            raise ValidationError("basis degrees must be positive")
        if list(self.degrees) != sorted(self.degrees):
            raise ValidationError("basis must be ordered by degree")
        self.dim = len(self.degrees)
        self.labels = tuple(labels) if labels is not None else tuple(f"b{i}" for i in range(self.dim))
        self.table: dict = {}
        for (i, j), img in table.items():
            img = {int(k): as_scalar(c) for k, c in img.items() if c}
            if i == j:
                if img:
                    raise ValidationError(f"[b{i}, b{i}] must vanish")
                continue
            if i > j:
                i, j, img = j, i, {k: -c for k, c in img.items()}
            if img:
                self.table[(i, j)] = img
        if check:
            self.check_structure()

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def indices_of_degree(self, d: int) -> list[int]:
        return [i for i, e in enumerate(self.degrees) if e == d]

    def bracket_basis(self, i: int, j: int) -> dict:
        if i < j:
            return self.table.get((i, j), {})
        if i > j:
            return {k: -c for k, c in self.table.get((j, i), {}).items()}
        return {}

    def bracket_vectors(self, a: Mapping, b: Mapping) -> dict:
        out: dict = {}
        for i, x in a.items():
            for j, y in b.items():
                img = self.bracket_basis(i, j)
                if img:
                    axpy(out, x * y, img)
        return out

    def check_structure(self) -> None:
        for (i, j), img in self.table.items():
            for k in img:
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise ValidationError(f"[b{i}, b{j}] is not homogeneous of degree "
                                          f"{self.degrees[i] + self.degrees[j]}")
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    ei, ej, ek = ({i: ONE}, {j: ONE}, {k: ONE})
                    s = {}
                    axpy(s, ONE, self.bracket_vectors(self.bracket_vectors(ei, ej), ek))
                    axpy(s, ONE, self.bracket_vectors(self.bracket_vectors(ej, ek), ei))
                    axpy(s, ONE, self.bracket_vectors(self.bracket_vectors(ek, ei), ej))
                    if s:
                        raise ValidationError(f"Jacobi identity fails on (b{i}, b{j}, b{k})")

    def element(self, coeffs: Mapping) -> LieElement:
        return LieElement(self, coeffs)

    def basis_element(self, i: int) -> LieElement:
        return LieElement(self, {i: ONE})

    def preserves_grading(self, g: Matrix) -> bool:
        return all(not g[r, c] or self.degrees[r] == self.degrees[c]
                   for r in range(self.dim) for c in range(self.dim))

    def is_automorphism(self, g: Matrix) -> bool:
        """``[g x, g y] = g [x, y]`` on all basis pairs."""
        if g.shape != (self.dim, self.dim) or not g.is_invertible():
            return False
        cols = [{r: g[r, c] for r in range(self.dim) if g[r, c]} for c in range(self.dim)]
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                lhs = self.bracket_vectors(cols[i], cols[j])
                rhs: dict = {}
                for k, c in self.bracket_basis(i, j).items():
                    axpy(rhs, c, cols[k])
                if lhs != rhs:
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "labels": list(self.labels),
            "brackets": [
                {"pair": [i, j], "image": {str(k): format_scalar(c) for k, c in sorted(img.items())}}
                for (i, j), img in sorted(self.table.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> GradedLieAlgebra:
        table = {tuple(e["pair"]): {int(k): v for k, v in e["image"].items()} for e in data.get("brackets", [])}
        return cls(data["degrees"], table, data.get("labels"))


@dataclass(frozen=True, eq=False)
class LieElement:
    lie: GradedLieAlgebra
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): as_scalar(v) for k, v in self.coeffs.items() if v}
        for k in clean:
            if not 0 <= k < self.lie.dim:
                raise ValidationError(f"basis index {k} out of range")
        object.__setattr__(self, "coeffs", clean)

    def _same(self, other):
        if other.lie is not self.lie:
            raise ContextMismatch("Lie elements from different algebras")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        axpy(out, ONE, other.coeffs)
        return LieElement(self.lie, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LieElement(self.lie, {k: -c for k, c in self.coeffs.items()})

    def __mul__(self, c):
        c = as_scalar(c)
        return LieElement(self.lie, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LieElement) and other.lie is self.lie and other.coeffs == self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def bracket(self, other: LieElement) -> LieElement:
        self._same(other)
        return LieElement(self.lie, self.lie.bracket_vectors(self.coeffs, other.coeffs))

    def to_json(self) -> dict:
        words = getattr(self.lie, "words", None)
        return {
            (",".join(map(str, words[k])) if words else str(k)): format_scalar(c)
            for k, c in sorted(self.coeffs.items())
        }

    def __repr__(self):
        return " + ".join(f"{c}*{self.lie.labels[k]}" for k, c in sorted(self.coeffs.items())) or "0"


def lie_bracket(lie: GradedLieAlgebra, a: LieElement, b: LieElement) -> LieElement:
    if a.lie is not lie or b.lie is not lie:
        raise ContextMismatch("elements do not belong to this Lie algebra")
    return a.bracket(b)


# ---------------------------------------------------------------------------
# the free nilpotent Lie algebra L_p(V)
# ---------------------------------------------------------------------------


class FreeNilpotentLie(GradedLieAlgebra):
    """``L_p(V)`` for ``dim V = n``: the free Lie algebra modulo brackets of degree > p."""

    def __init__(self, n: int, p: int):
        if n < 1 or p < 1:
            raise ValidationError("need n >= 1 and p >= 1")
        self.n = n
        self.p = p
        self.words = tuple(w for d in range(1, p + 1) for w in lyndon_words(n, d))
        self.index = {w: i for i, w in enumerate(self.words)}
        self.tensor = TensorAlgebra(n)
        self._images = tuple(dict(_bracketing_terms(w)) for w in self.words)
        self._solvers: dict[int, SparseEchelon] = {}
        self.degrees = tuple(len(w) for w in self.words)
        table = {}
        for i, wi in enumerate(self.words):
            for j in range(i + 1, len(self.words)):
                wj = self.words[j]
                if len(wi) + len(wj) > p:
                    continue
                t = commutator_terms(self._images[i], self._images[j])
                table[(i, j)] = self._project(t, len(wi) + len(wj))
        labels = ["x" + "".join(map(str, w)) if len(w) == 1 else "[" + "".join(map(str, w)) + "]"
                  for w in self.words]
        super().__init__([len(w) for w in self.words], table, labels, check=False)

    def __repr__(self):
        return f"FreeNilpotentLie(n={self.n}, p={self.p})"

    def bracket_image(self, i: int) -> dict:
        """Terms of the basis element ``i`` inside ``T(V)``."""
        return self._images[i]

    def _solver(self, d: int) -> SparseEchelon:
        # rows (P(w) | e_k): reducing (t | 0) leaves (0 | -coordinates)
        ech = self._solvers.get(d)
        if ech is None:
            ech = SparseEchelon()
            for k in self.indices_of_degree(d):
                row = {(0, w): c for w, c in self._images[k].items()}
                row[(1, k)] = ONE
                ech.add(row)
            self._solvers[d] = ech
        return ech

    def _project(self, t: Mapping, d: int) -> dict:
        if not t:
            return {}
        if any(len(w) != d for w in t):
            raise NotALieElement(f"input is not homogeneous of degree {d}")
        if d > self.p:
            raise ValueError(f"degree {d} exceeds the nilpotency index {self.p}")
        rem = self._solver(d).reduce({(0, w): c for w, c in t.items()})
        if any(key[0] == 0 for key in rem):
            raise NotALieElement("not a Lie element")
        return {key[1]: -c for key, c in rem.items()}

    def project_to_lie(self, t: NCPolynomial | Mapping, d: int) -> LieElement:
        """Coordinates of a homogeneous Lie polynomial in the Lyndon basis."""
        terms = t.terms if isinstance(t, NCPolynomial) else t
        return LieElement(self, self._project(terms, d))

    def to_tensor(self, a: LieElement) -> NCPolynomial:
        out: dict = {}
        for k, c in a.coeffs.items():
            axpy(out, c, self._images[k])
        return NCPolynomial(self.tensor, out, normalized=True)

    def lift(self, g: Matrix) -> Matrix:
        """Matrix of the automorphism of ``L_p(V)`` induced by ``g`` in ``GL(V)``."""
        if g.shape != (self.n, self.n):
            raise ValidationError(f"expected a {self.n}x{self.n} matrix, got {g.shape}")
        if not g.is_invertible():
            raise SingularMatrixError("singular matrix does not act on L_p(V)")
        images = linear_substitution_images(g, self.n)
        cols = []
        for k, img in enumerate(self._images):
            cols.append(self._project(substitute_letters(img, images), self.degrees[k]))
        return Matrix.from_rows([[cols[c].get(r, ZERO) for c in range(self.dim)] for r in range(self.dim)])

    def to_json(self) -> dict:
        data = super().to_json()
        data.update({"n": self.n, "p": self.p, "words": [list(w) for w in self.words]})
        return data


def gl_action_lie(lie: FreeNilpotentLie, g: Matrix, a: LieElement) -> LieElement:
    """Action of ``g`` in ``GL(V)`` on an element of ``L_p(V)``."""
    if a.lie is not lie:
        raise ContextMismatch("element does not belong to this Lie algebra")
    m = lie.lift(g)
    out: dict = {}
    for k, c in a.coeffs.items():
        axpy(out, c, {r: m[r, k] for r in range(lie.dim) if m[r, k]})
    return LieElement(lie, out)


def project_to_lie(lie: FreeNilpotentLie, t: NCPolynomial | Mapping, d: int) -> LieElement:
    return lie.project_to_lie(t, d)


@lru_cache(maxsize=None)
def free_nilpotent_lie(n: int, p: int) -> FreeNilpotentLie:
    """Shared, immutable ``L_p(K^n)`` instance."""
    return FreeNilpotentLie(n, p)
