"""Noncommutative polynomials and the tensor algebra ``T(V)``.

Polynomials are stored as ``dict`` maps from monomial keys (tuples of ints)
to nonzero scalars. The meaning of a key depends on the *arena*: a word in
the letters of ``V`` for the tensor algebra, a normal-form word for a
relatively free algebra, or a nondecreasing tuple of Lie-basis indices for an
enveloping algebra. :class:`NCPolynomial` wraps a term map together with its
arena and routes products through the arena's normalization.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from .errors import ContextMismatch, ValidationError
from .linalg import ONE, ZERO, Scalar, as_scalar, axpy, format_scalar

Word = tuple
Terms = dict


# ---------------------------------------------------------------------------
# raw term-map arithmetic (words concatenate)
# ---------------------------------------------------------------------------


def clean(terms: Mapping) -> dict:
    return {k: as_scalar(v) for k, v in terms.items() if v}


def add_terms(*maps: Mapping, coeffs: Sequence[Any] | None = None) -> dict:
    out: dict = {}
    for i, m in enumerate(maps):
        axpy(out, ONE if coeffs is None else as_scalar(coeffs[i]), m)
    return out


def scale_terms(t: Mapping, c: Any) -> dict:
    c = as_scalar(c)
    if not c:
        return {}
    return {k: c * v for k, v in t.items()}


def concat_terms(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for u, x in a.items():
        for v, y in b.items():
            w = u + v
            s = out.get(w, ZERO) + x * y
            if s:
                out[w] = s
            else:
                out.pop(w, None)
    return out


def concat_many(factors: Iterable[Mapping]) -> dict:
    out: dict = {(): ONE}
    for f in factors:
        out = concat_terms(out, f)
        if not out:
            break
    return out


def commutator_terms(a: Mapping, b: Mapping) -> dict:
    return add_terms(concat_terms(a, b), concat_terms(b, a), coeffs=(1, -1))


def left_normed(args: Sequence[Mapping]) -> dict:
    """``[a1, ..., ak] = [[a1, ..., a(k-1)], ak]`` with ``[a] = a``."""
    out = dict(args[0])
    for a in args[1:]:
        out = commutator_terms(out, a)
    return out


def substitute_letters(t: Mapping, images: Sequence[Mapping]) -> dict:
    """Algebra map sending letter ``i`` to ``images[i]`` (term maps in the target)."""
    out: dict = {}
    cache: dict = {}
    for w, c in t.items():
        img = cache.get(w)
        if img is None:
            img = concat_many(images[i] for i in w)
            cache[w] = img
        axpy(out, c, img)
    return out


def linear_substitution_images(g, n: int) -> list[dict]:
    """Letter images ``x_i -> sum_j g[j, i] x_j`` for a square matrix ``g``."""
    return [{(j,): g[j, i] for j in range(n) if g[j, i]} for i in range(n)]


def homogeneous_parts(t: Mapping, degree=len) -> dict[int, dict]:
    parts: dict[int, dict] = {}
    for k, c in t.items():
        parts.setdefault(degree(k), {})[k] = c
    return parts


# ---------------------------------------------------------------------------
# arenas and the polynomial wrapper
# ---------------------------------------------------------------------------


class Arena:
    """Where a polynomial lives: determines key validity and multiplication."""

    kind = "abstract"

    def multiply(self, a: Mapping, b: Mapping) -> dict:
        raise NotImplementedError

    def normalize(self, t: Mapping) -> dict:
        return clean(t)

    def check_key(self, key: tuple) -> None:
        pass

    def key_degree(self, key: tuple) -> int:
        return len(key)

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class TensorAlgebra(Arena):
    """The free associative algebra on ``n`` letters ``x0 .. x(n-1)``."""

    n: int
    kind = "tensor"

    def multiply(self, a, b):
        return concat_terms(a, b)

    def check_key(self, key):
        if any(not (0 <= i < self.n) for i in key):
            raise ValidationError(f"word {key} uses letters outside 0..{self.n - 1}")

    def describe(self):
        return {"kind": self.kind, "n": self.n}


class NCPolynomial:
    """Linear combination of monomials in a fixed arena."""

    __slots__ = ("arena", "terms")

    def __init__(self, arena: Arena, terms: Mapping | None = None, *, normalized: bool = False):
        self.arena = arena
        terms = clean(terms or {})
        if not normalized:
            for k in terms:
                arena.check_key(k)
            terms = arena.normalize(terms)
        self.terms = terms

    @classmethod
    def one(cls, arena: Arena) -> NCPolynomial:
        return cls(arena, {(): ONE}, normalized=True)

    @classmethod
    def zero(cls, arena: Arena) -> NCPolynomial:
        return cls(arena, {}, normalized=True)

    @classmethod
    def monomial(cls, arena: Arena, key: Iterable[int], coeff: Any = 1) -> NCPolynomial:
        return cls(arena, {tuple(key): as_scalar(coeff)})

    def _same(self, other: NCPolynomial) -> None:
        if self.arena != other.arena:
            raise ContextMismatch(f"arena mismatch: {self.arena!r} vs {other.arena!r}")

    def __add__(self, other):
        self._same(other)
        return NCPolynomial(self.arena, add_terms(self.terms, other.terms), normalized=True)

    def __sub__(self, other):
        self._same(other)
        return NCPolynomial(self.arena, add_terms(self.terms, other.terms, coeffs=(1, -1)), normalized=True)

    def __neg__(self):
        return NCPolynomial(self.arena, scale_terms(self.terms, -1), normalized=True)

    def __mul__(self, other):
        if isinstance(other, NCPolynomial):
            self._same(other)
            return NCPolynomial(self.arena, self.arena.multiply(self.terms, other.terms), normalized=True)
        return NCPolynomial(self.arena, scale_terms(self.terms, other), normalized=True)

    def __rmul__(self, c):
        return NCPolynomial(self.arena, scale_terms(self.terms, c), normalized=True)

    def __eq__(self, other):
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        return self.arena == other.arena and self.terms == other.terms

    def __hash__(self):
        return hash((self.arena, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, key) -> Scalar:
        return self.terms.get(tuple(key), ZERO)

    def degrees(self) -> set[int]:
        return {self.arena.key_degree(k) for k in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int:
        """Degree of a nonzero homogeneous element (max degree otherwise)."""
        return max(self.degrees(), default=0)

    def component(self, d: int) -> NCPolynomial:
        return NCPolynomial(
            self.arena,
            {k: c for k, c in self.terms.items() if self.arena.key_degree(k) == d},
            normalized=True,
        )

    def sorted_terms(self) -> list[tuple[tuple, Scalar]]:
        return sorted(self.terms.items())

    def to_json(self) -> list[dict]:
        return [{"word": list(k), "coeff": format_scalar(c)} for k, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, arena: Arena, data: Iterable[Mapping]) -> NCPolynomial:
        return cls(arena, {tuple(int(i) for i in e["word"]): as_scalar(e["coeff"]) for e in data})

    def pretty(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.sorted_terms():
            mon = "*".join(names[i] if names else f"x{i}" for i in k) or "1"
            parts.append(f"({c})*{mon}" if c != 1 else mon)
        return " + ".join(parts)

    def __repr__(self):
        return f"NCPolynomial({self.arena.kind}, {self.pretty()})"
