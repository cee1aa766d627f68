"""Relatively free Lie nilpotent algebras, enveloping algebras, canonical maps.

``F(N_p, V)`` is handled degreewise: the degree ``d`` component of the T-ideal
generated by ``[x_1, ..., x_(p+1)]`` is echelonized inside ``T(V)_d`` with
pivots on lex-largest words, so every class has a unique representative
supported on the remaining (non-pivot) words. For ``p = 1`` those are exactly
the nondecreasing words, i.e. commutative monomials.

``U(L)`` for a graded Lie algebra ``L`` uses the PBW basis of nondecreasing
tuples of basis indices; products are brought to that form by straightening.
"""

from __future__ import annotations

import itertools
import threading
from collections.abc import Iterable, Mapping, Sequence
from functools import lru_cache
from math import comb

from sympy.utilities.iterables import multiset_permutations

from .errors import CapExceeded, ContextMismatch, ValidationError
from .lie import FreeNilpotentLie, GradedLieAlgebra
from .linalg import ONE, ZERO, SparseEchelon, Subspace, as_scalar, axpy
from .tensor import (
    Arena,
    NCPolynomial,
    TensorAlgebra,
    concat_many,
    concat_terms,
    left_normed,
    substitute_letters,
)


def words(n: int, d: int) -> list[tuple]:
    """All words of length ``d`` over ``n`` letters in lex order."""
    return list(itertools.product(range(n), repeat=d))


def compositions(total: int, parts: int, minimum: int = 1):
    """Ordered tuples of ``parts`` integers >= ``minimum`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# F(N_p, V)
# ---------------------------------------------------------------------------


class RelFreeContext(Arena):
    """Degreewise model of the relatively free algebra ``F(N_p, V)``, ``dim V = n``."""

    kind = "relfree"

    def __init__(self, n: int, p: int, max_degree: int = 8):
        if n < 1 or p < 1:
            raise ValidationError("need n >= 1 and p >= 1")
        self.n = n
        self.p = p
        self.max_degree = max_degree
        self.tensor = TensorAlgebra(n)
        self._ideal: dict[int, SparseEchelon] = {}
        self._basis: dict[int, tuple] = {}
        self._lock = threading.Lock()

    def __eq__(self, other):
        return isinstance(other, RelFreeContext) and (self.n, self.p) == (other.n, other.p)

    def __hash__(self):
        return hash(("relfree", self.n, self.p))

    def __repr__(self):
        return f"RelFreeContext(n={self.n}, p={self.p}, max_degree={self.max_degree})"

    def describe(self):
        return {"kind": self.kind, "n": self.n, "p": self.p}

    def _check_degree(self, d: int) -> None:
        if d > self.max_degree:
            raise CapExceeded("max_degree", self.max_degree,
                              f"degree {d} exceeds the max_degree cap {self.max_degree}")

    def ideal(self, d: int) -> SparseEchelon:
        """Echelon basis of the T-ideal component in ``T(V)_d`` (pivots on lex-largest words)."""
        self._check_degree(d)
        ech = self._ideal.get(d)
        if ech is not None:
            return ech
        with self._lock:
            for e in range(d + 1):
                if e not in self._ideal:
                    self._ideal[e] = self._build_ideal(e)
            return self._ideal[d]

    def _build_ideal(self, d: int) -> SparseEchelon:
        ech = SparseEchelon(reverse=True)
        if d <= self.p:
            return ech
        prev = self._ideal[d - 1]
        for row in prev.basis():
            for x in range(self.n):
                ech.add({(x,) + w: c for w, c in row.items()})
                ech.add({w + (x,): c for w, c in row.items()})
        k = self.p + 1
        for lengths in compositions(d, k):
            pools = [words(self.n, m) for m in lengths]
            for ws in itertools.product(*pools):
                # the commutator is alternating in its first two slots
                if lengths[0] == lengths[1] and ws[0] >= ws[1]:
                    continue
                ech.add(left_normed([{w: ONE} for w in ws]))
        return ech

    def tideal_component(self, d: int) -> Subspace:
        """The T-ideal component as a dense subspace of ``T(V)_d`` (words in lex order)."""
        return self.ideal(d).to_subspace(words(self.n, d))

    def basis(self, d: int) -> tuple:
        """Normal-form words of degree ``d`` (lex order)."""
        b = self._basis.get(d)
        if b is None:
            ideal = self.ideal(d)
            b = tuple(w for w in words(self.n, d) if w not in ideal.rows)
            self._basis[d] = b
        return b

    def dim(self, d: int) -> int:
        return self.n ** d - self.ideal(d).rank

    def reduce_homogeneous(self, t: Mapping, d: int) -> dict:
        return self.ideal(d).reduce(t)

    def normalize(self, t: Mapping) -> dict:
        by_degree: dict[int, dict] = {}
        for w, c in t.items():
            if c:
                by_degree.setdefault(len(w), {})[w] = c
        out: dict = {}
        for d, part in by_degree.items():
            out.update(self.reduce_homogeneous(part, d) if d > self.p else part)
        return out

    def multiply(self, a, b):
        return self.normalize(concat_terms(a, b))

    def check_key(self, key):
        if any(not (0 <= i < self.n) for i in key):
            raise ValidationError(f"word {key} uses letters outside 0..{self.n - 1}")


def tideal_component(rf: RelFreeContext, d: int) -> Subspace:
    return rf.tideal_component(d)


def nf_F(rf: RelFreeContext, t: NCPolynomial | Mapping) -> NCPolynomial:
    """The natural surjection ``T(V) -> F(N_p, V)``: reduce each component to normal form."""
    if isinstance(t, NCPolynomial):
        if t.arena != rf.tensor and t.arena != rf:
            raise ContextMismatch("nf_F expects an element of T(V) with matching n")
        t = t.terms
    return NCPolynomial(rf, rf.normalize(t), normalized=True)


def dim_F(rf: RelFreeContext, d: int) -> int:
    return rf.dim(d)


# ---------------------------------------------------------------------------
# U(L)
# ---------------------------------------------------------------------------


class EnvelopingAlgebra(Arena):
    """``U(L)`` with its PBW basis of nondecreasing index tuples."""

    kind = "enveloping"

    def __init__(self, lie: GradedLieAlgebra):
        self.lie = lie
        self._cache: dict[tuple, dict] = {}
        self._basis: dict[int, tuple] = {}

    def __eq__(self, other):
        return isinstance(other, EnvelopingAlgebra) and other.lie is self.lie

    def __hash__(self):
        return hash(("enveloping", id(self.lie)))

    def __repr__(self):
        return f"EnvelopingAlgebra({self.lie!r})"

    def describe(self):
        return {"kind": self.kind, "dim_lie": self.lie.dim}

    def key_degree(self, key) -> int:
        return sum(self.lie.degrees[i] for i in key)

    def check_key(self, key):
        if any(not (0 <= i < self.lie.dim) for i in key):
            raise ValidationError(f"PBW key {key} uses indices outside the Lie basis")

    def straighten(self, word: Sequence[int]) -> dict:
        """Rewrite a product of basis elements in the PBW basis.

        The leftmost adjacent pair ``b_j b_i`` with ``j > i`` is replaced by
        ``b_i b_j + [b_j, b_i]`` until every monomial is nondecreasing.
        """
        word = tuple(word)
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        k = next((i for i in range(len(word) - 1) if word[i] > word[i + 1]), None)
        if k is None:
            out = {word: ONE}
        else:
            a, b = word[k], word[k + 1]
            out = dict(self.straighten(word[:k] + (b, a) + word[k + 2 :]))
            for c, coef in self.lie.bracket_basis(a, b).items():
                axpy(out, coef, self.straighten(word[:k] + (c,) + word[k + 2 :]))
        self._cache[word] = out
        return out

    def normalize(self, t: Mapping) -> dict:
        out: dict = {}
        for w, c in t.items():
            if c:
                axpy(out, c, self.straighten(w))
        return out

    def multiply(self, a, b):
        return self.normalize(concat_terms(a, b))

    def basis(self, d: int) -> tuple:
        """PBW monomials of (weighted) degree ``d``, lex-sorted."""
        b = self._basis.get(d)
        if b is None:
            b = tuple(sorted(_multisets_of_weight(self.lie.degrees, d)))
            self._basis[d] = b
        return b

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def generator(self, i: int) -> NCPolynomial:
        return NCPolynomial(self, {(i,): ONE}, normalized=True)


def _multisets_of_weight(degrees: Sequence[int], d: int) -> list[tuple]:
    out = []

    def rec(start, remaining, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for i in range(start, len(degrees)):
            if degrees[i] <= remaining:
                prefix.append(i)
                rec(i, remaining - degrees[i], prefix)
                prefix.pop()

    rec(0, d, [])
    return out


def straighten(env: EnvelopingAlgebra, word: Sequence[int]) -> NCPolynomial:
    return NCPolynomial(env, env.straighten(word), normalized=True)


def dim_U(env: EnvelopingAlgebra, d: int) -> int:
    """Number of PBW monomials of degree ``d``: coefficient of ``t^d`` in ``prod (1 - t^deg)^-1``."""
    coeffs = [1] + [0] * d
    for e in env.lie.degrees:
        for k in range(e, d + 1):
            coeffs[k] += coeffs[k - e]
    return coeffs[d]


def nc_multiply(a: NCPolynomial, b: NCPolynomial) -> NCPolynomial:
    return a * b


# ---------------------------------------------------------------------------
# canonical maps
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def symmetrization(mono: tuple) -> tuple[tuple, ...]:
    """Distinct rearrangements of a multiset; the symmetrizer averages over them."""
    return tuple(tuple(p) for p in multiset_permutations(list(mono)))


def iota_terms(s: Mapping) -> dict:
    """Full symmetrization ``S -> T(L)`` on a commutative term map (sorted tuples)."""
    out: dict = {}
    for mono, c in s.items():
        perms = symmetrization(tuple(sorted(mono)))
        w = as_scalar(c) / len(perms)
        for perm in perms:
            out[perm] = out.get(perm, ZERO) + w
    return {k: v for k, v in out.items() if v}


def multidegree(lie: GradedLieAlgebra, mono: Iterable[int], p: int | None = None) -> tuple:
    p = p if p is not None else lie.max_degree
    alpha = [0] * p
    for i in mono:
        alpha[lie.degrees[i] - 1] += 1
    return tuple(alpha)


def iota_alpha(lie: GradedLieAlgebra, s) -> NCPolynomial:
    """Symmetrize a multihomogeneous commutative polynomial into ``T(L)``.

    The result lives in the tensor algebra whose letters are the Lie-basis
    indices; :func:`expand_brackets` embeds it into ``T(V)`` for ``L = L_p(V)``.
    """
    terms = s.terms if hasattr(s, "terms") else s
    alphas = {multidegree(lie, m) for m in terms}
    if len(alphas) > 1:
        raise ValidationError("iota_alpha needs a multihomogeneous input")
    return NCPolynomial(TensorAlgebra(lie.dim), iota_terms(terms), normalized=True)


def pi_S(t: NCPolynomial | Mapping) -> dict:
    """Natural surjection ``T(L) -> S(L)``: sort each word."""
    terms = t.terms if isinstance(t, NCPolynomial) else t
    out: dict = {}
    for w, c in terms.items():
        axpy(out, c, {tuple(sorted(w)): ONE})
    return out


def expand_brackets(lie: FreeNilpotentLie, t: NCPolynomial | Mapping) -> NCPolynomial:
    """The algebra map ``T(L_p(V)) -> T(V)`` induced by the bracket embedding."""
    terms = t.terms if isinstance(t, NCPolynomial) else t
    images = [lie.bracket_image(i) for i in range(lie.dim)]
    return NCPolynomial(lie.tensor, substitute_letters(terms, images), normalized=True)


def pi_F(rf: RelFreeContext, lie: FreeNilpotentLie, t: NCPolynomial | Mapping) -> NCPolynomial:
    """``T(L_p(V)) -> F(N_p, V)``: expand the brackets and reduce to normal form."""
    _check_pair(rf, lie)
    return nf_F(rf, expand_brackets(lie, t))


def omega(env: EnvelopingAlgebra, s) -> NCPolynomial:
    """The canonical bijection ``S(L) -> U(L)``: symmetrize and straighten."""
    terms = s.terms if hasattr(s, "terms") else s
    return NCPolynomial(env, env.normalize(iota_terms(terms)), normalized=True)


def gamma(rf: RelFreeContext, env: EnvelopingAlgebra, u: NCPolynomial) -> NCPolynomial:
    """The algebra map ``U(L_p(V)) -> F(N_p, V)`` extending the identity on ``V``."""
    lie = env.lie
    if not isinstance(lie, FreeNilpotentLie):
        raise ContextMismatch("gamma is defined for enveloping algebras of L_p(V)")
    _check_pair(rf, lie)
    if u.arena != env:
        raise ContextMismatch("element does not belong to this enveloping algebra")
    out: dict = {}
    for key, c in u.terms.items():
        axpy(out, c, concat_many(lie.bracket_image(i) for i in key))
    return nf_F(rf, out)


def _check_pair(rf: RelFreeContext, lie: FreeNilpotentLie) -> None:
    if (rf.n, rf.p) != (lie.n, lie.p):
        raise ContextMismatch(f"F(N_{rf.p}, K^{rf.n}) does not match L_{lie.p}(K^{lie.n})")


def dim_T(n: int, d: int) -> int:
    return n ** d


def dim_S(lie: GradedLieAlgebra, d: int, weighted: bool = True) -> int:
    """Dimension of ``S(L)`` in weighted degree ``d`` (or standard degree when ``weighted`` is off)."""
    if not weighted:
        return comb(lie.dim + d - 1, d)
    return len(_multisets_of_weight(lie.degrees, d))
