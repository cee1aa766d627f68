"""Multigraded commutative invariants in ``S(L)``.

Variables of ``S(L)`` are the basis elements of a graded Lie algebra ``L``
(for ``L = L_p(V)`` these are the Lyndon brackets). A monomial is a sorted
tuple of variable indices. The multidegree ``alpha`` counts variables of each
Lie degree; the standard degree is ``|alpha|`` and the induced degree in
``F(N_p, V)`` is ``sum_i i * alpha_i``.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .algebras import compositions
from .errors import NotInSubspace, ValidationError
from .groups import (
    MatrixGroup,
    SymmetricMultidegree,
    as_lie_group,
    induced_action,
    invariant_echelon,
    is_invariant,
)
from .lie import GradedLieAlgebra
from .linalg import ONE, ZERO, SparseEchelon, as_scalar, axpy, format_scalar


def comm_product(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for u, x in a.items():
        for v, y in b.items():
            m = tuple(sorted(u + v))
            s = out.get(m, ZERO) + x * y
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


@dataclass(frozen=True, eq=False)
class CommPolynomial:
    """Polynomial in the Lie-basis variables; keys are sorted index tuples."""

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, c in self.terms.items():
            c = as_scalar(c)
            if c:
                key = tuple(sorted(int(i) for i in k))
                clean[key] = clean.get(key, ZERO) + c
        object.__setattr__(self, "terms", {k: c for k, c in clean.items() if c})

    @classmethod
    def variable(cls, i: int) -> CommPolynomial:
        return cls({(i,): ONE})

    def __add__(self, other):
        out = dict(self.terms)
        axpy(out, ONE, other.terms)
        return CommPolynomial(out)

    def __sub__(self, other):
        out = dict(self.terms)
        axpy(out, -ONE, other.terms)
        return CommPolynomial(out)

    def __mul__(self, other):
        if isinstance(other, CommPolynomial):
            return CommPolynomial(comm_product(self.terms, other.terms))
        c = as_scalar(other)
        return CommPolynomial({k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, CommPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def multidegrees(self, lie: GradedLieAlgebra, p: int | None = None) -> set[tuple]:
        return {multidegree_of(lie, m, p) for m in self.terms}

    def exps(self) -> list[tuple[dict, Any]]:
        out = []
        for m, c in sorted(self.terms.items()):
            e: dict[int, int] = {}
            for i in m:
                e[i] = e.get(i, 0) + 1
            out.append((e, c))
        return out

    def to_json(self) -> list[dict]:
        return [{"exps": {str(i): k for i, k in sorted(e.items())}, "coeff": format_scalar(c)}
                for e, c in self.exps()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> CommPolynomial:
        terms: dict = {}
        for entry in data:
            mono = []
            for i, k in entry["exps"].items():
                if int(k) < 0:
                    raise ValidationError("negative exponent")
                mono.extend([int(i)] * int(k))
            key = tuple(sorted(mono))
            terms[key] = terms.get(key, ZERO) + as_scalar(entry["coeff"])
        return cls(terms)

    def pretty(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.exps():
            mono = "*".join(
                (names[i] if names else f"v{i}") + (f"^{k}" if k > 1 else "") for i, k in sorted(e.items())
            ) or "1"
            parts.append(mono if c == 1 else f"({c})*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"CommPolynomial({self.pretty()})"


def multidegree_of(lie: GradedLieAlgebra, mono: Iterable[int], p: int | None = None) -> tuple:
    p = p if p is not None else lie.max_degree
    alpha = [0] * p
    for i in mono:
        alpha[lie.degrees[i] - 1] += 1
    return tuple(alpha)


def weighted_degree(alpha: Sequence[int]) -> int:
    """Degree in ``F(N_p, V)`` of the image of a multidegree ``alpha`` element."""
    return sum((i + 1) * a for i, a in enumerate(alpha))


def alphas_of_degree(p: int, d: int) -> list[tuple]:
    """All multidegrees in ``N_0^p`` of standard degree ``d``, reverse-lex (low Lie degree first)."""
    return sorted(compositions(d, p, minimum=0), reverse=True)


def monomials_alpha(lie: GradedLieAlgebra, alpha: Sequence[int]) -> list[tuple]:
    """Monomials of multidegree ``alpha`` as sorted index tuples, lex order."""
    blocks = []
    for i, a in enumerate(alpha):
        idx = lie.indices_of_degree(i + 1)
        if a and not idx:
            return []
        blocks.append(list(itertools.combinations_with_replacement(idx, a)))
    return sorted(tuple(sorted(sum(choice, ()))) for choice in itertools.product(*blocks))


@dataclass(frozen=True, eq=False)
class GeneratorRecord:
    poly: CommPolynomial
    alpha: tuple
    std_degree: int
    f_degree: int

    @classmethod
    def make(cls, poly: CommPolynomial, alpha: Sequence[int]) -> GeneratorRecord:
        alpha = tuple(int(a) for a in alpha)
        return cls(poly, alpha, sum(alpha), weighted_degree(alpha))

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "terms": self.poly.to_json()}


def _echelon_polys(ech: SparseEchelon) -> list[CommPolynomial]:
    return [CommPolynomial(row) for row in ech.basis()]


def _invariant_echelon_alpha(G: MatrixGroup, lie: GradedLieAlgebra, alpha: tuple) -> SparseEchelon:
    act = induced_action(G, SymmetricMultidegree(lie, tuple(alpha)))
    ech = invariant_echelon(act)
    out = SparseEchelon()
    for row in ech.basis():
        out.add({act.basis[k]: c for k, c in row.items()})
    return out


def invariant_basis_alpha(G: MatrixGroup, lie: GradedLieAlgebra, alpha: Sequence[int]) -> list[CommPolynomial]:
    """Echelon basis of ``S_alpha^G``."""
    if len(alpha) != lie.max_degree:
        raise ValidationError(f"multidegree needs {lie.max_degree} entries")
    return _echelon_polys(_invariant_echelon_alpha(G, lie, tuple(alpha)))


def minimal_generators(
    G: MatrixGroup,
    lie: GradedLieAlgebra,
    D: int | None = None,
    max_weight: int | None = None,
) -> list[GeneratorRecord]:
    """Minimal multihomogeneous generators of ``S(L)^G`` up to standard degree ``D``.

    ``D`` defaults to ``|G|`` (Noether's bound). When ``max_weight`` is given
    only multidegrees with ``sum_i i * alpha_i <= max_weight`` are examined;
    the result is then exactly the set of minimal generators of those
    multidegrees, since decomposables never need factors of larger weight.
    """
    GL = as_lie_group(G, lie)
    D = GL.order if D is None else D
    p = lie.max_degree
    invs: dict[tuple, SparseEchelon] = {}
    records: list[GeneratorRecord] = []
    for d in range(1, D + 1):
        for alpha in alphas_of_degree(p, d):
            if max_weight is not None and weighted_degree(alpha) > max_weight:
                continue
            if not monomials_alpha(lie, alpha):
                continue
            inv = _invariant_echelon_alpha(GL, lie, alpha)
            invs[alpha] = inv
            if not inv.rank:
                continue
            dec = SparseEchelon()
            for rec in records:
                rest = tuple(a - b for a, b in zip(alpha, rec.alpha))
                if min(rest) < 0 or not any(rest):
                    continue
                other = invs.get(rest)
                if other is None:
                    continue
                for row in other.basis():
                    dec.add(comm_product(rec.poly.terms, row))
            for row in dec.basis():
                if row not in inv:
                    raise NotInSubspace("decomposable element is not invariant")
            for row in inv.basis():
                if dec.add(row):
                    records.append(GeneratorRecord.make(CommPolynomial(row), alpha))
            assert dec.rank == inv.rank
    return records


def beta_commutative(records: Sequence[GeneratorRecord]) -> int:
    """Largest standard degree among the records (0 for an empty list)."""
    return max((r.std_degree for r in records), default=0)


def generated_dimension(records: Sequence[GeneratorRecord], lie: GradedLieAlgebra, alpha: Sequence[int]) -> int:
    """Dimension of the span of all products of records landing in multidegree ``alpha``."""
    return _generated_echelon(records, tuple(alpha), {}).rank


def _generated_echelon(records, alpha, memo) -> SparseEchelon:
    hit = memo.get(alpha)
    if hit is not None:
        return hit
    ech = SparseEchelon()
    if not any(alpha):
        ech.add({(): ONE})
    else:
        for rec in records:
            rest = tuple(a - b for a, b in zip(alpha, rec.alpha))
            if min(rest) < 0:
                continue
            for row in _generated_echelon(records, rest, memo).basis():
                ech.add(comm_product(rec.poly.terms, row))
    memo[alpha] = ech
    return ech


def check_records(records: Sequence[GeneratorRecord], lie: GradedLieAlgebra, G: MatrixGroup | None = None) -> None:
    """Validate multihomogeneity (and invariance when a finite group is supplied)."""
    for rec in records:
        if not rec.poly:
            raise ValidationError("zero polynomial in generator list")
        degs = rec.poly.multidegrees(lie)
        if degs != {rec.alpha}:
            raise ValidationError(f"entry is not multihomogeneous of multidegree {list(rec.alpha)}")
        if G is not None:
            act = induced_action(G, SymmetricMultidegree(lie, rec.alpha))
            pos = act.position
            if not is_invariant(act, {pos[m]: c for m, c in rec.poly.terms.items()}):
                raise ValidationError(f"entry {rec.poly.pretty(lie.labels)} is not G-invariant")


def export_generators(records: Sequence[GeneratorRecord]) -> list[dict]:
    return [r.to_json() for r in records]


def import_external_generators(
    source: str | Path | Sequence[Mapping],
    lie: GradedLieAlgebra,
    G: MatrixGroup | None = None,
) -> list[GeneratorRecord]:
    """Read ``[{alpha, terms: [{exps, coeff}]}]`` from a path or parsed data and validate it."""
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read generator file {source}: {exc}") from exc
    else:
        data = source
    if not isinstance(data, list):
        raise ValidationError("generator file must hold a JSON list")
    records = []
    for i, entry in enumerate(data):
        try:
            alpha = [int(a) for a in entry["alpha"]]
            poly = CommPolynomial.from_json(entry["terms"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed generator entry {i}: {exc}") from exc
        if len(alpha) != lie.max_degree or any(a < 0 for a in alpha):
            raise ValidationError(f"entry {i}: alpha must hold {lie.max_degree} non-negative integers")
        for m in poly.terms:
            if any(not 0 <= v < lie.dim for v in m):
                raise ValidationError(f"entry {i}: variable index out of range")
        records.append(GeneratorRecord.make(poly, alpha))
    GL = as_lie_group(G, lie) if G is not None else None
    check_records(records, lie, GL)
    return records
