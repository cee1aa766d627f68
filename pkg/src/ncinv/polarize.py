"""Polarization for ``F(N_p, U + mW)``.

Variables are laid out as ``[U | copy 0 of W | copy 1 of W | ...]``, so the
algebra on ``l`` copies sits inside the algebra on ``m >= l`` copies with
unchanged letter indices. ``GL(K^m)`` acts on the copies: the matrix ``g``
sends copy ``c`` of a ``W``-letter to ``sum_c' g[c', c]`` times copy ``c'``
of the same letter, and fixes ``U``. The span of an orbit is produced by
closing under the polarization operators, the coefficients of ``t^k`` in
the action of ``I + t E_ij``, together with the splitting into
copy-multihomogeneous components (the torus part of the orbit).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from .algebras import RelFreeContext
from .errors import SingularMatrixError, ValidationError
from .groups import MatrixGroup
from .linalg import ONE, ZERO, Matrix, SparseEchelon, axpy
from .pipeline import (
    VerificationReport,
    construct_invariants_F,
    verify_generation,
)
from .tensor import NCPolynomial, linear_substitution_images, substitute_letters

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitModule:
    """The module ``U + mW`` with a user-supplied Capelli height ``h``."""

    dim_u: int
    dim_w: int
    copies: int
    capelli_h: int

    def __post_init__(self):
        if self.dim_u < 0 or self.dim_w < 1 or self.copies < 1 or self.capelli_h < 1:
            raise ValidationError("need dim_u >= 0, dim_w >= 1, copies >= 1 and h >= 1")

    @property
    def dim(self) -> int:
        return self.dim_u + self.copies * self.dim_w

    def letter(self, copy: int, j: int) -> int:
        return self.dim_u + copy * self.dim_w + j

    def copy_of(self, letter: int) -> int | None:
        """Copy index of a letter, ``None`` for ``U``-letters."""
        if letter < self.dim_u:
            return None
        return (letter - self.dim_u) // self.dim_w

    def with_copies(self, m: int) -> SplitModule:
        return SplitModule(self.dim_u, self.dim_w, m, self.capelli_h)

    def to_json(self) -> dict:
        return {"dim_u": self.dim_u, "dim_w": self.dim_w, "copies": self.copies, "h": self.capelli_h}


@dataclass(frozen=True)
class PolarizationOperator:
    """Replace letters of copy ``target`` by the same letters of copy ``source``."""

    source: int
    target: int

    def __post_init__(self):
        if self.source == self.target:
            raise ValidationError("a polarization operator needs two distinct copies")

    def coefficients(self, split: SplitModule, terms: dict) -> dict[int, dict]:
        """Coefficients of ``t^k`` (``k >= 1``) in the substitution ``w_target -> w_target + t w_source``."""
        shift = (self.source - self.target) * split.dim_w
        out: dict[int, dict] = {}
        for word, c in terms.items():
            partial = {(0, ()): ONE}
            for x in word:
                step: dict = {}
                moved = x + shift if split.copy_of(x) == self.target else None
                for (k, prefix), a in partial.items():
                    axpy(step, a, {(k, prefix + (x,)): ONE})
                    if moved is not None:
                        axpy(step, a, {(k + 1, prefix + (moved,)): ONE})
                partial = step
            for (k, w), a in partial.items():
                if k:
                    axpy(out.setdefault(k, {}), c * a, {w: ONE})
        return {k: v for k, v in out.items() if v}


def copies_matrix(split: SplitModule, g: Matrix) -> Matrix:
    """The matrix of ``g`` in ``GL(K^m)`` acting on ``U + mW`` (identity on ``U``)."""
    m = split.copies
    if g.shape != (m, m):
        raise ValidationError(f"expected a {m}x{m} matrix")
    if not g.is_invertible():
        raise SingularMatrixError("GL(K^m) element must be invertible")
    N = split.dim
    rows = [[ZERO] * N for _ in range(N)]
    for i in range(split.dim_u):
        rows[i][i] = ONE
    for c in range(m):
        for c2 in range(m):
            if g[c2, c]:
                for j in range(split.dim_w):
                    rows[split.letter(c2, j)][split.letter(c, j)] = g[c2, c]
    return Matrix.from_rows(rows)


def gl_km_action(split: SplitModule, g: Matrix | Sequence, f: NCPolynomial) -> NCPolynomial:
    """Algebra automorphism induced by ``g`` on the copies, followed by normal form."""
    g = g if isinstance(g, Matrix) else Matrix.from_rows(g)
    M = copies_matrix(split, g)
    images = linear_substitution_images(M, split.dim)
    return NCPolynomial(f.arena, f.arena.normalize(substitute_letters(f.terms, images)), normalized=True)


def copy_multidegree(split: SplitModule, word: tuple) -> tuple:
    counts = [0] * split.copies
    for x in word:
        c = split.copy_of(x)
        if c is not None:
            counts[c] += 1
    return (len(word),) + tuple(counts)


def _split_by_copies(split: SplitModule, terms: dict) -> list[dict]:
    parts: dict = {}
    for w, c in terms.items():
        parts.setdefault(copy_multidegree(split, w), {})[w] = c
    return [parts[k] for k in sorted(parts)]


def polarize_set(B: Sequence[NCPolynomial], source: SplitModule, m: int) -> list[NCPolynomial]:
    """Spanning set of the ``GL(K^m)``-submodule generated by ``B`` inside ``F(N_p, U + mW)``.

    ``B`` lives on ``source.copies = l <= m`` copies; the result is an echelon
    basis per degree, listed by degree.
    """
    l = source.copies
    if l > m:
        raise ValidationError(f"cannot polarize from {l} copies to fewer ({m}) copies")
    target = source.with_copies(m)
    p = {f.arena.p for f in B} if B else {1}
    if len(p) != 1:
        raise ValidationError("generators come from different relatively free algebras")
    max_deg = max([f.arena.max_degree for f in B], default=8)
    rf = RelFreeContext(target.dim, p.pop(), max_deg)
    ops = [PolarizationOperator(i, j) for i in range(m) for j in range(m) if i != j]
    spans: dict[int, SparseEchelon] = {}
    queue: list[dict] = []

    def push(t: dict) -> None:
        for part in _split_by_copies(target, rf.normalize(t)):
            d = len(next(iter(part)))
            ech = spans.setdefault(d, SparseEchelon())
            if ech.add(part):
                queue.append(part)

    for f in B:
        push(f.terms)
    while queue:
        t = queue.pop()
        for op in ops:
            for _, coeff in sorted(op.coefficients(target, t).items()):
                push(coeff)
    out = []
    for d in sorted(spans):
        out.extend(NCPolynomial(rf, row, normalized=True) for row in spans[d].basis())
    return out


def restrict_copies(B: Sequence[NCPolynomial], source: SplitModule, m: int) -> list[NCPolynomial]:
    """Send copies ``>= m`` to zero: the equivariant surjection onto ``U + mW``."""
    target = source.with_copies(m)
    if not B:
        return []
    rf = RelFreeContext(target.dim, B[0].arena.p, B[0].arena.max_degree)
    out = []
    for f in B:
        t = {w: c for w, c in f.terms.items() if all(x < target.dim for x in w)}
        t = rf.normalize(t)
        if t:
            out.append(NCPolynomial(rf, t, normalized=True))
    return out


def diagonal_group(G: MatrixGroup, split: SplitModule) -> MatrixGroup:
    """``G`` given on ``U + W`` (block diagonal) acting diagonally on ``U + mW``."""
    du, dw = split.dim_u, split.dim_w
    if G.n != du + dw:
        raise ValidationError(f"group must act on U + W of dimension {du + dw}")
    def embed(g: Matrix) -> Matrix:
        for i in range(du):
            for j in range(du, du + dw):
                if g[i, j] or g[j, i]:
                    raise ValidationError("group elements must preserve the splitting U + W")
        N = split.dim
        rows = [[ZERO] * N for _ in range(N)]
        for i in range(du):
            for j in range(du):
                rows[i][j] = g[i, j]
        for c in range(split.copies):
            for i in range(dw):
                for j in range(dw):
                    rows[split.letter(c, i)][split.letter(c, j)] = g[du + i, du + j]
        return Matrix.from_rows(rows)
    table = {g: embed(g) for g in G.elements}
    return MatrixGroup(split.dim, tuple(table[g] for g in G.generators), tuple(table[g] for g in G.elements))


@dataclass(frozen=True)
class PolarizationReport:
    source: SplitModule
    target: SplitModule
    p: int
    asserted: bool
    generator_count: int
    verification: VerificationReport

    @property
    def passed(self) -> bool:
        return self.verification.passed

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(), "p": self.p,
                "asserted": self.asserted, "generator_count": self.generator_count,
                "verification": self.verification.to_json()}


def verify_polarization(
    G: MatrixGroup,
    dim_w: int,
    h: int,
    p: int,
    m: int,
    d_max: int,
    dim_u: int = 0,
    source_copies: int | None = None,
) -> PolarizationReport:
    """Invariants of ``n h`` copies, moved to ``m`` copies, against the invariants of ``U + mW``.

    ``G`` acts on ``U + W`` by block-diagonal matrices. The report is marked
    ``asserted`` only for ``p = 1``, where ``h = 1`` is classical; for
    ``p >= 2`` the Capelli height is a user guess and the outcome is data.
    ``source_copies`` overrides the default ``l = dim_w * h``.
    """
    l = source_copies if source_copies is not None else dim_w * h
    source = SplitModule(dim_u, dim_w, l, h)
    target = source.with_copies(m)
    G_src = diagonal_group(G, source)
    res = construct_invariants_F(G_src, source.dim, p, max_degree=d_max, verify=False)
    B = res.nc_generators()
    gens = polarize_set(B, source, m) if m >= l else restrict_copies(B, source, m)
    G_tgt = diagonal_group(G, target)
    rf = RelFreeContext(target.dim, p, d_max)
    gens = [NCPolynomial(rf, f.terms, normalized=True) for f in gens if f.degree <= d_max]
    report = verify_generation(G_tgt, gens, d_max, arena=rf)
    log.info("polarization %s -> %s copies, p=%d: %s", l, m, p, "PASS" if report.passed else "FAIL")
    return PolarizationReport(source, target, p, p == 1, len(gens), report)
