"""Finite rational matrix groups and their induced graded actions.

A :class:`GradedAction` records, for every group element, the matrix of its
action on one finite-dimensional graded piece (``T(V)_d``, ``F_d``, the Lie
basis, ``S_alpha`` or ``U_d``) as sparse columns over a fixed ordered basis.
Invariant subspaces are computed from the Reynolds projector and always
cross-checked against the trace average ``(1/|G|) sum_g tr rho(g)``.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .algebras import EnvelopingAlgebra, RelFreeContext, words
from .errors import CapExceeded, OracleMismatch, SingularMatrixError, ValidationError
from .lie import FreeNilpotentLie, GradedLieAlgebra
from .linalg import ONE, ZERO, Matrix, Scalar, SparseEchelon, Subspace, as_scalar, axpy
from .tensor import concat_many, linear_substitution_images, substitute_letters

log = logging.getLogger(__name__)

DEFAULT_GROUP_CAP = 1024


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    """A finite group of invertible rational ``n x n`` matrices, elements in BFS order."""

    n: int
    generators: tuple
    elements: tuple
    _lifts: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: Matrix) -> bool:
        return g in set(self.elements)

    def to_json(self) -> dict:
        return {"n": self.n, "order": self.order, "generators": [g.to_json() for g in self.generators]}


def close(generators: Iterable[Any], cap: int = DEFAULT_GROUP_CAP, n: int | None = None) -> MatrixGroup:
    """Breadth-first closure of the generated group, refusing to grow past ``cap``."""
    gens = [g if isinstance(g, Matrix) else Matrix.from_rows(g) for g in generators]
    if not gens and n is None:
        n = 0
    n = gens[0].nrows if gens else n
    for g in gens:
        if g.shape != (n, n):
            raise ValidationError(f"generator of shape {g.shape}, expected {n}x{n}")
        if not g.is_invertible():
            raise SingularMatrixError("group generators must be invertible")
    identity = Matrix.identity(n)
    elements = [identity]
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = g @ h
                if x not in seen:
                    if len(elements) >= cap:
                        raise CapExceeded("group_order", cap, f"group not verified finite within cap {cap}")
                    seen.add(x)
                    elements.append(x)
                    nxt.append(x)
        frontier = nxt
    return MatrixGroup(n, tuple(gens), tuple(elements))


def lift_group(G: MatrixGroup, lie: FreeNilpotentLie) -> MatrixGroup:
    """The same group acting on ``L_p(V)``; element order is preserved."""
    cache = G._lifts
    key = (lie.n, lie.p)
    hit = cache.get(key)
    if hit is None:
        lifted = {g: lie.lift(g) for g in G.elements}
        hit = MatrixGroup(lie.dim, tuple(lifted[g] for g in G.generators),
                          tuple(lifted[g] for g in G.elements))
        cache[key] = hit
    return hit


def as_lie_group(G: MatrixGroup, lie: GradedLieAlgebra) -> MatrixGroup:
    """Interpret ``G`` as acting on ``lie``: lift from ``GL(V)`` when needed."""
    if G.n == lie.dim:
        return G
    if isinstance(lie, FreeNilpotentLie) and G.n == lie.n:
        return lift_group(G, lie)
    raise ValidationError(f"a group on K^{G.n} cannot act on a Lie algebra of dimension {lie.dim}")


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradedAction:
    """Matrices of all group elements on one graded piece, as sparse columns."""

    group: MatrixGroup
    target: str
    basis: tuple
    columns: tuple  # columns[e][k] = sparse image (index -> scalar) of basis[k] under element e
    _invariants: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self, e: int) -> Matrix:
        cols = self.columns[e]
        return Matrix.from_rows([[cols[c].get(r, ZERO) for c in range(self.dim)] for r in range(self.dim)])

    def apply(self, e: int, v: Mapping[int, Any]) -> dict:
        out: dict = {}
        cols = self.columns[e]
        for k, c in v.items():
            axpy(out, as_scalar(c), cols[k])
        return out

    def apply_keys(self, e: int, t: Mapping) -> dict:
        """Act on a term map keyed by basis keys."""
        pos = self.position
        out = self.apply(e, {pos[k]: c for k, c in t.items()})
        return {self.basis[i]: c for i, c in out.items()}

    @property
    def position(self) -> dict:
        pos = self._invariants.get("_pos")
        if pos is None:
            pos = {k: i for i, k in enumerate(self.basis)}
            self._invariants["_pos"] = pos
        return pos


_oracle_lock = threading.Lock()
oracle_stats = {"checked": 0, "mismatches": 0}


def _build(G: MatrixGroup, target: str, basis: Sequence, image) -> GradedAction:
    pos = {k: i for i, k in enumerate(basis)}
    cols = []
    for g in G.elements:
        per = []
        for key in basis:
            img = image(g, key)
            per.append({pos[k]: c for k, c in img.items()})
        cols.append(tuple(per))
    return GradedAction(G, target, tuple(basis), tuple(cols))


def action_on_tensor(G: MatrixGroup, d: int) -> GradedAction:
    images = {g: linear_substitution_images(g, G.n) for g in G.elements}
    return _build(G, f"T_{d}", words(G.n, d), lambda g, w: concat_many(images[g][i] for i in w))


def action_on_relfree(G: MatrixGroup, rf: RelFreeContext, d: int) -> GradedAction:
    """Action on ``F_d``: act on representatives in ``T(V)_d`` and reduce."""
    if G.n != rf.n:
        raise ValidationError("group dimension does not match F(N_p, V)")
    images = {g: linear_substitution_images(g, G.n) for g in G.elements}
    return _build(G, f"F_{d}", rf.basis(d),
                  lambda g, w: rf.normalize(concat_many(images[g][i] for i in w)))


def action_on_lie(G: MatrixGroup, lie: GradedLieAlgebra) -> GradedAction:
    GL = as_lie_group(G, lie)
    return _build(GL, "L", [(i,) for i in range(lie.dim)],
                  lambda g, key: {(r,): g[r, key[0]] for r in range(lie.dim) if g[r, key[0]]})


def _lie_columns(g: Matrix, dim: int) -> list[dict]:
    return [{r: g[r, c] for r in range(dim) if g[r, c]} for c in range(dim)]


def action_on_symmetric(G: MatrixGroup, lie: GradedLieAlgebra, alpha: Sequence[int]) -> GradedAction:
    """Action on the multihomogeneous component ``S_alpha`` of ``S(L)``."""
    from .commutative import comm_product, monomials_alpha

    GL = as_lie_group(G, lie)
    cols = {g: [{(r,): c for r, c in col.items()} for col in _lie_columns(g, lie.dim)] for g in GL.elements}

    def image(g, mono):
        out = {(): ONE}
        for i in mono:
            out = comm_product(out, cols[g][i])
        return out

    return _build(GL, f"S_{tuple(alpha)}", monomials_alpha(lie, alpha), image)


def action_on_enveloping(G: MatrixGroup, env: EnvelopingAlgebra, d: int) -> GradedAction:
    """Action on the degree ``d`` PBW component of ``U(L)``."""
    lie = env.lie
    GL = as_lie_group(G, lie)
    cols = {g: [{(r,): c for r, c in col.items()} for col in _lie_columns(g, lie.dim)] for g in GL.elements}
    return _build(GL, f"U_{d}", env.basis(d),
                  lambda g, key: env.normalize(concat_many(cols[g][i] for i in key)))


@dataclass(frozen=True)
class TensorDegree:
    n: int
    d: int


@dataclass(frozen=True)
class RelFreeDegree:
    rf: RelFreeContext
    d: int


@dataclass(frozen=True)
class LieBasis:
    lie: GradedLieAlgebra


@dataclass(frozen=True)
class SymmetricMultidegree:
    lie: GradedLieAlgebra
    alpha: tuple


@dataclass(frozen=True)
class EnvelopingDegree:
    env: EnvelopingAlgebra
    d: int


def induced_action(G: MatrixGroup, target, max_degree: int | None = None) -> GradedAction:
    """Dispatch on the target descriptor; ``max_degree`` guards the graded degree."""
    deg = getattr(target, "d", None)
    if deg is None and isinstance(target, SymmetricMultidegree):
        deg = sum(target.alpha)
    if max_degree is not None and deg is not None and deg > max_degree:
        raise CapExceeded("max_degree", max_degree)
    if isinstance(target, TensorDegree):
        if target.n != G.n:
            raise ValidationError("group dimension does not match T(V)")
        return action_on_tensor(G, target.d)
    if isinstance(target, RelFreeDegree):
        return action_on_relfree(G, target.rf, target.d)
    if isinstance(target, LieBasis):
        return action_on_lie(G, target.lie)
    if isinstance(target, SymmetricMultidegree):
        return action_on_symmetric(G, target.lie, target.alpha)
    if isinstance(target, EnvelopingDegree):
        return action_on_enveloping(G, target.env, target.d)
    raise TypeError(f"unknown action target {target!r}")


# ---------------------------------------------------------------------------
# averaging
# ---------------------------------------------------------------------------


def reynolds(a: GradedAction, v: Mapping[int, Any] | Sequence[Any]) -> dict:
    """``(1/|G|) sum_g rho(g) v`` for a vector given sparsely or densely."""
    if not isinstance(v, Mapping):
        v = {i: as_scalar(x) for i, x in enumerate(v) if x}
    out: dict = {}
    for e in range(a.group.order):
        axpy(out, ONE, a.apply(e, v))
    inv = ONE / a.group.order
    return {k: c * inv for k, c in out.items()}


def invariant_dimension(a: GradedAction) -> int:
    """Trace average over the group; must be a non-negative integer."""
    total = ZERO
    for cols in a.columns:
        for k, col in enumerate(cols):
            total += col.get(k, ZERO)
    avg = total / a.group.order
    if avg.denominator != 1 or avg < 0:
        raise OracleMismatch(f"trace average {avg} on {a.target} is not a non-negative integer")
    return int(avg)


def invariant_echelon(a: GradedAction) -> SparseEchelon:
    """Echelon basis (over basis positions) of the invariant subspace.

    Computed as the image of the Reynolds projector and checked against the
    trace average; a disagreement raises :class:`OracleMismatch`.
    """
    ech = a._invariants.get("echelon")
    if ech is not None:
        return ech
    ech = SparseEchelon()
    for k in range(a.dim):
        ech.add(reynolds(a, {k: ONE}))
    try:
        expected = invariant_dimension(a)
    except OracleMismatch:
        with _oracle_lock:
            oracle_stats["checked"] += 1
            oracle_stats["mismatches"] += 1
        raise
    with _oracle_lock:
        oracle_stats["checked"] += 1
        if ech.rank != expected:
            oracle_stats["mismatches"] += 1
    if ech.rank != expected:
        raise OracleMismatch(
            f"invariants of {a.target}: Reynolds rank {ech.rank} but trace average {expected}"
        )
    a._invariants["echelon"] = ech
    return ech


def invariant_subspace(a: GradedAction) -> Subspace:
    return invariant_echelon(a).to_subspace(list(range(a.dim)))


def is_invariant(a: GradedAction, v: Mapping[int, Any]) -> bool:
    v = {k: as_scalar(c) for k, c in v.items() if c}
    return all(a.apply(e, v) == v for e in range(a.group.order))
