"""From commutative invariants to generators of ``F(N_p, V)^G`` and ``U(L)^G``.

The relatively free route symmetrizes every multihomogeneous generator ``f``
of ``S(L_p(V))^G`` into ``T(L_p(V))``, expands the brackets inside ``T(V)``
and reduces modulo the T-ideal; the image has degree ``sum_i i * alpha_i``.
The enveloping route applies the canonical bijection ``omega`` instead.

Results carry an independent degreewise verification (dimension of the
generated subalgebra against the invariant dimension obtained from the group
action) and the observed degree bounds.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .algebras import (
    EnvelopingAlgebra,
    RelFreeContext,
    iota_alpha,
    omega,
    pi_F,
    gamma,
)
from .commutative import (
    GeneratorRecord,
    beta_commutative,
    check_records,
    import_external_generators,
    minimal_generators,
)
from .errors import CapExceeded, ContextMismatch, ValidationError
from .groups import (
    MatrixGroup,
    action_on_enveloping,
    action_on_relfree,
    as_lie_group,
    invariant_echelon,
    is_invariant,
)
from .lie import FreeNilpotentLie, GradedLieAlgebra, free_nilpotent_lie
from .linalg import ONE, SparseEchelon
from .tensor import Arena, NCPolynomial

log = logging.getLogger(__name__)

DEFAULT_MAX_DEGREE = 6


@dataclass(frozen=True)
class DegreeCheck:
    degree: int
    dim_subalgebra: int
    dim_invariants: int

    @property
    def equal(self) -> bool:
        return self.dim_subalgebra == self.dim_invariants

    def to_json(self) -> dict:
        return {"degree": self.degree, "dim_subalgebra": self.dim_subalgebra,
                "dim_invariants": self.dim_invariants, "equal": self.equal}


@dataclass(frozen=True)
class VerificationReport:
    table: tuple
    max_checked_degree: int

    @property
    def passed(self) -> bool:
        return all(row.equal for row in self.table)

    def first_failure(self) -> DegreeCheck | None:
        return next((row for row in self.table if not row.equal), None)

    def to_json(self) -> dict:
        return {"max_checked_degree": self.max_checked_degree,
                "table": [row.to_json() for row in self.table],
                "status": "PASS" if self.passed else "FAIL"}


@dataclass(frozen=True)
class BoundReport:
    beta_comm: int
    beta_nc: int
    p: int
    group_order: int | None = None

    @property
    def inequality_pbeta(self) -> bool:
        return self.beta_nc <= self.p * self.beta_comm

    @property
    def inequality_noether(self) -> bool | None:
        if self.group_order is None:
            return None
        return self.beta_nc <= self.p * self.group_order

    def to_json(self) -> dict:
        return {"beta_comm": self.beta_comm, "beta_nc": self.beta_nc, "p": self.p,
                "group_order": self.group_order, "inequality_pbeta": self.inequality_pbeta,
                "inequality_noether": self.inequality_noether}


@dataclass(frozen=True, eq=False)
class PipelineGenerator:
    nc: NCPolynomial
    source: GeneratorRecord
    f_degree: int

    def to_json(self, labels=None) -> dict:
        return {
            "degree": self.f_degree,
            "nc": self.nc.to_json(),
            "source": {"alpha": list(self.source.alpha), "std_degree": self.source.std_degree,
                       "f_degree": self.source.f_degree, "terms": self.source.poly.to_json()},
        }


@dataclass(eq=False)
class PipelineResult:
    arena: Arena
    lie: GradedLieAlgebra
    generators: list
    records: list
    verification: VerificationReport | None
    bounds: BoundReport
    max_degree: int
    dropped: list = field(default_factory=list)

    def nc_generators(self) -> list[NCPolynomial]:
        return [g.nc for g in self.generators]

    def to_json(self) -> dict:
        return {
            "arena": self.arena.describe(),
            "lie_basis": {"degrees": list(self.lie.degrees), "labels": list(self.lie.labels)},
            "max_degree": self.max_degree,
            "commutative_generators": [r.to_json() for r in self.records],
            "generators": [g.to_json() for g in self.generators],
            "pruned": len(self.dropped),
            "verification": self.verification.to_json() if self.verification else None,
            "bounds": self.bounds.to_json(),
        }


# ---------------------------------------------------------------------------
# subalgebras generated by homogeneous elements
# ---------------------------------------------------------------------------


def _degree_of(f: NCPolynomial) -> int:
    degs = f.degrees()
    if len(degs) != 1:
        raise ValidationError("generators must be nonzero and homogeneous")
    return next(iter(degs))


def subalgebra_echelons(arena: Arena, gens: Sequence[NCPolynomial], d_max: int) -> dict[int, SparseEchelon]:
    """Degreewise echelon bases of the subalgebra generated by homogeneous ``gens``.

    Uses ``A_d = sum_f A_(d - deg f) * f`` with ``A_0 = K``.
    """
    graded = [(_degree_of(f), f.terms) for f in gens if f]
    A = {0: SparseEchelon([{(): ONE}])}
    for d in range(1, d_max + 1):
        ech = SparseEchelon()
        for e, terms in graded:
            if e > d:
                continue
            for row in A[d - e].basis():
                ech.add(arena.multiply(row, terms))
        A[d] = ech
    return A


def prune_generators(arena: Arena, gens: Sequence[PipelineGenerator]) -> tuple[list, list]:
    """Drop zeros and elements lying in the subalgebra generated by the kept ones."""
    kept: list[PipelineGenerator] = []
    dropped: list[PipelineGenerator] = []
    live = [g for g in gens if g.nc]
    dropped.extend(g for g in gens if not g.nc)
    if not live:
        return kept, dropped
    top = max(g.f_degree for g in live)
    A = {0: SparseEchelon([{(): ONE}])}
    for d in range(1, top + 1):
        ech = SparseEchelon()
        for k in kept:
            e = k.f_degree
            for row in A[d - e].basis():
                ech.add(arena.multiply(row, k.nc.terms))
        for g in live:
            if g.f_degree != d:
                continue
            if ech.add(g.nc.terms):
                kept.append(g)
            else:
                dropped.append(g)
        A[d] = ech
    order = {id(g): i for i, g in enumerate(gens)}
    kept.sort(key=lambda g: (g.f_degree, order[id(g)]))
    return kept, dropped


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


class ActionCache:
    """Memoizes graded actions of one group per (arena, degree)."""

    def __init__(self, G: MatrixGroup):
        self.G = G
        self._store: dict = {}

    def get(self, arena: Arena, d: int):
        key = (arena.kind, id(arena), d)
        act = self._store.get(key)
        if act is None:
            if isinstance(arena, RelFreeContext):
                act = action_on_relfree(self.G, arena, d)
            elif isinstance(arena, EnvelopingAlgebra):
                act = action_on_enveloping(self.G, arena, d)
            else:
                raise ContextMismatch(f"no group action implemented on {arena.kind}")
            self._store[key] = act
        return act


def verify_invariance(G: MatrixGroup, gens: Sequence[NCPolynomial], cache: ActionCache | None = None) -> bool:
    """``g . f = f`` exactly for every element ``g`` and every generator ``f``."""
    cache = cache or ActionCache(G)
    for f in gens:
        if not f:
            continue
        for d in sorted(f.degrees()):
            act = cache.get(f.arena, d)
            pos = act.position
            comp = f.component(d).terms
            if any(k not in pos for k in comp):
                return False
            if not is_invariant(act, {pos[k]: c for k, c in comp.items()}):
                return False
    return True


def verify_generation(
    G: MatrixGroup,
    gens: Sequence[NCPolynomial],
    d_max: int,
    arena: Arena | None = None,
    cache: ActionCache | None = None,
) -> VerificationReport:
    """Compare the generated subalgebra with the invariants degree by degree."""
    if arena is None:
        if not gens:
            raise ValidationError("an arena is needed to verify an empty generator list")
        arena = gens[0].arena
    cache = cache or ActionCache(G)
    A = subalgebra_echelons(arena, gens, d_max)
    rows = []
    for d in range(1, d_max + 1):
        inv = invariant_echelon(cache.get(arena, d))
        rows.append(DegreeCheck(d, A[d].rank, inv.rank))
    return VerificationReport(tuple(rows), d_max)


def bound_report(result: PipelineResult, G: MatrixGroup | None, p: int) -> BoundReport:
    beta_nc = max((g.f_degree for g in result.generators), default=0)
    return BoundReport(beta_commutative(result.records), beta_nc, p, G.order if G is not None else None)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def _commutative_records(G, lie, D, max_degree, external):
    if external is not None:
        records = external if isinstance(external, list) and all(
            isinstance(r, GeneratorRecord) for r in external) else import_external_generators(external, lie, G)
        if G is not None:
            check_records(records, lie, as_lie_group(G, lie))
        kept = [r for r in records if r.f_degree <= max_degree]
        if len(kept) < len(records):
            log.warning("%d imported generators exceed degree cap %d and were skipped",
                        len(records) - len(kept), max_degree)
        return kept
    if G is None:
        raise ValidationError("either a finite group or external generators must be supplied")
    return minimal_generators(G, lie, D, max_weight=max_degree)


def construct_invariants_F(
    G: MatrixGroup | None,
    n: int,
    p: int,
    D: int | None = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
    verify_degree: int | None = None,
    external=None,
    prune: bool = True,
    verify: bool = True,
) -> PipelineResult:
    """Generators of ``F(N_p, K^n)^G`` of degree at most ``max_degree``.

    Commutative generators come from :func:`minimal_generators` (or from
    ``external``); each is symmetrized and pushed into ``F``. Generation is
    checked up to ``verify_degree``, by default ``min(p * D, max_degree)``.
    """
    if G is not None and G.n != n:
        raise ValidationError(f"group acts on K^{G.n}, expected K^{n}")
    lie = free_nilpotent_lie(n, p)
    rf = RelFreeContext(n, p, max_degree)
    D_used = D if D is not None else (G.order if G is not None else max_degree)
    records = _commutative_records(G, lie, D_used, max_degree, external)
    gens = []
    for rec in records:
        nc = pi_F(rf, lie, iota_alpha(lie, rec.poly))
        if nc and nc.degrees() != {rec.f_degree}:
            raise AssertionError("image degree differs from sum_i i * alpha_i")
        gens.append(PipelineGenerator(nc, rec, rec.f_degree))
    if prune:
        kept, dropped = prune_generators(rf, gens)
    else:
        kept = sorted((g for g in gens if g.nc), key=lambda g: g.f_degree)
        dropped = [g for g in gens if not g.nc]
    verification = None
    if verify and G is not None:
        d_max = verify_degree if verify_degree is not None else min(p * D_used, max_degree)
        if d_max > max_degree:
            raise CapExceeded("max_degree", max_degree, f"verify degree {d_max} exceeds max_degree {max_degree}")
        cache = ActionCache(G)
        if not verify_invariance(G, [g.nc for g in kept], cache):
            raise AssertionError("constructed generator is not invariant")
        verification = verify_generation(G, [g.nc for g in kept], d_max, arena=rf, cache=cache)
    result = PipelineResult(rf, lie, kept, records, verification, BoundReport(0, 0, p), max_degree, dropped)
    result.bounds = bound_report(result, G, p)
    return result


def validate_lie_group(lie: GradedLieAlgebra, GL: MatrixGroup) -> None:
    for g in GL.generators:
        if not lie.preserves_grading(g):
            raise ValidationError("group element does not preserve the grading of L")
        if not lie.is_automorphism(g):
            raise ValidationError("group element is not a Lie algebra automorphism: "
                                  "[g x, g y] != g [x, y]")


def construct_invariants_U(
    lie: GradedLieAlgebra,
    G: MatrixGroup,
    D: int | None = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
    verify_degree: int | None = None,
    verify: bool = True,
) -> PipelineResult:
    """Generators ``omega(f)`` of ``U(L)^G`` from generators ``f`` of ``S(L)^G``.

    ``G`` may act on ``L`` directly (validated as graded automorphisms) or,
    for ``L = L_p(V)``, on ``V``, in which case it is lifted.
    """
    GL = as_lie_group(G, lie)
    validate_lie_group(lie, GL)
    env = EnvelopingAlgebra(lie)
    D_used = D if D is not None else GL.order
    records = minimal_generators(GL, lie, D_used, max_weight=max_degree)
    gens = [PipelineGenerator(omega(env, rec.poly), rec, rec.f_degree) for rec in records]
    gens.sort(key=lambda g: g.f_degree)
    verification = None
    if verify:
        p = lie.max_degree
        d_max = verify_degree if verify_degree is not None else min(max(p, 1) * D_used, max_degree)
        cache = ActionCache(GL)
        if not verify_invariance(GL, [g.nc for g in gens], cache):
            raise AssertionError("constructed generator is not invariant")
        verification = verify_generation(GL, [g.nc for g in gens], d_max, arena=env, cache=cache)
    p = max(lie.max_degree, 1)
    result = PipelineResult(env, lie, gens, records, verification, BoundReport(0, 0, p), max_degree)
    result.bounds = bound_report(result, GL, p)
    return result


def gamma_images(rf: RelFreeContext, result_U: PipelineResult) -> list[NCPolynomial]:
    env = result_U.arena
    return [gamma(rf, env, g.nc) for g in result_U.generators]


def same_subalgebra(arena: Arena, a: Sequence[NCPolynomial], b: Sequence[NCPolynomial], d_max: int) -> list[bool]:
    """Degreewise equality of the subalgebras generated by ``a`` and ``b``."""
    A = subalgebra_echelons(arena, [f for f in a if f], d_max)
    B = subalgebra_echelons(arena, [f for f in b if f], d_max)
    return [A[d].rows == B[d].rows for d in range(1, d_max + 1)]
