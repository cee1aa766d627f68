"""Quick built-in property checks behind ``ncinv selftest``.

The randomized checks draw small rational matrices from a seeded generator,
so a given seed always exercises the same inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebras import EnvelopingAlgebra, RelFreeContext, dim_F, dim_U, iota_terms, pi_S
from .groups import close
from .lie import free_nilpotent_lie, lyndon_words, witt
from .linalg import Matrix
from .pipeline import construct_invariants_F
from .polarize import SplitModule, gl_km_action
from .tensor import NCPolynomial


@dataclass(frozen=True)
class SelfTestResult:
    name: str
    ok: bool
    detail: str = ""


def _random_invertible(rng: random.Random, n: int) -> Matrix:
    while True:
        m = Matrix.from_rows([[str(Fraction(rng.randint(-3, 3), rng.randint(1, 2))) for _ in range(n)]
                              for _ in range(n)])
        if m.is_invertible():
            return m


def _random_poly(rng: random.Random, arena, n: int, d: int, terms: int = 4) -> NCPolynomial:
    t = {tuple(rng.randrange(n) for _ in range(d)): rng.randint(-2, 2) for _ in range(terms)}
    return NCPolynomial(arena, t)


def _structural() -> list[SelfTestResult]:
    out = []
    ok = all(len(lyndon_words(n, d)) == witt(n, d) for n in range(1, 4) for d in range(1, 7))
    out.append(SelfTestResult("lyndon words counted by Witt numbers (n<=3, d<=6)", ok))
    rf2 = RelFreeContext(2, 2, 4)
    ok = dim_F(rf2, 3) == 6 and all(dim_F(RelFreeContext(2, p, 4), d) == 2 ** d
                                    for p in (1, 2, 3) for d in range(p + 1))
    out.append(SelfTestResult("dim F(N_p, K^2) oracles", ok))
    env = EnvelopingAlgebra(free_nilpotent_lie(2, 2))
    out.append(SelfTestResult("dim U(L_2(K^2))_3 = 6", dim_U(env, 3) == 6))
    return out


def _randomized(rng: random.Random) -> list[SelfTestResult]:
    out = []
    lie = free_nilpotent_lie(2, 3)
    ok = True
    for _ in range(5):
        g, h = _random_invertible(rng, 2), _random_invertible(rng, 2)
        ok &= lie.lift(g @ h) == lie.lift(g) @ lie.lift(h) and lie.is_automorphism(lie.lift(g))
    out.append(SelfTestResult("lift to L_3(K^2) is a homomorphism into automorphisms", bool(ok)))

    split = SplitModule(1, 1, 2, 1)
    rf = RelFreeContext(split.dim, 2, 4)
    ok = True
    for _ in range(5):
        g, h = _random_invertible(rng, 2), _random_invertible(rng, 2)
        f1, f2 = _random_poly(rng, rf, split.dim, 2), _random_poly(rng, rf, split.dim, 1)
        ok &= gl_km_action(split, g, f1 * f2) == gl_km_action(split, g, f1) * gl_km_action(split, g, f2)
        ok &= gl_km_action(split, g, gl_km_action(split, h, f1)) == gl_km_action(split, g @ h, f1)
    out.append(SelfTestResult("GL(K^m) action is multiplicative and composes", bool(ok)))

    ok = True
    for _ in range(5):
        s = {tuple(sorted(rng.randrange(4) for _ in range(3))): rng.randint(1, 5) for _ in range(3)}
        merged: dict = {}
        for k, c in s.items():
            merged[k] = merged.get(k, 0) + c
        ok &= pi_S(iota_terms(merged)) == {k: c for k, c in merged.items() if c}
    out.append(SelfTestResult("symmetrization is a section of the commutative projection", bool(ok)))
    return out


def _pipeline() -> list[SelfTestResult]:
    G = close([[[-1, 0], [0, -1]]])
    res = construct_invariants_F(G, 2, 2, verify_degree=6)
    ok = res.verification.passed and len(res.generators) == 4 and res.bounds.beta_nc == 2
    return [SelfTestResult("{+-I}, p=2 pipeline passes through degree 6", ok,
                           f"{len(res.generators)} generators, beta_nc={res.bounds.beta_nc}")]


def run_selftest(seed: int = 0) -> list[SelfTestResult]:
    rng = random.Random(seed)
    return _structural() + _randomized(rng) + _pipeline()
