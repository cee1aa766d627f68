from __future__ import annotations

import itertools
import random
from math import comb

import pytest

from ncinv.algebras import (
    EnvelopingAlgebra,
    RelFreeContext,
    dim_F,
    dim_S,
    dim_U,
    expand_brackets,
    gamma,
    iota_alpha,
    iota_terms,
    nc_multiply,
    nf_F,
    omega,
    pi_F,
    pi_S,
    straighten,
    tideal_component,
    words,
)
from ncinv.commutative import CommPolynomial, alphas_of_degree, monomials_alpha
from ncinv.errors import CapExceeded, ContextMismatch, ValidationError
from ncinv.lie import free_nilpotent_lie
from ncinv.linalg import ONE, Matrix, SparseEchelon, axpy
from ncinv.tensor import (
    NCPolynomial,
    TensorAlgebra,
    left_normed,
    linear_substitution_images,
    substitute_letters,
)


def env_of(n, p):
    return EnvelopingAlgebra(free_nilpotent_lie(n, p))


def random_terms(rng, n, d, count=3):
    return {tuple(rng.randrange(n) for _ in range(d)): rng.randint(-3, 3) or 1 for _ in range(count)}


def random_invertible(rng, n):
    while True:
        g = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if g.is_invertible():
            return g


def straighten_rightmost(lie, word):
    """Independent PBW rewriting that always swaps the rightmost descent."""
    todo = {tuple(word): ONE}
    done: dict = {}
    while todo:
        w, c = todo.popitem()
        k = next((i for i in reversed(range(len(w) - 1)) if w[i] > w[i + 1]), None)
        if k is None:
            axpy(done, c, {w: ONE})
            continue
        a, b = w[k], w[k + 1]
        for key, coef in [(w[:k] + (b, a) + w[k + 2:], ONE)] + [
            (w[:k] + (j,) + w[k + 2:], x) for j, x in lie.bracket_basis(a, b).items()
        ]:
            s = todo.get(key, 0) + c * coef
            if s:
                todo[key] = s
            else:
                todo.pop(key, None)
    return done


class TestMultiplication:
    def test_examples(self):
        T = TensorAlgebra(2)
        a = NCPolynomial(T, {(0, 1): 2, (1,): 1})
        assert nc_multiply(NCPolynomial.one(T), a) == a
        assert NCPolynomial(T, {(0,): 1}) * NCPolynomial(T, {(1,): 1}) == NCPolynomial(T, {(0, 1): 1})
        env = env_of(2, 2)
        assert env.generator(1) * env.generator(0) == NCPolynomial(env, {(0, 1): 1, (2,): -1})

    def test_arena_mismatch(self):
        with pytest.raises(ContextMismatch):
            NCPolynomial(TensorAlgebra(2), {(0,): 1}) * NCPolynomial(TensorAlgebra(3), {(0,): 1})

    @pytest.mark.parametrize("n,p", [(2, 1), (2, 2), (2, 3), (3, 2)])
    def test_associativity(self, n, p):
        rng = random.Random(7 * n + p)
        rf = RelFreeContext(n, p, 6)
        env = env_of(n, p)
        lie = env.lie
        for _ in range(3):
            a, b, c = (random_terms(rng, n, rng.randint(1, 2)) for _ in range(3))
            for arena in (TensorAlgebra(n), rf):
                x, y, z = (NCPolynomial(arena, t) for t in (a, b, c))
                assert (x * y) * z == x * (y * z)
            x, y, z = (NCPolynomial(env, {tuple(rng.randrange(lie.dim) for _ in range(2)): 1}) for _ in range(3))
            assert (x * y) * z == x * (y * z)


class TestStraighten:
    def test_examples(self):
        env = env_of(2, 2)
        assert straighten(env, (0, 1, 2)).terms == {(0, 1, 2): 1}
        assert straighten(env, (1, 0)).terms == {(0, 1): 1, (2,): -1}
        assert straighten(env, (2, 1, 0)).terms == {(0, 1, 2): 1, (2, 2): -1}

    @pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2)])
    def test_strategy_independent(self, n, p):
        env = env_of(n, p)
        lie = env.lie
        for word in itertools.product(range(lie.dim), repeat=3):
            assert env.straighten(word) == straighten_rightmost(lie, word)

    def test_output_is_pbw(self):
        env = env_of(2, 3)
        for word in itertools.product(range(env.lie.dim), repeat=3):
            assert all(list(k) == sorted(k) for k in env.straighten(word))


class TestRelativelyFree:
    def test_tideal_examples(self):
        assert tideal_component(RelFreeContext(2, 2), 2).dim == 0
        comp = tideal_component(RelFreeContext(2, 1), 2)
        assert comp.dim == 1 and [0, 1, -1, 0] in comp
        assert tideal_component(RelFreeContext(2, 2), 3).dim == 2

    def test_nf_examples(self):
        rf1, rf2 = RelFreeContext(2, 1), RelFreeContext(2, 2)
        t = NCPolynomial(TensorAlgebra(2), {(0, 1): 1, (1, 0): 1})
        assert nf_F(rf2, t).terms == t.terms
        assert not nf_F(rf1, {(0, 1): 1, (1, 0): -1})
        comm = left_normed([{(0,): ONE}, {(1,): ONE}, {(0,): ONE}])
        assert not nf_F(rf2, comm)

    def test_nf_checks_context(self):
        with pytest.raises(ContextMismatch):
            nf_F(RelFreeContext(2, 2), NCPolynomial(TensorAlgebra(3), {(2,): 1}))

    def test_degree_cap(self):
        with pytest.raises(CapExceeded):
            RelFreeContext(2, 2, max_degree=4).ideal(5)

    def test_dimensions(self):
        assert [dim_F(RelFreeContext(2, 2), d) for d in (1, 2, 3)] == [2, 4, 6]
        for n, p in [(1, 1), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3)]:
            rf = RelFreeContext(n, p)
            assert all(dim_F(rf, d) == n ** d for d in range(p + 1))

    def test_commutative_case(self):
        rf = RelFreeContext(2, 1)
        assert [dim_F(rf, d) for d in range(6)] == [1, 2, 3, 4, 5, 6]
        assert rf.basis(3) == ((0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1))

    @pytest.mark.parametrize("n,p", [(2, 1), (2, 2), (2, 3), (3, 2)])
    def test_commutator_identity_vanishes(self, n, p):
        rng = random.Random(n + 31 * p)
        rf = RelFreeContext(n, p, 6)
        for _ in range(3):
            args = [random_terms(rng, n, 1, 2) for _ in range(p + 1)]
            if rng.random() < 0.5:
                args[0] = random_terms(rng, n, 2, 2)
            assert not rf.normalize(left_normed(args))

    @pytest.mark.parametrize("n,p,d", [(2, 2, 3), (2, 2, 4), (2, 3, 4), (3, 2, 3)])
    def test_ideal_is_gl_stable(self, n, p, d):
        rng = random.Random(d)
        rf = RelFreeContext(n, p, 6)
        images = linear_substitution_images(random_invertible(rng, n), n)
        ideal = rf.ideal(d)
        assert all(substitute_letters(row, images) in ideal for row in ideal.basis())


class TestCanonicalMaps:
    def test_iota_examples(self):
        lie = free_nilpotent_lie(2, 2)
        assert iota_alpha(lie, CommPolynomial({(0,): 1})).terms == {(0,): 1}
        half = ONE / 2
        assert iota_alpha(lie, CommPolynomial({(0, 1): 1})).terms == {(0, 1): half, (1, 0): half}
        z = iota_alpha(lie, CommPolynomial({(2,): 1}))
        assert expand_brackets(lie, z).terms == {(0, 1): 1, (1, 0): -1}
        with pytest.raises(ValidationError):
            iota_alpha(lie, CommPolynomial({(0,): 1, (2,): 1}))

    def test_omega_examples(self):
        env = env_of(2, 2)
        assert omega(env, {(): 1}).terms == {(): 1}
        assert omega(env, CommPolynomial({(0, 1): 1})).terms == {(0, 1): 1, (2,): -ONE / 2}
        assert omega(env, CommPolynomial({(2,): 1})).terms == {(2,): 1}

    def test_pi_F_examples(self):
        lie = free_nilpotent_lie(2, 2)
        rf = RelFreeContext(2, 2)
        assert pi_F(rf, lie, {(0,): 1}).terms == {(0,): 1}
        img = pi_F(rf, lie, {(2,): 1})
        assert img.terms == {(0, 1): 1, (1, 0): -1} and img.degrees() == {2}
        assert pi_F(rf, lie, iota_alpha(lie, CommPolynomial({(0, 0): 1}))).terms == {(0, 0): 1}

    def test_gamma_examples(self):
        env, rf = env_of(2, 2), RelFreeContext(2, 2)
        assert gamma(rf, env, env.generator(0)).terms == {(0,): 1}
        assert gamma(rf, env, env.generator(2)).terms == {(0, 1): 1, (1, 0): -1}
        with pytest.raises(ContextMismatch):
            gamma(RelFreeContext(2, 3), env, env.generator(0))

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_gamma_omega_equals_pi_F_iota(self, p):
        rng = random.Random(p)
        lie = free_nilpotent_lie(2, p)
        env, rf = EnvelopingAlgebra(lie), RelFreeContext(2, p, 6)
        for d in range(1, 4):
            for alpha in alphas_of_degree(p, d):
                monos = monomials_alpha(lie, alpha)
                if not monos or sum((i + 1) * a for i, a in enumerate(alpha)) > 6:
                    continue
                s = CommPolynomial({m: rng.randint(-3, 3) for m in rng.sample(monos, min(3, len(monos)))})
                assert gamma(rf, env, omega(env, s)) == pi_F(rf, lie, iota_alpha(lie, s))

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_pi_S_inverts_iota(self, p):
        lie = free_nilpotent_lie(2, p)
        for d in range(1, 4):
            for alpha in alphas_of_degree(p, d):
                if sum((i + 1) * a for i, a in enumerate(alpha)) > 5:
                    continue
                for m in monomials_alpha(lie, alpha):
                    assert pi_S(iota_alpha(lie, CommPolynomial({m: 3}))) == {m: 3}

    def test_equivariance(self):
        rng = random.Random(3)
        lie = free_nilpotent_lie(2, 3)
        env, rf = EnvelopingAlgebra(lie), RelFreeContext(2, 3, 6)
        for _ in range(3):
            g = random_invertible(rng, 2)
            G_L = lie.lift(g)
            lie_images = linear_substitution_images(G_L, lie.dim)
            v_images = linear_substitution_images(g, 2)
            t = {tuple(rng.randrange(lie.dim) for _ in range(2)): rng.randint(1, 3) for _ in range(3)}
            lhs = pi_F(rf, lie, substitute_letters(t, lie_images))
            rhs = rf.normalize(substitute_letters(pi_F(rf, lie, t).terms, v_images))
            assert lhs.terms == rhs
            s = {tuple(sorted(k)): c for k, c in t.items()}
            g_s = {}
            for k, c in substitute_letters(s, lie_images).items():
                axpy(g_s, c, {tuple(sorted(k)): ONE})
            assert omega(env, g_s).terms == env.normalize(substitute_letters(omega(env, s).terms, lie_images))


class TestEnvelopingDimensions:
    def test_examples(self):
        env = env_of(2, 2)
        assert dim_U(env, 3) == 6 == len(env.basis(3))
        assert [dim_U(env, d) for d in range(7)] == [1, 2, 4, 6, 9, 12, 16]

    @pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2)])
    def test_generating_function_matches_enumeration(self, n, p):
        env = env_of(n, p)
        assert all(dim_U(env, d) == len(env.basis(d)) == dim_S(env.lie, d) for d in range(7))

    @pytest.mark.parametrize("n,p", [(2, 2), (2, 3)])
    def test_omega_injective_on_top_parts(self, n, p):
        env = env_of(n, p)
        lie = env.lie
        for d in range(1, 5):
            monos = list(itertools.combinations_with_replacement(range(lie.dim), d))
            tops = SparseEchelon()
            for m in monos:
                top = {k: c for k, c in omega(env, {m: 1}).terms.items() if len(k) == d}
                assert top == {m: 1}
                tops.add(top)
            assert tops.rank == len(monos)

    @pytest.mark.parametrize("n,p", [(2, 2), (2, 3)])
    def test_filtration_quotients_match_symmetric_powers(self, n, p):
        env = env_of(n, p)
        lie = env.lie
        prev = 0
        for d in range(0, 5):
            span = SparseEchelon()
            for k in range(d + 1):
                for w in itertools.product(range(lie.dim), repeat=k):
                    span.add(env.straighten(w))
            assert span.rank - prev == comb(lie.dim + d - 1, d)
            prev = span.rank

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_gamma_surjective(self, p):
        env, rf = env_of(2, p), RelFreeContext(2, p, 6)
        for d in range(1, 6):
            ech = SparseEchelon(gamma(rf, env, NCPolynomial(env, {k: 1}, normalized=True)).terms
                                for k in env.basis(d))
            assert ech.rank == dim_F(rf, d)
            assert len(words(2, d)) >= ech.rank
