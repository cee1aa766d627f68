from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncinv.errors import ContextMismatch, NotALieElement, SingularMatrixError, ValidationError
from ncinv.lie import (
    FreeNilpotentLie,
    GradedLieAlgebra,
    LieElement,
    bracketing,
    free_nilpotent_lie,
    gl_action_lie,
    is_lyndon,
    lie_bracket,
    lyndon_words,
    project_to_lie,
    standard_factorization,
    witt,
)
from ncinv.linalg import Matrix, SparseEchelon
from ncinv.tensor import NCPolynomial, TensorAlgebra, commutator_terms


def brute_force_lyndon(n, d):
    return sorted(w for w in itertools.product(range(n), repeat=d)
                  if all(w < w[i:] + w[:i] for i in range(1, d)))


def random_element(rng, lie):
    return LieElement(lie, {k: rng.randint(-3, 3) for k in range(lie.dim)})


def random_invertible(rng, n):
    while True:
        g = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if g.is_invertible():
            return g


class TestLyndonWords:
    def test_examples(self):
        assert lyndon_words(2, 2) == ((0, 1),)
        assert lyndon_words(1, 2) == ()
        assert lyndon_words(2, 3) == ((0, 0, 1), (0, 1, 1))

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("d", range(1, 7))
    def test_count_is_witt_number(self, n, d):
        assert len(lyndon_words(n, d)) == witt(n, d)
        assert list(lyndon_words(n, d)) == brute_force_lyndon(n, d)

    def test_witt_values(self):
        assert [witt(3, 1), witt(2, 2), witt(2, 3)] == [3, 1, 2]
        assert [witt(2, d) for d in range(1, 7)] == [2, 1, 2, 3, 6, 9]

    def test_is_lyndon(self):
        assert is_lyndon((0, 0, 1)) and not is_lyndon((0, 1, 0)) and not is_lyndon((0, 0))

    def test_standard_factorization(self):
        assert standard_factorization((0, 0, 1)) == ((0,), (0, 1))
        assert standard_factorization((0, 1, 1)) == ((0, 1), (1,))
        u, v = standard_factorization((0, 0, 1, 0, 1))
        assert is_lyndon(u) and is_lyndon(v) and u + v == (0, 0, 1, 0, 1)


class TestBracketing:
    def test_examples(self):
        assert bracketing((0,)).terms == {(0,): 1}
        assert bracketing((0, 1)).terms == {(0, 1): 1, (1, 0): -1}
        assert bracketing((0, 0, 1)).terms == {(0, 0, 1): 1, (0, 1, 0): -2, (1, 0, 0): 1}

    @pytest.mark.parametrize("n,d", [(n, d) for n in (1, 2, 3) for d in range(1, 6) if n ** d <= 243])
    def test_images_independent(self, n, d):
        ech = SparseEchelon(bracketing(w, n).terms for w in lyndon_words(n, d))
        assert ech.rank == witt(n, d)

    def test_integer_coefficients(self):
        for w in lyndon_words(2, 5):
            assert all(c.denominator == 1 for c in bracketing(w).terms.values())


class TestProjection:
    def test_round_trip(self):
        lie = free_nilpotent_lie(2, 3)
        a = project_to_lie(lie, bracketing((0, 1)), 2)
        assert a.coeffs == {lie.index[(0, 1)]: 1}

    def test_symmetric_tensor_rejected(self):
        lie = free_nilpotent_lie(2, 2)
        with pytest.raises(NotALieElement):
            project_to_lie(lie, {(0, 1): 1, (1, 0): 1}, 2)

    def test_commutator_with_letter(self):
        lie = free_nilpotent_lie(2, 3)
        t = commutator_terms(bracketing((0, 1)).terms, {(0,): 1})
        assert project_to_lie(lie, t, 3).coeffs == {lie.index[(0, 0, 1)]: -1}


class TestStructure:
    def test_l2_examples(self):
        lie = free_nilpotent_lie(2, 2)
        x0, x1, z = (lie.basis_element(i) for i in range(3))
        assert lie_bracket(lie, x0, x1) == z
        assert not lie_bracket(lie, z, x0)

    def test_l3_example(self):
        lie = free_nilpotent_lie(2, 3)
        x0, z = lie.basis_element(0), lie.basis_element(lie.index[(0, 1)])
        assert lie_bracket(lie, x0, z) == lie.basis_element(lie.index[(0, 0, 1)])
        assert lie.to_tensor(lie_bracket(lie, x0, z)) == NCPolynomial(
            TensorAlgebra(2), commutator_terms({(0,): 1}, bracketing((0, 1)).terms))

    def test_basis_size_and_order(self):
        for n, p in [(2, 3), (3, 2), (3, 4)]:
            lie = free_nilpotent_lie(n, p)
            assert lie.dim == sum(witt(n, d) for d in range(1, p + 1))
            assert list(lie.words) == sorted(lie.words, key=lambda w: (len(w), w))

    @pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)])
    def test_antisymmetry_and_jacobi(self, n, p):
        lie = free_nilpotent_lie(n, p)
        lie.check_structure()
        rng = random.Random(n * 10 + p)
        for _ in range(4):
            a, b, c = (random_element(rng, lie) for _ in range(3))
            assert a.bracket(b) == -b.bracket(a)
            assert not (a.bracket(b).bracket(c) + b.bracket(c).bracket(a) + c.bracket(a).bracket(b))

    def test_context_mismatch(self):
        a = free_nilpotent_lie(2, 2).basis_element(0)
        b = free_nilpotent_lie(2, 3).basis_element(0)
        with pytest.raises(ContextMismatch):
            a.bracket(b)

    def test_invalid_table_rejected(self):
        # [b0, b1] = b2 with b2 in degree 1 breaks the grading
        with pytest.raises(ValidationError):
            GradedLieAlgebra([1, 1, 1], {(0, 1): {2: 1}})

    def test_json_round_trip(self):
        lie = free_nilpotent_lie(2, 3)
        other = GradedLieAlgebra.from_json(lie.to_json())
        assert other.table == lie.table and other.degrees == lie.degrees


class TestGLAction:
    def test_examples(self):
        lie = free_nilpotent_lie(2, 2)
        z = lie.basis_element(2)
        assert gl_action_lie(lie, Matrix.identity(2), z) == z
        assert gl_action_lie(lie, Matrix.from_rows([[-1, 0], [0, -1]]), z) == z
        assert gl_action_lie(lie, Matrix.from_rows([[0, 1], [1, 0]]), z) == -z

    def test_singular_rejected(self):
        lie = free_nilpotent_lie(2, 2)
        with pytest.raises(SingularMatrixError):
            gl_action_lie(lie, Matrix.from_rows([[1, 1], [1, 1]]), lie.basis_element(0))

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=15, deadline=None)
    def test_composition(self, seed):
        rng = random.Random(seed)
        lie = free_nilpotent_lie(2, 3)
        g, h = random_invertible(rng, 2), random_invertible(rng, 2)
        a = random_element(rng, lie)
        assert gl_action_lie(lie, g @ h, a) == gl_action_lie(lie, g, gl_action_lie(lie, h, a))
        assert lie.is_automorphism(lie.lift(g))
        assert lie.preserves_grading(lie.lift(g))
