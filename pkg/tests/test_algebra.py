import numpy as np
import pytest
from hypothesis import given

from cpdilation.algebra import (
    ZERO_ALGEBRA,
    Algebra,
    adjoint,
    is_positive,
    make_algebra,
    multiply,
    norm,
    unit,
)
from cpdilation.errors import InvalidInputError
from cpdilation.oracles import random_element

from conftest import algebras, seeds


def test_construction_examples():
    assert make_algebra([1]).blocks == (1,)
    assert make_algebra([2]).dim == 4
    assert make_algebra([1, 2]).dim == 5


@pytest.mark.parametrize("bad", [[], [0], [-1, 2], ["a"]])
def test_invalid_blocks(bad):
    with pytest.raises(InvalidInputError):
        make_algebra(bad)


def test_zero_algebra():
    assert ZERO_ALGEBRA.is_zero and ZERO_ALGEBRA.dim == 0
    assert ZERO_ALGEBRA.unit().to_vector().size == 0


def test_units():
    assert unit(Algebra((1,))) == Algebra((1,)).element([np.ones((1, 1))])
    x = unit(Algebra((1, 2)))
    assert np.array_equal(x.data[1], np.eye(2)) and np.array_equal(x.data[0], [[1]])


def test_norm_of_nilpotent():
    x = Algebra((2,)).element([np.array([[0, 2], [0, 0]])])
    assert norm(x) == pytest.approx(2.0)


def test_positivity_examples():
    alg = Algebra((2,))
    assert is_positive(alg.unit())
    assert not is_positive(alg.element([np.diag([1.0, -1.0])]))


def test_shape_mismatch():
    with pytest.raises(InvalidInputError):
        Algebra((2,)).element([np.eye(3)])
    with pytest.raises(InvalidInputError):
        Algebra((1, 2)).unit() + Algebra((2,)).unit()


def test_elements_are_immutable():
    x = Algebra((2,)).unit()
    with pytest.raises(ValueError):
        x.data[0][0, 0] = 5


@given(algebras(), seeds)
def test_star_algebra_laws(alg, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_element(alg, rng) for _ in range(3))
    assert multiply(unit(alg), x) == x
    assert adjoint(adjoint(x)) == x
    assert ((x @ y) @ z).allclose(x @ (y @ z), 1e-10)
    assert (x @ y).adjoint().allclose(y.adjoint() @ x.adjoint(), 1e-12)
    assert abs((x.adjoint() @ x).norm() - x.norm() ** 2) <= 1e-9 * (1 + x.norm() ** 2)
    assert is_positive(x.adjoint() @ x)


@given(algebras(), seeds)
def test_vector_round_trip(alg, seed):
    x = random_element(alg, seed)
    assert alg.from_vector(x.to_vector()) == x
    assert x.to_vector().size == alg.dim


@given(algebras())
def test_matrix_units_multiply(alg):
    labels = list(alg.basis())
    assert len(labels) == alg.dim
    for k, p, q in labels[:6]:
        for k2, p2, q2 in labels[:6]:
            prod = alg.matrix_unit(k, p, q) @ alg.matrix_unit(k2, p2, q2)
            expect = alg.matrix_unit(k, p, q2) if (k, q) == (k2, p2) else alg.zero()
            assert prod == expect
