import numpy as np
import pytest
from hypothesis import given

from cpdilation.acceptance import channel_counts, pad_representation
from cpdilation.algebra import Algebra
from cpdilation.bimodule import end_algebra
from cpdilation.cpmap import add_maps, cpmap_from_kraus, distance, is_completely_positive, is_unital
from cpdilation.dilation import dilate_minimal, reconstruct, standard_module
from cpdilation.errors import InvalidInputError, MustBeMinimalError, NoDecompositionError
from cpdilation.extremal import (
    decompose_nonextremal,
    extremality_map,
    is_extremal,
    is_pure_state,
    split_representations,
)
from cpdilation.linalg import null_space
from cpdilation.oracles import (
    amplitude_damping,
    choi_independence_oracle,
    conjugation,
    depolarizing,
    random_channel,
    random_cp_map,
    random_density,
    random_unitary,
    vector_state,
)

from conftest import algebras, modules, seeds

M2, C = Algebra((2,)), Algebra((1,))
X2 = standard_module(M2)


def test_extremality_map_examples(rng):
    rep = dilate_minimal(X2, X2, conjugation(M2, [random_unitary(2, rng)]))
    L = extremality_map(X2, X2, rep)
    assert L.shape == (4, 1) and np.linalg.matrix_rank(L) == 1
    f = depolarizing(2)
    rep = dilate_minimal(X2, X2, f)
    L = extremality_map(X2, X2, rep)
    ident = np.eye(4).reshape(-1)
    assert np.allclose(L @ ident, f.unit_image().to_vector())
    padded, _ = pad_representation(X2, rep, rng, max_extra=1)
    if padded.environment.mult != rep.environment.mult:
        with pytest.raises(MustBeMinimalError):
            extremality_map(X2, X2, padded)


def test_named_channels(rng):
    assert is_extremal(X2, X2, conjugation(M2, [random_unitary(2, rng)])).extremal
    report = is_extremal(X2, X2, depolarizing(2))
    assert not report.extremal and report.kernel_dimension > 0 and report.witness is not None
    for gamma in (0.1, 0.5, 0.9):
        assert is_extremal(X2, X2, amplitude_damping(gamma)).extremal
        assert choi_independence_oracle(amplitude_damping(gamma))


def _check_decomposition(X, Y, f):
    report = is_extremal(X, Y, f)
    assert not report.extremal
    plus, minus = decompose_nonextremal(X, Y, f, report)
    assert is_completely_positive(plus) and is_completely_positive(minus)
    assert plus.unit_image().allclose(report.K, 1e-8) and minus.unit_image().allclose(report.K, 1e-8)
    assert distance(plus, minus) > 1e-6
    assert distance(add_maps(plus, minus, 0.5, 0.5), f) <= 1e-10
    rp, rm = split_representations(X, Y, report)
    assert distance(reconstruct(X, Y, rp), plus) <= 1e-8
    assert distance(reconstruct(X, Y, rm), minus) <= 1e-8


def test_depolarizing_decomposes():
    _check_decomposition(X2, X2, depolarizing(2))
    assert is_unital(depolarizing(2))


def test_average_of_unitaries_decomposes(rng):
    u, v = random_unitary(2, rng), random_unitary(2, rng)
    f = add_maps(conjugation(M2, [u]), conjugation(M2, [v]), 0.5, 0.5)
    _check_decomposition(X2, X2, f)


def test_classical_bit_channel_decomposes():
    CC = Algebra((1, 1))
    P = np.array([[0.7, 0.3], [0.3, 0.7]])  # doubly stochastic, not a permutation
    f = cpmap_from_kraus(CC, CC, {(i, j): [np.array([[np.sqrt(P[j, i])]])] for i in range(2) for j in range(2)})
    assert is_unital(f)
    X = standard_module(CC)
    _check_decomposition(X, X, f)


def test_extremal_maps_do_not_decompose():
    f = amplitude_damping(0.5)
    report = is_extremal(X2, X2, f)
    with pytest.raises(NoDecompositionError):
        decompose_nonextremal(X2, X2, f, report)


@given(algebras(2, 3), algebras(2, 3), seeds)
def test_witness_generates_valid_split(A, B, seed):
    rng = np.random.default_rng(seed)
    f = random_channel(A, B, channel_counts(A, B, rng, 1, 2), rng)
    X, Y = standard_module(A), standard_module(B)
    report = is_extremal(X, Y, f)
    if report.extremal:
        return
    plus, minus = decompose_nonextremal(X, Y, f, report)
    assert is_completely_positive(plus) and is_completely_positive(minus)
    assert plus.unit_image().allclose(f.unit_image(), 1e-8)


@given(algebras(1, 3), algebras(1, 3), seeds)
def test_oracle_agreement_single_block(A, B, seed):
    n, m = A.blocks[0], B.blocks[0]
    t = int(np.random.default_rng(seed).integers(-(-m // n), n * m + 1))
    f = random_channel(A, B, t, seed)
    assert is_extremal(standard_module(A), standard_module(B), f).extremal == choi_independence_oracle(f)


@given(algebras(), seeds, modules())
def test_extremality_independent_of_generator(A, seed, _):
    f = random_cp_map(A, C, 1, seed)
    Y = standard_module(C)
    X_other = standard_module(Algebra(tuple(n + 1 for n in A.blocks)))
    X_other = type(X_other)(X_other.base, A.blocks)
    assert is_extremal(standard_module(A), Y, f).extremal == is_extremal(X_other, Y, f).extremal


# --- pure states -------------------------------------------------------------


def test_pure_state_examples(rng):
    psi = random_unitary(2, rng)[:, :1]
    assert is_pure_state(X2, vector_state(M2, [psi @ psi.conj().T])) == (True, (1,))
    assert is_pure_state(X2, vector_state(M2, [np.eye(2) / 2])) == (False, (2,))
    CM2 = Algebra((1, 2))
    state = vector_state(CM2, [np.ones((1, 1)), np.zeros((2, 2))])
    assert is_pure_state(standard_module(CM2), state) == (True, (1, 0))


@given(modules(Algebra((3,))), seeds)
def test_pure_iff_rank_one(X, seed):
    rng = np.random.default_rng(seed)
    for rank in (1, 2, 3):
        pure, env = is_pure_state(X, vector_state(Algebra((3,)), [random_density(3, rank, rng)]))
        assert pure == (rank == 1) and env == (rank,)


def test_pure_state_input_checks():
    with pytest.raises(InvalidInputError):
        is_pure_state(X2, depolarizing(2))
    with pytest.raises(InvalidInputError):
        is_pure_state(X2, vector_state(M2, [np.eye(2)]))


@given(algebras(2, 2), algebras(2, 2), seeds)
def test_kernel_is_closed_under_adjoint(A, B, seed):
    rng = np.random.default_rng(seed)
    f = random_channel(A, B, channel_counts(A, B, rng, 2, 3), rng)
    X, Y = standard_module(A), standard_module(B)
    rep = dilate_minimal(X, Y, f)
    L = extremality_map(X, Y, rep)
    end_e = end_algebra(rep.environment)
    for v in null_space(L).T:
        m = end_e.from_vector(v)
        assert np.linalg.norm(L @ m.adjoint().to_vector()) <= 1e-8
