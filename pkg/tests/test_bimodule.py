import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cpdilation.algebra import Algebra
from cpdilation.bimodule import (
    Bimodule,
    Intertwiner,
    IntertwinerKind,
    amplify,
    associator,
    classify_intertwiner,
    direct_sum,
    distributor,
    endomorphism_algebra,
    fuse,
    fuse_intertwiners,
    identity_bimodule,
    identity_intertwiner,
    make_bimodule,
    unitors,
)
from cpdilation.errors import InvalidInputError
from cpdilation.linalg import block_diag, null_space
from cpdilation.oracles import ginibre, random_element, random_unitary

from conftest import algebras, bimodules, seeds


def random_intertwiner(M, N, rng, hermitian=False):
    blocks = {}
    for i, j in M.keys():
        g = ginibre(rng, N.mult[i][j], M.mult[i][j])
        blocks[(i, j)] = g + g.conj().T if hermitian else g
    return Intertwiner(M, N, blocks)


@st.composite
def chains(draw, length, max_mult=2):
    algs = [draw(algebras(2, 2)) for _ in range(length + 1)]
    return [draw(bimodules(algs[k], algs[k + 1], max_mult)) for k in range(length)]


# --- construction ----------------------------------------------------------


def test_dimension_examples():
    C, M2 = Algebra((1,)), Algebra((2,))
    assert Bimodule(C, M2, ((1,),)).dim == 2
    assert Bimodule(M2, C, ((3,),)).dim == 6
    r = Algebra((1, 2))
    assert make_bimodule(r, r, np.eye(2, dtype=int)).dim == 5


def test_identity_bimodule_examples():
    assert identity_bimodule(Algebra((1,))).dim == 1
    assert identity_bimodule(Algebra((2,))).dim == 4


@pytest.mark.parametrize("mult", [[[1, 2]], [[-1]], [[0.5]]])
def test_invalid_multiplicities(mult):
    with pytest.raises(InvalidInputError):
        make_bimodule(Algebra((1,)), Algebra((2,)), mult)


def test_intertwiner_shape_is_checked():
    M = Bimodule(Algebra((1,)), Algebra((2,)), ((2,),))
    with pytest.raises(InvalidInputError):
        Intertwiner(M, M, {(0, 0): np.eye(3)})


# --- fusion ----------------------------------------------------------------


def test_fusion_examples():
    C, M2 = Algebra((1,)), Algebra((2,))
    r = Algebra((1, 2))
    assert fuse(Bimodule(C, r, ((1, 2),)), Bimodule(r, C, ((2,), (1,)))).mult == ((4,),)
    F = fuse(Bimodule(C, M2, ((2,),)), Bimodule(M2, C, ((3,),)))
    assert F.mult == ((6,),) and F.dim == 6
    with pytest.raises(InvalidInputError):
        fuse(Bimodule(C, M2, ((1,),)), Bimodule(C, C, ((1,),)))


@given(bimodules())
def test_fusion_with_identity(M):
    assert fuse(identity_bimodule(M.left), M).mult == M.mult
    assert fuse(M, identity_bimodule(M.right)).mult == M.mult


def _actions(M: Bimodule):
    """Right action of the right algebra on ``M`` and left action on ``M`` as matrices."""
    n, m = M.left.blocks, M.right.blocks

    def right(k, p, q):
        parts = []
        for i, j in M.keys():
            a = np.zeros((m[j], m[j]))
            if j == k:
                a[p, q] = 1.0
            # xi . a on the right factor acts as a^T on column vectors
            parts.append(np.kron(np.eye(n[i] * M.mult[i][j]), a.T))
        return block_diag(parts)

    def left(k, p, q):
        parts = []
        for i, j in M.keys():
            a = np.zeros((n[i], n[i]))
            if i == k:
                a[p, q] = 1.0
            parts.append(np.kron(a, np.eye(M.mult[i][j] * m[j])))
        return block_diag(parts)

    return left, right


def balanced_quotient(M: Bimodule, N: Bimodule) -> np.ndarray:
    """Orthonormal basis of the complement of ``span{xi a (x) eta - xi (x) a eta}``."""
    _, right_M = _actions(M)
    left_N, _ = _actions(N)
    rel = [
        np.kron(right_M(k, p, q), np.eye(N.dim)) - np.kron(np.eye(M.dim), left_N(k, p, q))
        for k, p, q in M.right.basis()
    ]
    # the complement of the relations' ranges is the joint kernel of their adjoints
    return null_space(np.vstack([r.conj().T for r in rel]), 1e-9)


@given(chains(2), seeds)
def test_fusion_matches_relative_tensor_product(chain, seed):
    M, N = chain
    assume(M.dim * N.dim <= 400)
    rng = np.random.default_rng(seed)
    Q = balanced_quotient(M, N)
    assert Q.shape[1] == fuse(M, N).dim
    f = random_intertwiner(M, M, rng, hermitian=True)
    g = random_intertwiner(N, N, rng, hermitian=True)
    induced = Q.conj().T @ np.kron(f.total_matrix(), g.total_matrix()) @ Q
    fused = fuse_intertwiners(f, g).total_matrix()
    assert np.allclose(np.linalg.eigvalsh(induced), np.linalg.eigvalsh(fused), atol=1e-8)


@given(chains(2), seeds)
def test_fuse_intertwiners_functorial(chain, seed):
    M, N = chain
    rng = np.random.default_rng(seed)
    f, f2 = random_intertwiner(M, M, rng), random_intertwiner(M, M, rng)
    g, g2 = random_intertwiner(N, N, rng), random_intertwiner(N, N, rng)
    assert fuse_intertwiners(identity_intertwiner(M), identity_intertwiner(N)) == identity_intertwiner(fuse(M, N))
    assert fuse_intertwiners(f, g).adjoint() == fuse_intertwiners(f.adjoint(), g.adjoint())
    lhs = fuse_intertwiners(f @ f2, g @ g2)
    rhs = fuse_intertwiners(f, g) @ fuse_intertwiners(f2, g2)
    assert lhs.max_abs_diff(rhs) <= 1e-10


@given(chains(2), seeds)
def test_isometries_fuse_to_isometries(chain, seed):
    M, N = chain
    rng = np.random.default_rng(seed)
    bigger = Bimodule(M.left, M.right, tuple(tuple(v + 1 for v in row) for row in M.mult))
    w = Intertwiner(M, bigger, {k: random_unitary(bigger.mult[k[0]][k[1]], rng)[:, : M.mult[k[0]][k[1]]] for k in M.keys()})
    assert classify_intertwiner(w) in (IntertwinerKind.ISOMETRY, IntertwinerKind.UNITARY)
    F = fuse_intertwiners(w, identity_intertwiner(N))
    assert (F.adjoint() @ F - identity_intertwiner(F.source)).norm() <= 1e-10


# --- coherence ---------------------------------------------------------------


@given(chains(4))
def test_pentagon(chain):
    M, N, O, P = chain
    lhs = associator(M, N, fuse(O, P)) @ associator(fuse(M, N), O, P)
    rhs = (
        fuse_intertwiners(identity_intertwiner(M), associator(N, O, P))
        @ associator(M, fuse(N, O), P)
        @ fuse_intertwiners(associator(M, N, O), identity_intertwiner(P))
    )
    assert lhs == rhs


@given(chains(2))
def test_triangle(chain):
    M, N = chain
    one = identity_bimodule(M.right)
    lhs = fuse_intertwiners(identity_intertwiner(M), unitors(N)[0]) @ associator(M, one, N)
    assert lhs == fuse_intertwiners(unitors(M)[1], identity_intertwiner(N))


@given(chains(3))
def test_associator_is_unitary_permutation(chain):
    A = associator(*chain)
    for g in A.blocks.values():
        assert set(np.unique(g)) <= {0.0, 1.0}
    assert A.adjoint() @ A == identity_intertwiner(A.source)
    assert A @ A.adjoint() == identity_intertwiner(A.target)


@given(chains(2))
def test_associator_with_identity_is_trivial(chain):
    M, N = chain
    for A in (
        associator(identity_bimodule(M.left), M, N),
        associator(M, identity_bimodule(M.right), N),
        associator(M, N, identity_bimodule(N.right)),
    ):
        assert all(np.array_equal(g, np.eye(g.shape[0])) for g in A.blocks.values())


@given(chains(3, max_mult=1))
def test_associator_identity_for_unique_paths(chain):
    """With 0/1 entries the associator is the identity whenever each block has one fusion path."""
    M, N, O = chain
    paths = np.einsum("ij,jk,kl->il", M.mult_array, N.mult_array, O.mult_array)
    assume(paths.max() <= 1)
    A = associator(M, N, O)
    assert all(np.array_equal(g, np.eye(g.shape[0])) for g in A.blocks.values())


def test_associator_not_identity_with_two_paths():
    r = Algebra((1, 1))
    C = Algebra((1,))
    M = Bimodule(C, r, ((1, 1),))
    N = Bimodule(r, r, ((1, 1), (1, 1)))
    O = Bimodule(r, C, ((1,), (1,)))
    A = associator(M, N, O)
    assert not np.array_equal(A.blocks[(0, 0)], np.eye(4))


@given(bimodules(), seeds)
def test_unitor_naturality(M, seed):
    rng = np.random.default_rng(seed)
    f = random_intertwiner(M, M, rng)
    lam, rho = unitors(M)
    one_l, one_r = identity_intertwiner(identity_bimodule(M.left)), identity_intertwiner(identity_bimodule(M.right))
    assert (lam @ fuse_intertwiners(one_l, f)).max_abs_diff(f @ lam) <= 1e-12
    assert (rho @ fuse_intertwiners(f, one_r)).max_abs_diff(f @ rho) <= 1e-12
    L2 = identity_bimodule(M.left)
    assert unitors(L2)[0] == identity_intertwiner(L2)


# --- direct sums -------------------------------------------------------------


def test_direct_sum_examples():
    C = Algebra((1,))
    M = Bimodule(C, C, ((1,),))
    single = direct_sum([M])
    assert single.total == M and single.injections[0] == identity_intertwiner(M)
    assert direct_sum([M, Bimodule(C, C, ((2,),))]).total.mult == ((3,),)


@given(chains(2), st.data())
def test_direct_sum_witness_and_distributivity(chain, data):
    M1, N = chain
    M2 = data.draw(bimodules(M1.left, M1.right))
    ds = direct_sum([M1, M2])
    w = ds.injections
    assert w[0].adjoint() @ w[0] == identity_intertwiner(M1)
    assert w[0] @ w[0].adjoint() + w[1] @ w[1].adjoint() == identity_intertwiner(ds.total)
    assert all(not np.any(g) for g in (w[0].adjoint() @ w[1]).blocks.values())
    D = distributor([M1, M2], N)
    target = direct_sum([fuse(M1, N), fuse(M2, N)])
    assert D.adjoint() @ D == identity_intertwiner(D.source)
    for wk, tk in zip(w, target.injections):
        assert D @ fuse_intertwiners(wk, identity_intertwiner(N)) == tk


# --- endomorphisms -----------------------------------------------------------


def test_endomorphism_examples():
    C, M2 = Algebra((1,)), Algebra((2,))
    assert endomorphism_algebra(Bimodule(C, M2, ((3,),))).algebra == Algebra((3,))
    assert endomorphism_algebra(identity_bimodule(Algebra((1, 2)))).algebra == Algebra((1, 1))
    X = Bimodule(C, M2, ((3,),))
    end = endomorphism_algebra(X)
    assert end.encode(end.algebra.unit()) == identity_intertwiner(X)


@given(bimodules(), seeds)
def test_endomorphisms_commute_with_actions(M, seed):
    assume(not M.is_zero)
    end = endomorphism_algebra(M)
    a = random_element(end.algebra, seed)
    T = end.encode(a).total_matrix()
    left, right = _actions(M)
    for k, p, q in list(M.left.basis())[:4]:
        assert np.allclose(T @ left(k, p, q), left(k, p, q) @ T)
    for k, p, q in list(M.right.basis())[:4]:
        assert np.allclose(T @ right(k, p, q), right(k, p, q) @ T)
    assert end.decode(end.encode(a)) == a


@given(chains(2), seeds)
def test_amplify(chain, seed):
    X, E = chain
    assume(not X.is_zero and not fuse(X, E).is_zero)
    end_x = endomorphism_algebra(X)
    end_xe = endomorphism_algebra(fuse(X, E))
    assert amplify(end_x.algebra.unit(), X, E) == end_xe.algebra.unit()
    a = random_element(end_x.algebra, seed)
    amp = amplify(a, X, E)
    assert end_xe.encode(amp) == fuse_intertwiners(end_x.encode(a), identity_intertwiner(E))
    if all(E.mult_array.sum(axis=1) > 0):
        assert amp.norm() == pytest.approx(a.norm())


def test_classify_examples():
    C = Algebra((1,))
    M1, M2 = Bimodule(C, C, ((1,),)), Bimodule(C, C, ((2,),))
    assert classify_intertwiner(identity_intertwiner(M2)) == IntertwinerKind.UNITARY
    assert classify_intertwiner(Intertwiner(M1, M2, {(0, 0): np.array([[1.0], [0.0]])})) == IntertwinerKind.ISOMETRY
    assert classify_intertwiner(Intertwiner(M2, M1, {(0, 0): np.array([[1.0, 0.0]])})) == IntertwinerKind.COISOMETRY
    assert classify_intertwiner(Intertwiner(M2, M2, {(0, 0): np.diag([1.0, 0.0])})) == IntertwinerKind.PARTIAL_ISOMETRY
    assert classify_intertwiner(Intertwiner(M2, M2, {(0, 0): np.diag([2.0, 0.0])})) == IntertwinerKind.GENERAL
