"""Standard-form bimodules, intertwiners, Connes fusion and its coherence data.

A bimodule between ``r = (n_1..n_I)`` and ``s = (m_1..m_J)`` is a multiplicity
matrix ``mu``; its Hilbert space is

    H = sum_{(i,j)} C^{n_i} (x) C^{mu_ij} (x) C^{m_j}

with blocks in lexicographic ``(i, j)`` order and each block flattened left
factor first, then multiplicity, then right factor. An intertwiner is one
multiplicity matrix ``g_ij`` per block, acting as ``id (x) g_ij (x) id``.

Fusion over the middle algebra multiplies multiplicity matrices. The
multiplicity space of ``M (x) N`` at ``(i, k)`` is ``sum_j C^{mu_ij} (x)
C^{nu_jk}`` with ``j`` ascending and each term flattened ``mu``-major. Every
structural unitary below is the permutation forced by this convention.

Partial isometries are detected through ``f^dagger f`` being idempotent; since
``f^dagger f`` is self-adjoint this is the same as being a projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .algebra import ZERO_ALGEBRA, Algebra, AlgebraElement
from .errors import InvalidInputError
from .linalg import block_diag, frozen, spectral_norm

Key = tuple[int, int]


@dataclass(frozen=True)
class Bimodule:
    left: Algebra
    right: Algebra
    mult: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.mult)
        if len(rows) != len(self.left.blocks) or any(len(r) != len(self.right.blocks) for r in rows):
            raise InvalidInputError(
                f"multiplicity matrix shape does not match "
                f"{len(self.left.blocks)}x{len(self.right.blocks)}"
            )
        if any(v < 0 for r in rows for v in r):
            raise InvalidInputError("multiplicities must be non-negative")
        object.__setattr__(self, "mult", rows)

    @property
    def mult_array(self) -> np.ndarray:
        return np.array(self.mult, dtype=np.int64).reshape(len(self.left), len(self.right))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.left), len(self.right)

    def keys(self) -> list[Key]:
        return [(i, j) for i in range(len(self.left)) for j in range(len(self.right))]

    @property
    def dim(self) -> int:
        return sum(
            n * self.mult[i][j] * m
            for i, n in enumerate(self.left.blocks)
            for j, m in enumerate(self.right.blocks)
        )

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for r in self.mult for v in r)


def make_bimodule(left: Algebra, right: Algebra, mult) -> Bimodule:
    mult = np.asarray(mult)
    if mult.ndim != 2:
        raise InvalidInputError("multiplicity matrix must be two-dimensional")
    if np.any(mult != np.round(mult)):
        raise InvalidInputError("multiplicities must be integers")
    return Bimodule(left, right, tuple(tuple(int(v) for v in row) for row in mult))


def identity_bimodule(alg: Algebra) -> Bimodule:
    """The standard form ``L^2(r)`` as an ``r, r``-bimodule."""
    k = len(alg)
    return Bimodule(alg, alg, tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))


@dataclass(frozen=True, eq=False)
class Intertwiner:
    source: Bimodule
    target: Bimodule
    blocks: dict

    def __post_init__(self):
        s, t = self.source, self.target
        if s.left != t.left or s.right != t.right:
            raise InvalidInputError("source and target must share both algebras")
        fixed = {}
        for i, j in s.keys():
            shape = (t.mult[i][j], s.mult[i][j])
            g = self.blocks.get((i, j))
            if g is None:
                g = np.zeros(shape)
            g = np.asarray(g)
            if g.shape != shape:
                raise InvalidInputError(f"block {(i, j)} has shape {g.shape}, expected {shape}")
            fixed[(i, j)] = frozen(g)
        object.__setattr__(self, "blocks", fixed)

    def __matmul__(self, other: "Intertwiner") -> "Intertwiner":
        if other.target != self.source:
            raise InvalidInputError("intertwiners are not composable")
        return Intertwiner(
            other.source, self.target, {k: self.blocks[k] @ other.blocks[k] for k in self.blocks}
        )

    def adjoint(self) -> "Intertwiner":
        return Intertwiner(self.target, self.source, {k: g.conj().T for k, g in self.blocks.items()})

    @property
    def H(self) -> "Intertwiner":
        return self.adjoint()

    def _same_type(self, other: "Intertwiner"):
        if other.source != self.source or other.target != self.target:
            raise InvalidInputError("intertwiners have different types")

    def __add__(self, other):
        self._same_type(other)
        return Intertwiner(self.source, self.target, {k: g + other.blocks[k] for k, g in self.blocks.items()})

    def __sub__(self, other):
        self._same_type(other)
        return Intertwiner(self.source, self.target, {k: g - other.blocks[k] for k, g in self.blocks.items()})

    def __mul__(self, scalar):
        return Intertwiner(self.source, self.target, {k: scalar * g for k, g in self.blocks.items()})

    __rmul__ = __mul__

    def norm(self) -> float:
        return max((spectral_norm(g) for g in self.blocks.values()), default=0.0)

    def max_abs_diff(self, other: "Intertwiner") -> float:
        self._same_type(other)
        return max(
            (float(np.max(np.abs(g - other.blocks[k]))) for k, g in self.blocks.items() if g.size),
            default=0.0,
        )

    def __eq__(self, other):
        if not isinstance(other, Intertwiner):
            return NotImplemented
        return (
            other.source == self.source
            and other.target == self.target
            and all(np.array_equal(g, other.blocks[k]) for k, g in self.blocks.items())
        )

    __hash__ = None

    def total_matrix(self) -> np.ndarray:
        """Matrix of the map on the full Hilbert spaces."""
        n, m = self.source.left.blocks, self.source.right.blocks
        parts = [
            np.kron(np.kron(np.eye(n[i]), self.blocks[(i, j)]), np.eye(m[j]))
            for i, j in self.source.keys()
        ]
        return block_diag(parts)


def identity_intertwiner(M: Bimodule) -> Intertwiner:
    return Intertwiner(M, M, {(i, j): np.eye(M.mult[i][j]) for i, j in M.keys()})


def zero_intertwiner(M: Bimodule, N: Bimodule) -> Intertwiner:
    return Intertwiner(M, N, {})


class IntertwinerKind(str, Enum):
    GENERAL = "general"
    PARTIAL_ISOMETRY = "partial_isometry"
    ISOMETRY = "isometry"
    COISOMETRY = "coisometry"
    UNITARY = "unitary"


def classify_intertwiner(f: Intertwiner, tol: float = 1e-8) -> IntertwinerKind:
    ftf = f.adjoint() @ f
    fft = f @ f.adjoint()
    iso = (ftf - identity_intertwiner(f.source)).norm() <= tol
    coiso = (fft - identity_intertwiner(f.target)).norm() <= tol
    if iso and coiso:
        return IntertwinerKind.UNITARY
    if iso:
        return IntertwinerKind.ISOMETRY
    if coiso:
        return IntertwinerKind.COISOMETRY
    if (ftf @ ftf - ftf).norm() <= tol:
        return IntertwinerKind.PARTIAL_ISOMETRY
    return IntertwinerKind.GENERAL


# --------------------------------------------------------------------------
# Connes fusion
# --------------------------------------------------------------------------


def _check_composable(M: Bimodule, N: Bimodule):
    if M.right != N.left:
        raise InvalidInputError(
            f"cannot fuse over different middle algebras {M.right.blocks} and {N.left.blocks}"
        )


def fuse(M: Bimodule, N: Bimodule) -> Bimodule:
    _check_composable(M, N)
    mult = M.mult_array @ N.mult_array
    return Bimodule(M.left, N.right, tuple(tuple(int(v) for v in row) for row in mult))


def fuse_intertwiners(f: Intertwiner, g: Intertwiner) -> Intertwiner:
    """``f (x) g`` on ``fuse(f.source, g.source) -> fuse(f.target, g.target)``."""
    _check_composable(f.source, g.source)
    source = fuse(f.source, g.source)
    target = fuse(f.target, g.target)
    J = len(f.source.right)
    blocks = {
        (i, k): block_diag([np.kron(f.blocks[(i, j)], g.blocks[(j, k)]) for j in range(J)])
        for i, k in source.keys()
    }
    return Intertwiner(source, target, blocks)


def _permutation(source_labels: list, target_labels: list) -> np.ndarray:
    pos = {lab: t for t, lab in enumerate(target_labels)}
    P = np.zeros((len(target_labels), len(source_labels)))
    for s, lab in enumerate(source_labels):
        P[pos[lab], s] = 1.0
    return P


def associator(M: Bimodule, N: Bimodule, O: Bimodule) -> Intertwiner:
    """Unitary ``(M (x) N) (x) O -> M (x) (N (x) O)`` re-nesting the fusion sums."""
    _check_composable(M, N)
    _check_composable(N, O)
    mu, nu, om = M.mult_array, N.mult_array, O.mult_array
    J, K = nu.shape
    source, target = fuse(fuse(M, N), O), fuse(M, fuse(N, O))
    blocks = {}
    for i, l in source.keys():
        # ((MN)O)_il = sum_k [sum_j mu_ij nu_jk] o_kl
        src = [
            (j, k, a, b, c)
            for k in range(K)
            for j in range(J)
            for a in range(mu[i, j])
            for b in range(nu[j, k])
            for c in range(om[k, l])
        ]
        # (M(NO))_il = sum_j mu_ij [sum_k nu_jk o_kl]
        tgt = [
            (j, k, a, b, c)
            for j in range(J)
            for a in range(mu[i, j])
            for k in range(K)
            for b in range(nu[j, k])
            for c in range(om[k, l])
        ]
        blocks[(i, l)] = _permutation(src, tgt)
    return Intertwiner(source, target, blocks)


def unitors(M: Bimodule) -> tuple[Intertwiner, Intertwiner]:
    """Left and right unitors ``L^2(r) (x) M -> M`` and ``M (x) L^2(s) -> M``."""
    lam_src = fuse(identity_bimodule(M.left), M)
    rho_src = fuse(M, identity_bimodule(M.right))
    lam = Intertwiner(lam_src, M, {k: np.eye(M.mult[k[0]][k[1]]) for k in M.keys()})
    rho = Intertwiner(rho_src, M, {k: np.eye(M.mult[k[0]][k[1]]) for k in M.keys()})
    return lam, rho


# --------------------------------------------------------------------------
# Direct sums
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DirectSumWitness:
    summands: tuple[Bimodule, ...]
    total: Bimodule
    injections: tuple[Intertwiner, ...]


def direct_sum(summands: Sequence[Bimodule]) -> DirectSumWitness:
    summands = tuple(summands)
    if not summands:
        raise InvalidInputError("direct sum of an empty family")
    left, right = summands[0].left, summands[0].right
    if any(S.left != left or S.right != right for S in summands):
        raise InvalidInputError("summands must share left and right algebras")
    mult = sum(S.mult_array for S in summands)
    total = Bimodule(left, right, tuple(tuple(int(v) for v in row) for row in mult))
    injections = []
    offset = np.zeros_like(mult)
    for S in summands:
        blocks = {}
        for i, j in S.keys():
            w = np.zeros((mult[i, j], S.mult[i][j]))
            o = offset[i, j]
            w[o : o + S.mult[i][j], :] = np.eye(S.mult[i][j])
            blocks[(i, j)] = w
        offset = offset + S.mult_array
        injections.append(Intertwiner(S, total, blocks))
    return DirectSumWitness(summands, total, tuple(injections))


def distributor(summands: Sequence[Bimodule], N: Bimodule) -> Intertwiner:
    """Unitary ``(sum_s M_s) (x) N -> sum_s (M_s (x) N)``."""
    summands = tuple(summands)
    ds = direct_sum(summands)
    _check_composable(ds.total, N)
    source = fuse(ds.total, N)
    target = direct_sum([fuse(S, N) for S in summands]).total
    nu = N.mult_array
    mus = [S.mult_array for S in summands]
    J = nu.shape[0]
    blocks = {}
    for i, l in source.keys():
        src = [
            (s, j, a, b)
            for j in range(J)
            for s, mu in enumerate(mus)
            for a in range(mu[i, j])
            for b in range(nu[j, l])
        ]
        tgt = [
            (s, j, a, b)
            for s, mu in enumerate(mus)
            for j in range(J)
            for a in range(mu[i, j])
            for b in range(nu[j, l])
        ]
        blocks[(i, l)] = _permutation(src, tgt)
    return Intertwiner(source, target, blocks)


# --------------------------------------------------------------------------
# Endomorphism algebras
# --------------------------------------------------------------------------


def end_keys(X: Bimodule) -> list[Key]:
    return [(i, j) for i, j in X.keys() if X.mult[i][j] >= 1]


class EndomorphismAlgebra(NamedTuple):
    algebra: Algebra
    encode: Callable[[AlgebraElement], Intertwiner]
    decode: Callable[[Intertwiner], AlgebraElement]


def end_algebra(X: Bimodule) -> Algebra:
    keys = end_keys(X)
    if not keys:
        return ZERO_ALGEBRA
    return Algebra(tuple(X.mult[i][j] for i, j in keys))


def endomorphism_algebra(X: Bimodule) -> EndomorphismAlgebra:
    """``End(X)`` with blocks ``mu_ij >= 1`` in lexicographic order.

    A zero bimodule gets the zero-dimensional algebra; its encode/decode only
    accept the empty element.
    """
    alg = end_algebra(X)
    keys = end_keys(X)

    def encode(a: AlgebraElement) -> Intertwiner:
        if a.parent != alg:
            raise InvalidInputError("element is not in this endomorphism algebra")
        return Intertwiner(X, X, dict(zip(keys, a.data)))

    def decode(t: Intertwiner) -> AlgebraElement:
        if t.source != X or t.target != X:
            raise InvalidInputError("intertwiner is not an endomorphism of this bimodule")
        return AlgebraElement(alg, tuple(t.blocks[k] for k in keys))

    return EndomorphismAlgebra(alg, encode, decode)


def amplify(a: AlgebraElement, X: Bimodule, E: Bimodule) -> AlgebraElement:
    """``a (x) id_E`` as an element of ``End(X (x) E)``."""
    if a.parent != end_algebra(X):
        raise InvalidInputError("element does not belong to End(X)")
    _check_composable(X, E)
    XE = fuse(X, E)
    blocks = dict(zip(end_keys(X), a.data))
    J = len(X.right)
    out = []
    for i, k in end_keys(XE):
        parts = []
        for j in range(J):
            if X.mult[i][j] and E.mult[j][k]:
                parts.append(np.kron(blocks[(i, j)], np.eye(E.mult[j][k])))
        out.append(block_diag(parts))
    return AlgebraElement(end_algebra(XE), tuple(out))
