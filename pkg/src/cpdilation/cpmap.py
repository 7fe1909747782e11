"""Linear maps between finite-dimensional algebras stored as block Choi matrices.

For ``f: A -> B`` with blocks ``a_i`` and ``b_j`` the component
``f_ij: M_{a_i} -> M_{b_j}`` is held as

    C_ij = sum_{p,q} E_pq (x) f_ij(E_pq)        (source factor first)

so ``f_ij(E_pq)`` is the ``(p, q)`` sub-block of ``C_ij`` of size ``b_j``.
Maps are in the Heisenberg picture: a channel is unital, and Kraus operators
``K: C^{a_i} -> C^{b_j}`` act as ``a -> K a K^dagger``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import Algebra, AlgebraElement
from .config import TOL_EQ, TOL_RANK
from .errors import InvalidInputError, NotCompletelyPositiveError
from .linalg import frozen, hermitian_part, min_eigenvalue, psd_factor, spectral_norm


@dataclass(frozen=True, eq=False)
class CPMap:
    """Linear map ``source -> target``; complete positivity is checked, not assumed."""

    source: Algebra
    target: Algebra
    choi: dict

    def __post_init__(self):
        if self.source.is_zero or self.target.is_zero:
            raise InvalidInputError("maps on the zero-dimensional algebra are not supported")
        fixed = {}
        for i, a in enumerate(self.source.blocks):
            for j, b in enumerate(self.target.blocks):
                c = self.choi.get((i, j))
                if c is None:
                    c = np.zeros((a * b, a * b))
                c = np.asarray(c)
                if c.shape != (a * b, a * b):
                    raise InvalidInputError(f"Choi block {(i, j)} has shape {c.shape}")
                fixed[(i, j)] = frozen(c)
        object.__setattr__(self, "choi", fixed)

    def keys(self):
        return list(self.choi)

    def component(self, i: int, j: int, p: int, q: int) -> np.ndarray:
        """``f_ij(E_pq)``."""
        b = self.target.blocks[j]
        return self.choi[(i, j)][p * b : (p + 1) * b, q * b : (q + 1) * b]

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return apply(self, a)

    def unit_image(self) -> AlgebraElement:
        return apply(self, self.source.unit())


def _check_images(B: Algebra, images):
    for im in images:
        if not isinstance(im, AlgebraElement) or im.parent != B:
            raise InvalidInputError("images must be elements of the target algebra")


def cpmap_from_action(A: Algebra, B: Algebra, images: Sequence[AlgebraElement]) -> CPMap:
    """Assemble Choi blocks from the images of the matrix units of ``A`` (canonical order)."""
    images = list(images)
    if len(images) != A.dim:
        raise InvalidInputError(f"expected {A.dim} images, got {len(images)}")
    _check_images(B, images)
    choi = {}
    it = iter(images)
    per_block = []
    for a in A.blocks:
        per_block.append([next(it) for _ in range(a * a)])
    for i, a in enumerate(A.blocks):
        for j, b in enumerate(B.blocks):
            c = np.zeros((a, b, a, b), dtype=np.complex128)
            for idx, im in enumerate(per_block[i]):
                p, q = divmod(idx, a)
                c[p, :, q, :] = im.data[j]
            choi[(i, j)] = c.reshape(a * b, a * b)
    return CPMap(A, B, choi)


def cpmap_from_function(A: Algebra, B: Algebra, fn: Callable[[AlgebraElement], AlgebraElement]) -> CPMap:
    return cpmap_from_action(A, B, [fn(A.matrix_unit(k, p, q)) for k, p, q in A.basis()])


def cpmap_from_kraus(A: Algebra, B: Algebra, kraus: dict) -> CPMap:
    """``f_ij(a) = sum_t K_t a K_t^dagger`` with each ``K_t`` of shape ``b_j x a_i``."""
    choi = {}
    for (i, j), ops in kraus.items():
        a, b = A.blocks[i], B.blocks[j]
        c = np.zeros((a * b, a * b), dtype=np.complex128)
        for K in ops:
            K = np.asarray(K, dtype=np.complex128)
            if K.shape != (b, a):
                raise InvalidInputError(f"Kraus operator for {(i, j)} has shape {K.shape}")
            v = K.T.reshape(-1)
            c += np.outer(v, v.conj())
        choi[(i, j)] = c
    return CPMap(A, B, choi)


def identity_map(A: Algebra) -> CPMap:
    return cpmap_from_kraus(A, A, {(i, i): [np.eye(n)] for i, n in enumerate(A.blocks)})


def zero_map(A: Algebra, B: Algebra) -> CPMap:
    return CPMap(A, B, {})


def apply(f: CPMap, a: AlgebraElement) -> AlgebraElement:
    if a.parent != f.source:
        raise InvalidInputError("element is not in the source algebra")
    out = []
    for j, b in enumerate(f.target.blocks):
        acc = np.zeros((b, b), dtype=np.complex128)
        for i, n in enumerate(f.source.blocks):
            c = f.choi[(i, j)].reshape(n, b, n, b)
            acc += np.einsum("pq,pxqy->xy", a.data[i], c)
        out.append(acc)
    return AlgebraElement(f.target, tuple(out))


def images(f: CPMap) -> list[AlgebraElement]:
    return [apply(f, f.source.matrix_unit(k, p, q)) for k, p, q in f.source.basis()]


def cp_violation(f: CPMap) -> tuple[tuple[int, int], float]:
    """Block with the most negative relative Choi eigenvalue and that eigenvalue."""
    worst, worst_key, worst_eig = np.inf, (0, 0), 0.0
    for key, c in f.choi.items():
        e = min_eigenvalue(c)
        rel = e / (1.0 + spectral_norm(c))
        if rel < worst:
            worst, worst_key, worst_eig = rel, key, e
    return worst_key, worst_eig


def is_completely_positive(f: CPMap, tol: float = TOL_EQ) -> bool:
    for c in f.choi.values():
        if c.size and np.max(np.abs(c - c.conj().T)) > tol * (1.0 + spectral_norm(c)):
            return False
        if min_eigenvalue(c) < -tol * (1.0 + spectral_norm(c)):
            return False
    return True


def require_cp(f: CPMap, tol: float = TOL_EQ):
    if not is_completely_positive(f, tol):
        key, eig = cp_violation(f)
        raise NotCompletelyPositiveError(key, eig)


def is_unital(f: CPMap, tol: float = TOL_EQ) -> bool:
    return (f.unit_image() - f.target.unit()).norm() <= tol


def kraus_decomposition(f: CPMap, tol: float = TOL_RANK, cp_tol: float = TOL_EQ) -> dict:
    """Minimal Kraus family per block, from the eigendecomposition of each Choi block.

    Operators are ordered by descending weight; the count equals the Choi rank.
    """
    require_cp(f, cp_tol)
    out = {}
    for (i, j), c in f.choi.items():
        a, b = f.source.blocks[i], f.target.blocks[j]
        w, u = psd_factor(c, tol)
        out[(i, j)] = [(np.sqrt(w[t]) * u[:, t]).reshape(a, b).T for t in range(len(w))]
    return out


def choi_ranks(f: CPMap, tol: float = TOL_RANK) -> np.ndarray:
    ranks = np.zeros((len(f.source), len(f.target)), dtype=np.int64)
    for (i, j), c in f.choi.items():
        ranks[i, j] = len(psd_factor(c, tol)[0])
    return ranks


def compose_cpmaps(f: CPMap, g: CPMap) -> CPMap:
    """``g o f``: apply ``f`` first."""
    if f.target != g.source:
        raise InvalidInputError("maps are not composable")
    return cpmap_from_action(f.source, g.target, [apply(g, im) for im in images(f)])


def add_maps(f: CPMap, g: CPMap, alpha: complex = 1.0, beta: complex = 1.0) -> CPMap:
    if f.source != g.source or f.target != g.target:
        raise InvalidInputError("maps have different types")
    return CPMap(f.source, f.target, {k: alpha * c + beta * g.choi[k] for k, c in f.choi.items()})


def distance(f: CPMap, g: CPMap) -> float:
    """Largest Frobenius norm of a Choi-block difference."""
    if f.source != g.source or f.target != g.target:
        raise InvalidInputError("maps have different types")
    return max(float(np.linalg.norm(c - g.choi[k])) for k, c in f.choi.items())


def is_multiplicative(f: CPMap, tol: float = TOL_EQ) -> bool:
    """Direct test for a unital *-homomorphism on matrix-unit products."""
    if not is_unital(f, tol):
        return False
    A = f.source
    labels = list(A.basis())
    ims = images(f)
    for x, (k1, p1, q1) in enumerate(labels):
        if not ims[x].adjoint().allclose(ims[labels.index((k1, q1, p1))], atol=tol):
            return False
        for y, (k2, p2, q2) in enumerate(labels):
            prod = ims[x] @ ims[y]
            if k1 == k2 and q1 == p2:
                expect = ims[labels.index((k1, p1, q2))]
            else:
                expect = f.target.zero()
            if not prod.allclose(expect, atol=tol):
                return False
    return True


def hermitian_choi(f: CPMap) -> CPMap:
    return CPMap(f.source, f.target, {k: hermitian_part(c) for k, c in f.choi.items()})
