"""Seeded generators and brute-force oracles for cross-checking the main algorithms.

The oracles read raw Choi data and use only :mod:`cpdilation.linalg`; they
never call the dilation, extremality or CP-test code they are meant to check.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import Algebra, AlgebraElement
from .config import TOL_EQ, TOL_RANK
from .cpmap import CPMap
from .errors import GeneratorFailureError, InvalidInputError
from .linalg import inv_sqrt_psd, is_psd, numerical_rank, numerical_rank_psd

MAX_RESAMPLES = 100


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar unitary via QR with the phase fix on the diagonal of R."""
    rng = _rng(seed)
    q, r = np.linalg.qr(ginibre(rng, n, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def _counts(kraus_count, I: int, J: int) -> np.ndarray:
    counts = np.broadcast_to(np.asarray(kraus_count, dtype=np.int64), (I, J))
    if np.any(counts < 0):
        raise InvalidInputError("Kraus counts must be non-negative")
    return counts


def _choi_from_kraus(A: Algebra, B: Algebra, kraus: dict) -> CPMap:
    choi = {}
    for (i, j), ops in kraus.items():
        a, b = A.blocks[i], B.blocks[j]
        c = np.zeros((a * b, a * b), dtype=np.complex128)
        for K in ops:
            v = K.T.reshape(-1)
            c += np.outer(v, v.conj())
        choi[(i, j)] = c
    return CPMap(A, B, choi)


def random_kraus(source: Algebra, target: Algebra, kraus_count, seed=None) -> dict:
    rng = _rng(seed)
    counts = _counts(kraus_count, len(source), len(target))
    norm = np.sqrt(max(1, int(counts.sum())) * max(source.blocks))
    return {
        (i, j): [ginibre(rng, b, a) / norm for _ in range(counts[i, j])]
        for i, a in enumerate(source.blocks)
        for j, b in enumerate(target.blocks)
    }


def random_cp_map(source: Algebra, target: Algebra, kraus_count=2, seed=None) -> CPMap:
    """``a -> sum K a K^dagger`` with complex Gaussian Kraus operators per block pair."""
    return _choi_from_kraus(source, target, random_kraus(source, target, kraus_count, seed))


def random_channel(source: Algebra, target: Algebra, kraus_count=2, seed=None) -> CPMap:
    """Unital random CP map: ``K <- S_j^{-1/2} K`` with ``S_j = sum_{i,t} K K^dagger``."""
    rng = _rng(seed)
    for _ in range(MAX_RESAMPLES):
        kraus = random_kraus(source, target, kraus_count, rng)
        fixed, ok = {}, True
        for j, b in enumerate(target.blocks):
            S = np.zeros((b, b), dtype=np.complex128)
            for i in range(len(source)):
                for K in kraus[(i, j)]:
                    S += K @ K.conj().T
            T = inv_sqrt_psd(S)
            if T is None:
                ok = False
                break
            for i in range(len(source)):
                fixed[(i, j)] = [T @ K for K in kraus[(i, j)]]
        if ok:
            return _choi_from_kraus(source, target, fixed)
    raise GeneratorFailureError(
        f"could not draw a unital map {source.blocks}->{target.blocks} "
        f"with Kraus counts {kraus_count} in {MAX_RESAMPLES} attempts"
    )


def random_element(alg: Algebra, seed=None) -> AlgebraElement:
    rng = _rng(seed)
    return alg.element([ginibre(rng, n, n) for n in alg.blocks])


def random_density(n: int, rank: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    g = ginibre(rng, n, rank)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# --------------------------------------------------------------------------
# Named maps
# --------------------------------------------------------------------------


def conjugation(alg: Algebra, unitaries: Sequence[np.ndarray]) -> CPMap:
    """``a -> u^dagger a u`` blockwise."""
    return _choi_from_kraus(alg, alg, {(k, k): [np.asarray(u).conj().T] for k, u in enumerate(unitaries)})


def unital_embedding(source: Algebra, target: Algebra, mult, unitaries=None) -> CPMap:
    """``a -> W_j^dagger (sum_i a_i (x) 1_{c_ji}) W_j`` for a multiplicity matrix ``c``."""
    mult = np.asarray(mult, dtype=np.int64)
    if mult.shape != (len(target), len(source)):
        raise InvalidInputError("embedding multiplicities must be (target blocks) x (source blocks)")
    for j, b in enumerate(target.blocks):
        if int(mult[j] @ np.array(source.blocks)) != b:
            raise InvalidInputError(f"target block {j} has the wrong size for the embedding")
    kraus = {}
    for j, b in enumerate(target.blocks):
        W = np.eye(b) if unitaries is None else np.asarray(unitaries[j])
        row = 0
        for i, a in enumerate(source.blocks):
            ops = []
            for _ in range(mult[j, i]):
                # (W^dagger)[:, rows of this copy] maps C^a into C^b
                ops.append(W.conj().T[:, row : row + a])
                row += a
            kraus[(i, j)] = ops
    return _choi_from_kraus(source, target, kraus)


def depolarizing(n: int) -> CPMap:
    """``a -> tr(a) 1 / n`` on ``M_n``."""
    alg = Algebra((n,))
    ops = []
    for p in range(n):
        for q in range(n):
            K = np.zeros((n, n))
            K[q, p] = 1.0 / np.sqrt(n)
            ops.append(K)
    return _choi_from_kraus(alg, alg, {(0, 0): ops})


def amplitude_damping(gamma: float) -> CPMap:
    """Heisenberg-picture amplitude damping on ``M_2``."""
    A0 = np.diag([1.0, np.sqrt(1.0 - gamma)])
    A1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    alg = Algebra((2,))
    return _choi_from_kraus(alg, alg, {(0, 0): [A0.conj().T, A1.conj().T]})


def transpose_map(n: int) -> CPMap:
    """``a -> a^T``: positive but not completely positive."""
    alg = Algebra((n,))
    c = np.zeros((n, n, n, n))
    for p in range(n):
        for q in range(n):
            c[p, q, q, p] = 1.0
    return CPMap(alg, alg, {(0, 0): c.reshape(n * n, n * n)})


def vector_state(alg: Algebra, rho_blocks: Sequence[np.ndarray]) -> CPMap:
    """State ``a -> sum_i tr(rho_i a_i)``."""
    C = Algebra((1,))
    return CPMap(alg, C, {(i, 0): np.asarray(r).T for i, r in enumerate(rho_blocks)})


# --------------------------------------------------------------------------
# Oracles
# --------------------------------------------------------------------------


def choi_independence_oracle(f: CPMap, tol: float = TOL_RANK) -> bool:
    """Choi's criterion on a single block: extremal iff ``{L_t^dagger L_u}`` is independent.

    ``L_t`` are the Schroedinger-picture Kraus operators of the predual map,
    i.e. adjoints of the Heisenberg ones, so ``L_t^dagger L_u = K_t K_u^dagger``.
    """
    if len(f.source) != 1 or len(f.target) != 1:
        raise InvalidInputError("the Choi oracle handles single-block maps only")
    a, b = f.source.blocks[0], f.target.blocks[0]
    c = f.choi[(0, 0)]
    w, u = np.linalg.eigh(0.5 * (c + c.conj().T))
    r = numerical_rank_psd(np.clip(w, 0.0, None), tol)
    idx = np.argsort(w)[::-1][:r]
    heis = [(np.sqrt(w[k]) * u[:, k]).reshape(a, b).T for k in idx]
    schr = [K.conj().T for K in heis]
    vecs = np.stack([(Lt.conj().T @ Lu).reshape(-1) for Lt in schr for Lu in schr], axis=1)
    return numerical_rank(vecs, tol) == r * r


def gns_gram_oracle(f: CPMap) -> np.ndarray:
    """Gram matrix of ``<a1 (x) x1, a2 (x) x2> = <x1, f(a1^* a2) x2>_HS`` on ``r (.) L^2(s)``.

    Basis: matrix units ``E_pq`` of ``r`` times matrix units ``E_uv`` of ``s``,
    ``r``-index major. Only the Choi blocks of ``f`` are read.
    """
    r, s = f.source, f.target
    r_lab, s_lab = list(r.basis()), list(s.basis())
    ds = len(s_lab)
    G = np.zeros((len(r_lab) * ds, len(r_lab) * ds), dtype=np.complex128)
    for x, (i, p, q) in enumerate(r_lab):
        for y, (i2, p2, q2) in enumerate(r_lab):
            if i != i2 or p != p2:
                continue  # E_qp E_p2q2 = 0
            for z, (j, u, v) in enumerate(s_lab):
                b = s.blocks[j]
                c = f.choi[(i, j)]
                for w, (j2, u2, v2) in enumerate(s_lab):
                    if j != j2 or v != v2:
                        continue
                    # <E_uv, f(E_{q q2}) E_{u2 v}> = f(E_{q q2})[u, u2]
                    G[x * ds + z, y * ds + w] = c[q * b + u, q2 * b + u2]
    return G


def gram_is_psd(f: CPMap, tol: float = TOL_EQ) -> bool:
    return is_psd(gns_gram_oracle(f), tol)
