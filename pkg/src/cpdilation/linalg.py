"""Dense complex linear-algebra primitives.

This is the only layer shared between the main algorithms and the independent
oracles. Rank decisions follow one rule everywhere: a PSD eigenvalue counts as
nonzero when it exceeds ``tol * lambda_max`` (or ``tol`` when everything is
tiny). Singular values are compared through their squares so that the rank of
a factor ``M`` and of its Gram matrix ``M M^dagger`` always agree.
"""

from __future__ import annotations

import numpy as np

from .config import TOL_RANK


def as_matrix(x, shape=None) -> np.ndarray:
    a = np.array(x, dtype=np.complex128)
    if shape is not None and a.shape != tuple(shape):
        a = a.reshape(shape)
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def block_diag(mats, dtype=np.complex128) -> np.ndarray:
    """Block-diagonal assembly that tolerates zero-size blocks."""
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=dtype)
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def rank_cutoff(values: np.ndarray, tol: float = TOL_RANK) -> float:
    """Threshold below which nonnegative spectral values are treated as zero."""
    top = float(np.max(values)) if values.size else 0.0
    return tol * (top if top > tol else 1.0)


def numerical_rank_psd(eigs: np.ndarray, tol: float = TOL_RANK) -> int:
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size == 0:
        return 0
    return int(np.sum(eigs > rank_cutoff(eigs, tol)))


def numerical_rank(m: np.ndarray, tol: float = TOL_RANK) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return numerical_rank_psd(s**2, tol)


def _canonical_phase(v: np.ndarray, tol: float) -> np.ndarray:
    mags = np.abs(v)
    idx = np.flatnonzero(mags > tol * max(mags.max(initial=0.0), 1.0))
    if idx.size == 0:
        return v
    c = v[idx[0]]
    return v * (abs(c) / c)


def _tie_key(v: np.ndarray, decimals: int = 10):
    r = np.round(v, decimals)
    return tuple((float(z.real), float(z.imag)) for z in r)


def psd_factor(c: np.ndarray, tol: float = TOL_RANK) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a Hermitian PSD matrix and keep the numerically nonzero part.

    Returns ``(eigenvalues, vectors)`` with eigenvalues descending and vectors
    as columns. Degenerate eigenvalues are ordered by comparing rounded
    components; each vector's first significant entry is real positive.
    """
    n = c.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    w, u = np.linalg.eigh(hermitian_part(c))
    keep = w > rank_cutoff(np.clip(w, 0.0, None), tol)
    w, u = w[keep], u[:, keep]
    cols = [_canonical_phase(u[:, k], 1e-8) for k in range(u.shape[1])]
    scale = max(float(w.max(initial=0.0)), 1e-300)
    order = sorted(
        range(len(cols)),
        key=lambda k: (-round(float(w[k]) / scale, 10), _tie_key(cols[k])),
    )
    w = w[order]
    u = np.stack([cols[k] for k in order], axis=1) if order else np.zeros((n, 0), np.complex128)
    return w, u


def range_basis(m: np.ndarray, tol: float = TOL_RANK) -> np.ndarray:
    """Orthonormal basis (as columns) for the numerical column space of ``m``."""
    rows = m.shape[0]
    if m.size == 0:
        return np.zeros((rows, 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank_psd(s**2, tol)
    return u[:, :r]


def null_space(m: np.ndarray, tol: float = TOL_RANK) -> np.ndarray:
    """Orthonormal basis (as columns) for the numerical kernel of ``m``."""
    cols = m.shape[1]
    if cols == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.complex128)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r = numerical_rank_psd(s**2, tol)
    return vh[r:].conj().T


def pinv(m: np.ndarray, tol: float = TOL_RANK) -> np.ndarray:
    """Pseudoinverse with the shared rank rule."""
    if m.size == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank_psd(s**2, tol)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix, negative roundoff clipped."""
    w, u = np.linalg.eigh(hermitian_part(a))
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


def inv_sqrt_psd(a: np.ndarray, tol: float = TOL_RANK) -> np.ndarray | None:
    """``a^{-1/2}`` for a positive definite matrix; ``None`` if numerically singular."""
    w, u = np.linalg.eigh(hermitian_part(a))
    if w.size and w.min() <= rank_cutoff(np.clip(w, 0.0, None), tol):
        return None
    return (u / np.sqrt(w)) @ u.conj().T


def min_eigenvalue(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(hermitian_part(a))[0])


def is_psd(a: np.ndarray, tol: float) -> bool:
    """Hermitian within ``tol`` and no eigenvalue below ``-tol * (norm + 1)``."""
    if a.size == 0:
        return True
    nrm = spectral_norm(a)
    if np.max(np.abs(a - a.conj().T)) > tol * (nrm + 1.0):
        return False
    return min_eigenvalue(a) >= -tol * (nrm + 1.0)
