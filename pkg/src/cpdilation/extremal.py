"""Extremality of CP maps with a fixed unit image ``K = f(1)``.

A map is extremal in the convex set of CP maps with ``f(1) = K`` iff the
linear map ``m -> V^dagger (id_X (x) m) V`` on ``End(E)`` is injective for the
minimal representation ``(E, V)``. A nonzero kernel element ``m`` (taken
Hermitian and of norm one) splits ``f`` into ``f(a) +- V^dagger (a (x) m) V``.

Testing ``id_X (x) m`` suffices: if ``V^dagger (id (x) m) V = 0`` for a
Hermitian ``m`` the decomposition argument forces ``V^dagger (a (x) m) V = 0``
for every ``a``, so the two forms of the criterion coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement
from .bimodule import end_algebra, end_keys
from .config import TOL_EQ, TOL_RANK
from .cpmap import CPMap, add_maps, is_completely_positive, is_unital
from .dilation import (
    C_ALGEBRA,
    GeneratingModule,
    Representation,
    assemble_V,
    dilate_minimal,
    is_minimal,
    split_V,
)
from .errors import (
    InvalidInputError,
    MustBeMinimalError,
    NoDecompositionError,
    NumericalError,
)
from .linalg import null_space, psd_sqrt


@dataclass(frozen=True, eq=False)
class ExtremalityReport:
    cp_map: CPMap
    K: AlgebraElement
    kernel_dimension: int
    witness: AlgebraElement | None
    extremal: bool
    representation: Representation


def _env_blocks(rep: Representation, m: AlgebraElement) -> dict:
    E = rep.environment
    blocks = {k: np.zeros((E.mult[k[0]][k[1]],) * 2) for k in E.keys()}
    blocks.update(zip(end_keys(E), m.data))
    return blocks


def extremality_map(
    X: GeneratingModule, Y: GeneratingModule, rep: Representation, tol: float = TOL_RANK
) -> np.ndarray:
    """Matrix of ``m -> V^dagger (id_X (x) m) V`` from ``End(E)`` to ``End(Y)``.

    Columns follow the matrix units of ``End(E)``; rows follow
    ``AlgebraElement.to_vector`` on ``End(Y)``.
    """
    if not is_minimal(X, rep, tol):
        raise MustBeMinimalError("the extremality criterion needs a minimal representation")
    E = rep.environment
    parts = split_V(X, rep)
    keys = end_keys(E)
    end_e = end_algebra(E)
    y_off = np.cumsum([0] + [y * y for y in Y.mult])
    L = np.zeros((int(y_off[-1]), end_e.dim), dtype=np.complex128)
    col = 0
    for (i, j) in keys:
        Vij = parts[(i, j)]
        e = Vij.shape[1]
        # L(E_tu)_j = sum_p V[p,t,:]^dagger V[p,u,:]
        img = np.einsum("pty,puz->tuyz", Vij.conj(), Vij).reshape(e * e, -1)
        L[y_off[j] : y_off[j + 1], col : col + e * e] = img.T
        col += e * e
    return L


def _hermitian_witness(m0: AlgebraElement) -> AlgebraElement:
    h1 = m0 + m0.adjoint()
    h2 = 1j * (m0 - m0.adjoint())
    h = h1 if h1.norm() >= h2.norm() else h2
    return (1.0 / h.norm()) * h


def is_extremal(
    X: GeneratingModule, Y: GeneratingModule, f: CPMap, tol: float = TOL_RANK, cp_tol: float = TOL_EQ
) -> ExtremalityReport:
    rep = dilate_minimal(X, Y, f, tol, cp_tol)
    L = extremality_map(X, Y, rep, tol)
    kernel = null_space(L, tol)
    dim = kernel.shape[1]
    witness = None
    if dim:
        m0 = end_algebra(rep.environment).from_vector(kernel[:, 0])
        witness = _hermitian_witness(m0)
    return ExtremalityReport(f, f.unit_image(), dim, witness, dim == 0, rep)


def perturbation(X: GeneratingModule, Y: GeneratingModule, rep: Representation, m: AlgebraElement) -> CPMap:
    """The map ``a -> V^dagger (a (x) m) V``."""
    blocks = _env_blocks(rep, m)
    choi = {}
    for (i, j), Vij in split_V(X, rep).items():
        x, _, y = Vij.shape
        choi[(i, j)] = np.einsum("pty,tu,quz->pyqz", Vij.conj(), blocks[(i, j)], Vij).reshape(x * y, x * y)
    return CPMap(X.end, Y.end, choi)


def decompose_nonextremal(
    X: GeneratingModule, Y: GeneratingModule, f: CPMap, report: ExtremalityReport
) -> tuple[CPMap, CPMap]:
    """``f = (f_plus + f_minus) / 2`` with both halves CP and ``f_pm(1) = K``."""
    if report.extremal or report.witness is None:
        raise NoDecompositionError("extremal maps admit no proper decomposition")
    m = report.witness
    if m.norm() > 1.0 + 1e-12:
        m = (1.0 / m.norm()) * m
    delta = perturbation(X, Y, report.representation, m)
    return add_maps(f, delta, 1.0, 1.0), add_maps(f, delta, 1.0, -1.0)


def split_representations(
    X: GeneratingModule, Y: GeneratingModule, report: ExtremalityReport
) -> tuple[Representation, Representation]:
    """Representations ``(E, (id (x) alpha_pm) V)`` of ``f_pm`` with ``alpha_pm^2 = id +- m``."""
    if report.witness is None:
        raise NoDecompositionError("extremal maps admit no proper decomposition")
    rep = report.representation
    blocks = _env_blocks(rep, report.witness)
    parts = split_V(X, rep)
    out = []
    for sign in (1.0, -1.0):
        new = {}
        for key, Vij in parts.items():
            e = Vij.shape[1]
            alpha = psd_sqrt(np.eye(e) + sign * blocks[key]) if e else np.zeros((0, 0))
            new[key] = np.einsum("st,pty->psy", alpha, Vij)
        out.append(Representation(rep.environment, assemble_V(X, Y, rep.environment, new)))
    return out[0], out[1]


def is_pure_state(
    X: GeneratingModule, state: CPMap, tol: float = TOL_RANK, eq_tol: float = TOL_EQ
) -> tuple[bool, tuple[int, ...]]:
    """Pure iff the minimal environment is an irreducible ``r``-module.

    Returns the verdict and the environment's multiplicity column.
    """
    if state.target != C_ALGEBRA:
        raise InvalidInputError("a state must take values in C")
    if not is_completely_positive(state, eq_tol) or not is_unital(state, eq_tol):
        raise InvalidInputError("a state must be unital and completely positive")
    Y = GeneratingModule(C_ALGEBRA, (1,))
    report = is_extremal(X, Y, state, tol, eq_tol)
    env = tuple(row[0] for row in report.representation.environment.mult)
    pure = sorted(env) == [0] * (len(env) - 1) + [1]
    if pure != report.extremal:
        raise NumericalError(
            f"irreducibility ({pure}) disagrees with the extremality test ({report.extremal})"
        )
    return pure, env
