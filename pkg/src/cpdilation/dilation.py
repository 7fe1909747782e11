"""Stinespring representations ``f(a) = V^dagger (a (x) id_E) V`` of CP maps.

Objects are generating modules ``X: C -> r`` (all multiplicities positive) so
that ``End(X) = sum_i M_{x_i}``. A representation of ``f: End(X) -> End(Y)``
is an environment bimodule ``E: r -> s`` together with an intertwiner
``V: Y -> X (x) E``. Its block ``V_j`` has rows ``sum_i C^{x_i} (x) C^{e_ij}``
(x-index major) and ``y_j`` columns; internally we slice it into tensors
``V_ij[p, t, y]``.

The isometry runs ``Y -> X (x) E`` throughout, including for the
*-homomorphism and extremality criteria, where the literature sometimes writes
the opposite direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import Algebra, AlgebraElement
from .bimodule import (
    Bimodule,
    Intertwiner,
    IntertwinerKind,
    amplify,
    classify_intertwiner,
    end_algebra,
    endomorphism_algebra,
    fuse,
)
from .config import TOL_EQ, TOL_RANK
from .cpmap import (
    CPMap,
    apply,
    cpmap_from_function,
    distance,
    require_cp,
)
from .errors import InvalidInputError, NumericalError, RepresentationsInequivalentError
from .linalg import block_diag, numerical_rank, pinv, psd_factor, range_basis, rank_cutoff

C_ALGEBRA = Algebra((1,))


@dataclass(frozen=True)
class GeneratingModule:
    """Right ``r``-module ``sum_i C^{x_i} (x) C^{n_i}`` with every ``x_i >= 1``."""

    base: Algebra
    mult: tuple[int, ...]

    def __post_init__(self):
        mult = tuple(int(x) for x in self.mult)
        if len(mult) != len(self.base):
            raise InvalidInputError("one multiplicity per base block is required")
        if any(x < 1 for x in mult):
            raise InvalidInputError(f"generating modules need positive multiplicities, got {mult}")
        object.__setattr__(self, "mult", mult)

    @property
    def bimodule(self) -> Bimodule:
        return Bimodule(C_ALGEBRA, self.base, (self.mult,))

    @property
    def end(self) -> Algebra:
        return Algebra(self.mult)


def standard_module(alg: Algebra) -> GeneratingModule:
    """``L^2(r)_r``: multiplicities equal to block sizes, so ``End = r``."""
    return GeneratingModule(alg, alg.blocks)


@dataclass(frozen=True, eq=False)
class Representation:
    environment: Bimodule
    V: Intertwiner


def _check_modules(X: GeneratingModule, Y: GeneratingModule, f: CPMap):
    if f.source != X.end or f.target != Y.end:
        raise InvalidInputError(
            f"map {f.source.blocks}->{f.target.blocks} does not act on "
            f"End(X)={X.end.blocks}, End(Y)={Y.end.blocks}"
        )


def _check_rep(X: GeneratingModule, Y: GeneratingModule, rep: Representation):
    E = rep.environment
    if E.left != X.base or E.right != Y.base:
        raise InvalidInputError("environment does not connect the base algebras of X and Y")
    if rep.V.source != Y.bimodule or rep.V.target != fuse(X.bimodule, E):
        raise InvalidInputError("V is not an intertwiner Y -> X (x) E")


def split_V(X: GeneratingModule, rep: Representation) -> dict:
    """``{(i, j): V_ij}`` with ``V_ij`` of shape ``(x_i, e_ij, y_j)``."""
    E = rep.environment
    parts = {}
    for j in range(len(E.right)):
        Vj = rep.V.blocks[(0, j)]
        row = 0
        for i, x in enumerate(X.mult):
            e = E.mult[i][j]
            parts[(i, j)] = Vj[row : row + x * e].reshape(x, e, Vj.shape[1])
            row += x * e
    return parts


def assemble_V(X: GeneratingModule, Y: GeneratingModule, E: Bimodule, parts: dict) -> Intertwiner:
    blocks = {}
    for j, y in enumerate(Y.mult):
        rows = [np.asarray(parts[(i, j)]).reshape(x * E.mult[i][j], y) for i, x in enumerate(X.mult)]
        blocks[(0, j)] = np.concatenate(rows, axis=0) if rows else np.zeros((0, y))
    return Intertwiner(Y.bimodule, fuse(X.bimodule, E), blocks)


def _env(X: GeneratingModule, Y: GeneratingModule, mult) -> Bimodule:
    return Bimodule(X.base, Y.base, tuple(tuple(int(v) for v in row) for row in np.asarray(mult)))


def _contraction(Vij: np.ndarray) -> np.ndarray:
    """``e x (x*y)`` matrix whose column space is the support of ``V_ij`` in ``C^e``."""
    x, e, y = Vij.shape
    return Vij.transpose(1, 0, 2).reshape(e, x * y)


def dilate_minimal(
    X: GeneratingModule, Y: GeneratingModule, f: CPMap, tol: float = TOL_RANK, cp_tol: float = TOL_EQ
) -> Representation:
    """Minimal representation from the eigendecomposition of each Choi block."""
    _check_modules(X, Y, f)
    require_cp(f, cp_tol)
    parts, mult = {}, np.zeros((len(X.mult), len(Y.mult)), dtype=np.int64)
    for (i, j), c in f.choi.items():
        x, y = X.mult[i], Y.mult[j]
        w, u = psd_factor(c, tol)
        vecs = (u * np.sqrt(w)).T.reshape(len(w), x, y)  # v_t[p, y]
        parts[(i, j)] = vecs.conj().transpose(1, 0, 2)
        mult[i, j] = len(w)
    E = _env(X, Y, mult)
    return Representation(E, assemble_V(X, Y, E, parts))


def reconstruct(X: GeneratingModule, Y: GeneratingModule, rep: Representation) -> CPMap:
    _check_rep(X, Y, rep)
    choi = {}
    for (i, j), Vij in split_V(X, rep).items():
        x, _, y = Vij.shape
        choi[(i, j)] = np.einsum("pty,qtz->pyqz", Vij.conj(), Vij).reshape(x * y, x * y)
    return CPMap(X.end, Y.end, choi)


def conjugate(X: GeneratingModule, Y: GeneratingModule, rep: Representation, a: AlgebraElement) -> AlgebraElement:
    """``V^dagger (a (x) id_E) V`` evaluated through the intertwiner calculus."""
    _check_rep(X, Y, rep)
    Xb, E = X.bimodule, rep.environment
    XE = fuse(Xb, E)
    end_y = endomorphism_algebra(Y.bimodule)
    if XE.is_zero:
        return Y.end.zero()
    end_xe = endomorphism_algebra(XE)
    T = end_xe.encode(amplify(a, Xb, E))
    return end_y.decode(rep.V.adjoint() @ T @ rep.V)


def is_minimal(X: GeneratingModule, rep: Representation, tol: float = TOL_RANK) -> bool:
    return all(
        numerical_rank(_contraction(Vij), tol) == Vij.shape[1] for Vij in split_V(X, rep).values()
    )


def morphism_kernel_dimension(X: GeneratingModule, rep: Representation, tol: float = TOL_RANK) -> int:
    """Dimension of ``{sigma : (id (x) sigma) V = 0}`` inside the intertwiner space."""
    return sum(Vij.shape[1] - numerical_rank(_contraction(Vij), tol) for Vij in split_V(X, rep).values())


def minimize_representation(
    X: GeneratingModule, Y: GeneratingModule, rep: Representation, tol: float = TOL_RANK
) -> tuple[Representation, Intertwiner]:
    """Compress ``E`` onto the span of ``(a (x) id) V xi``.

    Returns the minimal representation and the isometry ``iota: E_min -> E``
    with ``V = (id (x) iota) V_min``. Blocks that are already minimal keep
    ``iota = id``.
    """
    _check_rep(X, Y, rep)
    E = rep.environment
    parts, iota, mult = {}, {}, np.zeros(E.mult_array.shape, dtype=np.int64)
    for (i, j), Vij in split_V(X, rep).items():
        M = _contraction(Vij)
        e = M.shape[0]
        Q = range_basis(M, tol)
        if Q.shape[1] == e:
            Q = np.eye(e)
        iota[(i, j)] = Q
        mult[i, j] = Q.shape[1]
        parts[(i, j)] = np.einsum("tr,pty->pry", Q.conj(), Vij)
    E_min = _env(X, Y, mult)
    return (
        Representation(E_min, assemble_V(X, Y, E_min, parts)),
        Intertwiner(E_min, E, iota),
    )


class RepresentationMorphism(NamedTuple):
    sigma: Intertwiner
    kind: IntertwinerKind
    residual: float


def representation_morphism(
    rep1: Representation,
    rep2: Representation,
    X: GeneratingModule,
    Y: GeneratingModule,
    tol: float = TOL_EQ,
    tol_rank: float = TOL_RANK,
) -> RepresentationMorphism | None:
    """Solve ``(id_X (x) sigma) V1 = V2`` for ``sigma: E1 -> E2`` by least squares.

    The solution is unique when ``rep1`` is minimal. ``None`` when either
    intertwining equation leaves a residual above ``tol``.
    """
    if distance(reconstruct(X, Y, rep1), reconstruct(X, Y, rep2)) > tol:
        raise RepresentationsInequivalentError("representations of different CP maps")
    E1, E2 = rep1.environment, rep2.environment
    p1, p2 = split_V(X, rep1), split_V(X, rep2)
    sigma, residual = {}, 0.0
    for key, V1 in p1.items():
        M1, M2 = _contraction(V1), _contraction(p2[key])
        s = M2 @ pinv(M1, tol_rank)
        sigma[key] = s
        if M2.size:
            residual = max(residual, float(np.max(np.abs(s @ M1 - M2))))
        if M1.size:
            residual = max(residual, float(np.max(np.abs(s.conj().T @ M2 - M1))))
    if residual > tol:
        return None
    sig = Intertwiner(E1, E2, sigma)
    return RepresentationMorphism(sig, classify_intertwiner(sig, tol), residual)


def is_star_homomorphism(
    X: GeneratingModule, Y: GeneratingModule, f: CPMap, tol: float = TOL_EQ, tol_rank: float = TOL_RANK
) -> bool:
    """Unital *-homomorphism iff the minimal ``V`` is unitary."""
    rep = dilate_minimal(X, Y, f, tol_rank, tol)
    return classify_intertwiner(rep.V, tol) == IntertwinerKind.UNITARY


class PaschkeDilation(NamedTuple):
    algebra: Algebra
    rho: CPMap
    nu: CPMap
    representation: Representation


def paschke_dilation(
    X: GeneratingModule, Y: GeneratingModule, f: CPMap, tol: float = TOL_RANK
) -> PaschkeDilation:
    """``f = nu o rho`` with ``rho = - (x) id_E`` and ``nu = V^dagger - V``."""
    rep = dilate_minimal(X, Y, f, tol)
    Xb, E = X.bimodule, rep.environment
    XE = fuse(Xb, E)
    if XE.is_zero:
        raise InvalidInputError("the zero map has no Paschke dilation")
    P = end_algebra(XE)
    end_xe = endomorphism_algebra(XE)
    end_y = endomorphism_algebra(Y.bimodule)
    rho = cpmap_from_function(X.end, P, lambda a: amplify(a, Xb, E))
    nu = cpmap_from_function(P, Y.end, lambda p: end_y.decode(rep.V.adjoint() @ end_xe.encode(p) @ rep.V))
    return PaschkeDilation(P, rho, nu, rep)


# --------------------------------------------------------------------------
# GNS construction for standard generating modules
# --------------------------------------------------------------------------


def _left_mult(alg: Algebra, a: AlgebraElement) -> np.ndarray:
    """Matrix of ``x -> a x`` on the matrix-unit coordinates of ``alg``."""
    return block_diag([np.kron(a.data[k], np.eye(n)) for k, n in enumerate(alg.blocks)])


def _right_mult(alg: Algebra, b: AlgebraElement) -> np.ndarray:
    """Matrix of ``x -> x b`` on the matrix-unit coordinates of ``alg``."""
    return block_diag([np.kron(np.eye(n), b.data[k].T) for k, n in enumerate(alg.blocks)])


def gns_gram(f: CPMap) -> np.ndarray:
    """Scalar Gram matrix of ``<a1 (x) x1, a2 (x) x2> = <x1, f(a1^* a2) x2>`` on ``r (.) L^2(s)``.

    Rows and columns are indexed by pairs (matrix unit of r, matrix unit of s),
    r-index major. ``L^2(s)`` carries the Hilbert-Schmidt inner product.
    """
    r, s = f.source, f.target
    units = [r.matrix_unit(*lab) for lab in r.basis()]
    ds = s.dim
    G = np.zeros((r.dim * ds, r.dim * ds), dtype=np.complex128)
    cache = {}
    for x, a1 in enumerate(units):
        for y, a2 in enumerate(units):
            prod = a1.adjoint() @ a2
            key = prod.to_vector().tobytes()
            if key not in cache:
                fa = apply(f, prod)
                cache[key] = _left_mult(s, fa)  # <x1, F x2>_HS for x in L^2(s)
            G[x * ds : (x + 1) * ds, y * ds : (y + 1) * ds] = cache[key]
    return G


def dilate_gns(f: CPMap, tol: float = TOL_RANK, cp_tol: float = TOL_EQ) -> Representation:
    """Representation built from the semi-inner product on ``r (.) L^2(s)``.

    The Gram matrix is quotiented by its numerical kernel, the left and right
    actions are pushed to the quotient, and the resulting bimodule is put in
    standard form using the corners cut out by minimal projections. ``V`` is
    the class of ``1_r (x) xi``. Works on ``X = L^2(r)``, ``Y = L^2(s)``.
    """
    require_cp(f, cp_tol)
    r, s = f.source, f.target
    X, Y = standard_module(r), standard_module(s)
    G = gns_gram(f)
    w, U = np.linalg.eigh(0.5 * (G + G.conj().T))
    keep = w > rank_cutoff(np.clip(w, 0.0, None), tol)
    w, U = w[keep], U[:, keep]
    Q = (U * np.sqrt(w)).conj().T  # quotient map onto an orthonormal basis
    Qinv = U / np.sqrt(w)

    def left(a):
        return Q @ np.kron(_left_mult(r, a), np.eye(s.dim)) @ Qinv

    def right(b):
        return Q @ np.kron(np.eye(r.dim), _right_mult(s, b)) @ Qinv

    one_r = r.unit().to_vector()
    mult = np.zeros((len(r), len(s)), dtype=np.int64)
    parts = {}
    for i, n in enumerate(r.blocks):
        for j, m in enumerate(s.blocks):
            corner = left(r.matrix_unit(i, 0, 0)) @ right(s.matrix_unit(j, 0, 0))
            phi = range_basis(corner, tol)
            e = phi.shape[1]
            mult[i, j] = e
            Vij = np.zeros((n, e, m), dtype=np.complex128)
            for u in range(m):
                xi = s.matrix_unit(j, u, 0).to_vector()
                cls = Q @ np.kron(one_r, xi)  # [1_r (x) E_u0]
                for p in range(n):
                    basis_p = left(r.matrix_unit(i, p, 0)) @ phi
                    Vij[p, :, u] = basis_p.conj().T @ cls
            parts[(i, j)] = Vij
    if int(np.sum(mult * np.outer(r.blocks, s.blocks))) != Q.shape[0]:
        raise NumericalError(
            f"GNS quotient has dimension {Q.shape[0]} but its standard form has "
            f"{int(np.sum(mult * np.outer(r.blocks, s.blocks)))}"
        )
    E = _env(X, Y, mult)
    rep = Representation(E, assemble_V(X, Y, E, parts))
    return minimize_representation(X, Y, rep, tol)[0]
