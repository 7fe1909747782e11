"""The generalized CP-infinity category and the classification of algebras.

Objects are generating modules. A morphism ``X -> Y`` is an equivalence class
of intertwiners ``V: Y -> X (x) E``; each class is stored through its minimal
representative, so equality reduces to finding a unitary between normal forms.
Composition fuses environments:

    V_{g o f} = alpha_{X,E1,E2} o (V1 (x) id_E2) o V2,

followed by minimization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import Algebra
from .bimodule import (
    Bimodule,
    Intertwiner,
    IntertwinerKind,
    associator,
    fuse,
    fuse_intertwiners,
    identity_bimodule,
    identity_intertwiner,
)
from .config import TOL_EQ, TOL_RANK
from .cpmap import CPMap, cpmap_from_function, distance, identity_map, images, is_unital
from .dilation import (
    GeneratingModule,
    Representation,
    conjugate,
    dilate_minimal,
    is_star_homomorphism,
    minimize_representation,
    reconstruct,
    representation_morphism,
)
from .errors import InvalidInputError, RepresentationsInequivalentError
from .linalg import numerical_rank


@dataclass(frozen=True)
class CPInfObject:
    module: GeneratingModule


@dataclass(frozen=True, eq=False)
class CPInfMorphism:
    source: CPInfObject
    target: CPInfObject
    normal_form: Representation


def _obj(X) -> CPInfObject:
    return X if isinstance(X, CPInfObject) else CPInfObject(X)


def cpinf_from_cpmap(X, Y, f: CPMap, channel: bool = False, tol: float = TOL_EQ) -> CPInfMorphism:
    """Normal form of ``f``. With ``channel=True`` only unital maps (isometric ``V``) are accepted."""
    X, Y = _obj(X), _obj(Y)
    if channel and not is_unital(f, tol):
        raise InvalidInputError("channel morphisms must be unital")
    rep = dilate_minimal(X.module, Y.module, f, cp_tol=tol)
    return CPInfMorphism(X, Y, rep)


def cpinf_to_cpmap(m: CPInfMorphism) -> CPMap:
    return reconstruct(m.source.module, m.target.module, m.normal_form)


def cpinf_identity(X) -> CPInfMorphism:
    X = _obj(X)
    return cpinf_from_cpmap(X, X, identity_map(X.module.end))


def compose_representations(
    X: GeneratingModule, rep1: Representation, rep2: Representation
) -> Representation:
    """Unminimized representation of ``f2 o f1`` on ``fuse(E1, E2)``."""
    Xb, E1, E2 = X.bimodule, rep1.environment, rep2.environment
    V1_id = fuse_intertwiners(rep1.V, identity_intertwiner(E2))
    if V1_id.source != rep2.V.target:
        raise InvalidInputError("representations are not composable")
    V = associator(Xb, E1, E2) @ V1_id @ rep2.V
    return Representation(fuse(E1, E2), V)


def cpinf_compose(m1: CPInfMorphism, m2: CPInfMorphism, tol: float = TOL_RANK) -> CPInfMorphism:
    """``m2 o m1`` for ``m1: X -> Y`` and ``m2: Y -> Z``."""
    if m1.target != m2.source:
        raise InvalidInputError("morphisms are not composable")
    X, Z = m1.source.module, m2.target.module
    rep = compose_representations(X, m1.normal_form, m2.normal_form)
    minimal, _ = minimize_representation(X, Z, rep, tol)
    return CPInfMorphism(m1.source, m2.target, minimal)


def cpinf_equal(m1: CPInfMorphism, m2: CPInfMorphism, tol: float = 1e-7) -> bool:
    """Equal iff a unitary links the normal forms; cross-checked against map equality."""
    if m1.source != m2.source or m1.target != m2.target:
        raise InvalidInputError("morphisms have different source or target")
    X, Y = m1.source.module, m1.target.module
    maps_equal = distance(cpinf_to_cpmap(m1), cpinf_to_cpmap(m2)) <= tol
    try:
        mor = representation_morphism(m1.normal_form, m2.normal_form, X, Y, tol)
    except RepresentationsInequivalentError:
        mor = None
    unitary = mor is not None and mor.kind == IntertwinerKind.UNITARY
    return unitary and maps_equal


# --------------------------------------------------------------------------
# Classification
# --------------------------------------------------------------------------


class MoritaWitness(NamedTuple):
    bimodule: Bimodule
    inverse: Bimodule
    unit_iso: Intertwiner  # fuse(bimodule, inverse) -> L^2(r)
    counit_iso: Intertwiner  # fuse(inverse, bimodule) -> L^2(s)


def _permutation_bimodule(r: Algebra, s: Algebra, perm) -> Bimodule:
    mult = np.zeros((len(r), len(s)), dtype=np.int64)
    for i, j in enumerate(perm):
        mult[i, j] = 1
    return Bimodule(r, s, tuple(tuple(int(v) for v in row) for row in mult))


def _iso_to_identity(M: Bimodule, alg: Algebra) -> Intertwiner:
    ident = identity_bimodule(alg)
    if M.mult != ident.mult:
        raise InvalidInputError("bimodule does not fuse to the identity pattern")
    return Intertwiner(M, ident, {k: np.eye(M.mult[k[0]][k[1]]) for k in M.keys()})


def morita_equivalent(r: Algebra, s: Algebra) -> MoritaWitness | None:
    """Equivalent iff the block counts agree; the witness pairs blocks in order."""
    if len(r) != len(s):
        return None
    perm = list(range(len(r)))
    W = _permutation_bimodule(r, s, perm)
    W_inv = _permutation_bimodule(s, r, perm)
    return MoritaWitness(W, W_inv, _iso_to_identity(fuse(W, W_inv), r), _iso_to_identity(fuse(W_inv, W), s))


class StarIsoWitness(NamedTuple):
    equivalence: Bimodule
    U: Intertwiner  # Y -> X (x) E
    ad_U: CPMap  # End(X) -> End(Y)


def _sorted_order(mult) -> list[int]:
    return sorted(range(len(mult)), key=lambda i: (-mult[i], i))


def star_isomorphic(X: GeneratingModule, Y: GeneratingModule) -> StarIsoWitness | None:
    """``End(X) ~= End(Y)`` iff the multisets of multiplicities coincide.

    Blocks are paired after sorting each side by descending multiplicity with
    index tie-break; the witness is the permutation bimodule and ``U = id``
    on every multiplicity block.
    """
    if len(X.mult) != len(Y.mult) or sorted(X.mult) != sorted(Y.mult):
        return None
    perm = [0] * len(X.mult)
    for i, j in zip(_sorted_order(X.mult), _sorted_order(Y.mult)):
        perm[i] = j
    E = _permutation_bimodule(X.base, Y.base, perm)
    XE = fuse(X.bimodule, E)
    U = Intertwiner(Y.bimodule, XE, {(0, j): np.eye(y) for j, y in enumerate(Y.mult)})
    rep = Representation(E, U)
    ad_U = cpmap_from_function(X.end, Y.end, lambda a: conjugate(X, Y, rep, a))
    return StarIsoWitness(E, U, ad_U)


def verify_star_isomorphism(X: GeneratingModule, Y: GeneratingModule, w: StarIsoWitness, tol: float = TOL_EQ) -> bool:
    """``ad_U`` is a unital *-homomorphism and bijective."""
    f = w.ad_U
    if not is_star_homomorphism(X, Y, f, tol):
        return False
    action = np.stack([im.to_vector() for im in images(f)], axis=1)
    return f.source.dim == f.target.dim and numerical_rank(action) == f.source.dim
