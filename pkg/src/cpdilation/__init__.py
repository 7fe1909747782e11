"""Stinespring dilations of CP maps between finite-dimensional von Neumann algebras."""

from .algebra import ZERO_ALGEBRA, Algebra, AlgebraElement, make_algebra
from .bimodule import (
    Bimodule,
    Intertwiner,
    IntertwinerKind,
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
from .config import TOL_EQ, TOL_RANK, Tolerances
from .cpinf import (
    CPInfMorphism,
    CPInfObject,
    cpinf_compose,
    cpinf_equal,
    cpinf_from_cpmap,
    cpinf_identity,
    cpinf_to_cpmap,
    morita_equivalent,
    star_isomorphic,
    verify_star_isomorphism,
)
from .cpmap import (
    CPMap,
    compose_cpmaps,
    cpmap_from_action,
    cpmap_from_function,
    cpmap_from_kraus,
    distance,
    identity_map,
    is_completely_positive,
    is_multiplicative,
    is_unital,
    kraus_decomposition,
    zero_map,
)
from .dilation import (
    GeneratingModule,
    Representation,
    dilate_gns,
    dilate_minimal,
    is_minimal,
    is_star_homomorphism,
    minimize_representation,
    paschke_dilation,
    reconstruct,
    representation_morphism,
    standard_module,
)
from .errors import (
    DilationError,
    GeneratorFailureError,
    InvalidInputError,
    MustBeMinimalError,
    NoDecompositionError,
    NotCompletelyPositiveError,
    NumericalError,
    RepresentationsInequivalentError,
)
from .extremal import ExtremalityReport, decompose_nonextremal, is_extremal, is_pure_state

__version__ = "0.1.0"
