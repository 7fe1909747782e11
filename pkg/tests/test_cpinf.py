import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpdilation.acceptance import all_generating_modules, channel_counts
from cpdilation.algebra import Algebra
from cpdilation.bimodule import (
    Intertwiner,
    IntertwinerKind,
    classify_intertwiner,
    fuse,
    fuse_intertwiners,
    identity_bimodule,
    identity_intertwiner,
)
from cpdilation.cpinf import (
    CPInfMorphism,
    cpinf_compose,
    cpinf_equal,
    cpinf_from_cpmap,
    cpinf_identity,
    cpinf_to_cpmap,
    morita_equivalent,
    star_isomorphic,
    verify_star_isomorphism,
)
from cpdilation.cpmap import compose_cpmaps, distance, identity_map, is_multiplicative
from cpdilation.dilation import GeneratingModule, Representation, standard_module
from cpdilation.errors import InvalidInputError
from cpdilation.oracles import depolarizing, random_channel, random_cp_map, random_unitary

from conftest import modules, seeds

M2 = Algebra((2,))


@st.composite
def objects(draw):
    return draw(modules(max_size=2))


def channel(X, Y, rng):
    return random_channel(X.end, Y.end, channel_counts(X.end, Y.end, rng, 1, 2), rng)


def test_identity_channel_normal_form():
    X = GeneratingModule(Algebra((1, 2)), (2, 1))
    m = cpinf_identity(X)
    assert classify_intertwiner(m.normal_form.V) == IntertwinerKind.UNITARY
    assert distance(cpinf_to_cpmap(m), identity_map(X.end)) <= 1e-12


def test_channel_flag():
    X = standard_module(M2)
    f = random_cp_map(M2, M2, 2, 1)
    cpinf_from_cpmap(X, X, f)
    with pytest.raises(InvalidInputError):
        cpinf_from_cpmap(X, X, f, channel=True)
    cpinf_from_cpmap(X, X, depolarizing(2), channel=True)


@given(objects(), objects(), objects(), objects(), seeds)
def test_category_laws(X, Y, Z, W, seed):
    rng = np.random.default_rng(seed)
    f, g, h = channel(X, Y, rng), channel(Y, Z, rng), channel(Z, W, rng)
    mf, mg, mh = cpinf_from_cpmap(X, Y, f), cpinf_from_cpmap(Y, Z, g), cpinf_from_cpmap(Z, W, h)
    assert cpinf_equal(cpinf_compose(cpinf_compose(mf, mg), mh), cpinf_compose(mf, cpinf_compose(mg, mh)))
    assert cpinf_equal(cpinf_compose(cpinf_identity(X), mf), mf)
    assert cpinf_equal(cpinf_compose(mf, cpinf_identity(Y)), mf)
    assert distance(cpinf_to_cpmap(cpinf_compose(mf, mg)), compose_cpmaps(f, g)) <= 1e-8


@given(objects(), objects(), seeds)
def test_equality_up_to_environment_unitary(X, Y, seed):
    rng = np.random.default_rng(seed)
    m = cpinf_from_cpmap(X, Y, random_cp_map(X.end, Y.end, 2, rng))
    assert cpinf_equal(m, m)
    E = m.normal_form.environment
    u = Intertwiner(E, E, {k: random_unitary(E.mult[k[0]][k[1]], rng) for k in E.keys()})
    V = fuse_intertwiners(identity_intertwiner(X.bimodule), u) @ m.normal_form.V
    assert cpinf_equal(m, CPInfMorphism(m.source, m.target, Representation(E, V)))


def test_inequality():
    X = standard_module(M2)
    assert not cpinf_equal(cpinf_identity(X), cpinf_from_cpmap(X, X, depolarizing(2)))


def test_composability_is_checked():
    X, Y = standard_module(M2), standard_module(Algebra((3,)))
    with pytest.raises(InvalidInputError):
        cpinf_compose(cpinf_identity(X), cpinf_identity(Y))


# --- classification ----------------------------------------------------------


def test_morita_examples():
    w = morita_equivalent(Algebra((2,)), Algebra((3,)))
    assert w is not None and w.bimodule.mult == ((1,),)
    assert fuse(w.bimodule, w.inverse).mult == identity_bimodule(Algebra((2,))).mult
    assert morita_equivalent(Algebra((1, 2)), Algebra((2,))) is None
    r = Algebra((1, 3))
    w = morita_equivalent(r, r)
    assert w.bimodule == identity_bimodule(r)
    assert classify_intertwiner(w.unit_iso) == IntertwinerKind.UNITARY


def test_star_isomorphism_examples():
    X = GeneratingModule(Algebra((1, 2)), (2, 3))
    Y = GeneratingModule(Algebra((2, 5)), (3, 2))
    w = star_isomorphic(X, Y)
    assert w is not None and w.equivalence.mult == ((0, 1), (1, 0))
    assert verify_star_isomorphism(X, Y, w)
    assert is_multiplicative(w.ad_U)
    C = Algebra((1,))
    assert star_isomorphic(GeneratingModule(C, (2,)), GeneratingModule(C, (3,))) is None
    wx = star_isomorphic(X, X)
    assert wx.equivalence == identity_bimodule(X.base)
    assert distance(wx.ad_U, identity_map(X.end)) <= 1e-12


def test_classification_small_exhaustive():
    mods = list(all_generating_modules(max_blocks=2, max_size=2, max_mult=2))
    for X in mods:
        for Y in mods:
            w = star_isomorphic(X, Y)
            assert (w is not None) == (sorted(X.mult) == sorted(Y.mult))
            if w is not None:
                assert verify_star_isomorphism(X, Y, w)
