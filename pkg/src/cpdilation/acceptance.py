"""Acceptance criteria as runnable checks.

Each ``criterion_*`` function is deterministic (fixed seeds), returns a
:class:`CriterionResult`, and never raises for a failed property: failures are
reported through ``passed`` and ``details``. ``run_all`` is what the ``verify``
subcommand and ``tests/test_acceptance.py`` both call.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Algebra
from .bimodule import (
    Bimodule,
    Intertwiner,
    IntertwinerKind,
    associator,
    classify_intertwiner,
    direct_sum,
    distributor,
    fuse,
    fuse_intertwiners,
    identity_bimodule,
    identity_intertwiner,
    unitors,
)
from .cpinf import (
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
    add_maps,
    compose_cpmaps,
    distance,
    is_completely_positive,
    is_multiplicative,
    is_unital,
)
from .dilation import (
    GeneratingModule,
    Representation,
    dilate_gns,
    dilate_minimal,
    is_star_homomorphism,
    minimize_representation,
    morphism_kernel_dimension,
    reconstruct,
    representation_morphism,
    standard_module,
)
from .extremal import decompose_nonextremal, is_extremal, is_pure_state
from .oracles import (
    gram_is_psd,
    amplitude_damping,
    choi_independence_oracle,
    conjugation,
    depolarizing,
    random_channel,
    random_cp_map,
    random_density,
    random_unitary,
    unital_embedding,
    vector_state,
)

ROUND_TRIP_TOL = 1e-8
UNITAL_TOL = 1e-8
SIGMA_TOL = 1e-7
AVERAGE_TOL = 1e-10
DISTINCT_TOL = 1e-6
FUNCTOR_TOL = 1e-8


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.name} ({self.seconds:.1f}s) {self.details}"


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------


def random_algebra(rng, max_blocks=3, max_size=4) -> Algebra:
    k = int(rng.integers(1, max_blocks + 1))
    return Algebra(tuple(int(n) for n in rng.integers(1, max_size + 1, size=k)))


def random_module_for(end: Algebra, rng, max_size=4) -> GeneratingModule:
    """Generating module with ``End = end`` over a random base of the same block count."""
    base = Algebra(tuple(int(n) for n in rng.integers(1, max_size + 1, size=len(end))))
    return GeneratingModule(base, end.blocks)


def channel_counts(A: Algebra, B: Algebra, rng, low=1, high=3) -> np.ndarray:
    """Kraus counts per block pair large enough for a unital normalization."""
    counts = rng.integers(low, high + 1, size=(len(A), len(B)))
    for j, b in enumerate(B.blocks):
        while int(counts[:, j] @ np.array(A.blocks)) < b:
            counts[int(rng.integers(len(A))), j] += 1
    return counts


def _random_channel(A, B, rng, low=1, high=3):
    return random_channel(A, B, channel_counts(A, B, rng, low, high), rng)


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------


def criterion_round_trip(n_maps: int = 1000, seed: int = 1) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_maps):
        A, B = random_algebra(rng), random_algebra(rng)
        f = random_cp_map(A, B, rng.integers(0, 4, size=(len(A), len(B))), rng)
        X, Y = random_module_for(A, rng), random_module_for(B, rng)
        rep = dilate_minimal(X, Y, f)
        worst = max(worst, distance(reconstruct(X, Y, rep), f))
    return CriterionResult(1, "Stinespring round trip", worst <= ROUND_TRIP_TOL, {"maps": n_maps, "max_distance": worst})


def criterion_unital_isometry(n_each: int = 500, seed: int = 2) -> CriterionResult:
    rng = np.random.default_rng(seed)
    exceptions = 0
    unital_seen = 0
    for k in range(2 * n_each):
        A, B = random_algebra(rng), random_algebra(rng)
        if k < n_each:
            f = _random_channel(A, B, rng)
        else:
            f = random_cp_map(A, B, rng.integers(1, 4, size=(len(A), len(B))), rng)
        X, Y = random_module_for(A, rng), random_module_for(B, rng)
        V = dilate_minimal(X, Y, f).V
        unital = is_unital(f, UNITAL_TOL)
        iso = classify_intertwiner(V, UNITAL_TOL) in (IntertwinerKind.ISOMETRY, IntertwinerKind.UNITARY)
        unital_seen += unital
        exceptions += unital != iso
    return CriterionResult(
        2,
        "unital iff V isometric",
        exceptions == 0 and unital_seen == n_each,
        {"maps": 2 * n_each, "unital": unital_seen, "exceptions": exceptions},
    )


def criterion_gns_agreement(n_maps: int = 200, seed: int = 3) -> CriterionResult:
    rng = np.random.default_rng(seed)
    failures, worst = 0, 0.0
    multi_block = 0
    for _ in range(n_maps):
        A, B = random_algebra(rng, 2, 3), random_algebra(rng, 2, 3)
        while A.dim > 10 or B.dim > 10:
            A, B = random_algebra(rng, 2, 3), random_algebra(rng, 2, 3)
        multi_block += len(A) > 1 or len(B) > 1
        f = random_cp_map(A, B, rng.integers(0, 4, size=(len(A), len(B))), rng)
        X, Y = standard_module(A), standard_module(B)
        rep_min, rep_gns = dilate_minimal(X, Y, f), dilate_gns(f)
        if rep_min.environment.mult != rep_gns.environment.mult:
            failures += 1
            continue
        mor = representation_morphism(rep_min, rep_gns, X, Y, SIGMA_TOL)
        if mor is None or mor.kind != IntertwinerKind.UNITARY:
            failures += 1
            continue
        worst = max(worst, mor.residual)
    return CriterionResult(
        3,
        "GNS oracle agreement",
        failures == 0 and worst <= SIGMA_TOL,
        {"maps": n_maps, "multi_block": multi_block, "failures": failures, "max_residual": worst},
    )


def pad_representation(X: GeneratingModule, rep: Representation, rng, max_extra=2):
    """``(E + E', (id (x) u w_1) V)`` for a random unused summand ``E'`` and unitary ``u``."""
    E = rep.environment
    extra = rng.integers(0, max_extra + 1, size=E.mult_array.shape)
    E_pad = Bimodule(E.left, E.right, tuple(tuple(int(v) for v in row) for row in extra))
    ds = direct_sum([E, E_pad])
    u = {k: random_unitary(ds.total.mult[k[0]][k[1]], rng) for k in ds.total.keys()}
    U = Intertwiner(ds.total, ds.total, u)
    idX = identity_intertwiner(X.bimodule)
    V = fuse_intertwiners(idX, U) @ fuse_intertwiners(idX, ds.injections[0]) @ rep.V
    return Representation(ds.total, V), U @ ds.injections[0]


def criterion_minimality(n_maps: int = 200, seed: int = 4) -> CriterionResult:
    rng = np.random.default_rng(seed)
    mult_fail, sigma_fail, unique_fail, worst = 0, 0, 0, 0.0
    for _ in range(n_maps):
        A, B = random_algebra(rng), random_algebra(rng)
        f = random_cp_map(A, B, rng.integers(0, 4, size=(len(A), len(B))), rng)
        X, Y = random_module_for(A, rng), random_module_for(B, rng)
        rep = dilate_minimal(X, Y, f)
        padded, _ = pad_representation(X, rep, rng)
        recovered, _ = minimize_representation(X, Y, padded)
        mult_fail += recovered.environment.mult != rep.environment.mult
        unique_fail += morphism_kernel_dimension(X, rep) != 0
        mor = representation_morphism(rep, padded, X, Y, SIGMA_TOL)
        if mor is None or mor.kind not in (IntertwinerKind.ISOMETRY, IntertwinerKind.UNITARY):
            sigma_fail += 1
        else:
            worst = max(worst, mor.residual)
    ok = mult_fail == 0 and sigma_fail == 0 and unique_fail == 0
    return CriterionResult(
        4,
        "minimality and initiality",
        ok,
        {"maps": n_maps, "mult_failures": mult_fail, "sigma_failures": sigma_fail,
         "uniqueness_failures": unique_fail, "max_residual": worst},
    )


def random_embedding(rng):
    A = random_algebra(rng, 2, 2)
    J = int(rng.integers(1, 4))
    mult = np.zeros((J, len(A)), dtype=np.int64)
    for j in range(J):
        while mult[j].sum() == 0:
            mult[j] = rng.integers(0, 3, size=len(A))
    B = Algebra(tuple(int(v) for v in mult @ np.array(A.blocks)))
    W = [random_unitary(b, rng) for b in B.blocks]
    return A, B, unital_embedding(A, B, mult, W)


def criterion_star_hom(n_each: int = 100, seed: int = 5) -> CriterionResult:
    rng = np.random.default_rng(seed)
    disagreements, wrong = 0, 0
    for k in range(2 * n_each):
        if k < n_each:
            if k % 2 == 0:
                A = random_algebra(rng)
                f = conjugation(A, [random_unitary(n, rng) for n in A.blocks])
                B = A
            else:
                A, B, f = random_embedding(rng)
            expected = True
        else:
            # a block of size >= 2 lets a diagonal Choi block carry rank >= 2
            A = random_algebra(rng)
            while max(A.blocks) < 2:
                A = random_algebra(rng)
            B = A
            f = random_channel(A, A, channel_counts(A, A, rng, 2, 3), rng)
            expected = False
        X, Y = random_module_for(A, rng), random_module_for(B, rng)
        verdict = is_star_homomorphism(X, Y, f)
        direct = is_multiplicative(f)
        disagreements += verdict != direct
        wrong += verdict != expected
    return CriterionResult(
        5,
        "*-homomorphism criterion",
        disagreements == 0 and wrong == 0,
        {"maps": 2 * n_each, "disagreements": disagreements, "misclassified": wrong},
    )


def _single_block_channels(n_maps: int, rng):
    for _ in range(n_maps):
        n, m = (int(v) for v in rng.integers(1, 4, size=2))
        lo = -(-m // n)
        t = int(rng.integers(lo, n * m + 1))
        A, B = Algebra((n,)), Algebra((m,))
        yield A, B, random_channel(A, B, t, rng)


def _decomposition_ok(X, Y, f, report):
    f_plus, f_minus = decompose_nonextremal(X, Y, f, report)
    K = report.K
    cp = is_completely_positive(f_plus) and is_completely_positive(f_minus)
    fixed = (f_plus.unit_image() - K).norm() <= UNITAL_TOL and (f_minus.unit_image() - K).norm() <= UNITAL_TOL
    gap = distance(f_plus, f_minus)
    avg = distance(add_maps(f_plus, f_minus, 0.5, 0.5), f)
    return cp, fixed, gap, avg


def criterion_extremality(n_maps: int = 500, seed: int = 6) -> tuple[CriterionResult, CriterionResult]:
    """Criteria 6 and 7 share their sample."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    disagreements, non_extremal, extremal = 0, [], 0
    for A, B, f in _single_block_channels(n_maps, rng):
        X, Y = standard_module(A), standard_module(B)
        report = is_extremal(X, Y, f)
        disagreements += report.extremal != choi_independence_oracle(f)
        if report.extremal:
            extremal += 1
        else:
            non_extremal.append((X, Y, f, report))

    M2 = Algebra((2,))
    X2 = standard_module(M2)
    dep = depolarizing(2)
    dep_report = is_extremal(X2, X2, dep)
    dep_ok = False
    if not dep_report.extremal:
        cp, fixed, gap, avg = _decomposition_ok(X2, X2, dep, dep_report)
        dep_ok = cp and fixed and gap > DISTINCT_TOL and avg <= AVERAGE_TOL and is_unital(dep)
    damping_ok = all(is_extremal(X2, X2, amplitude_damping(g)).extremal for g in (0.1, 0.5, 0.9))
    res6 = CriterionResult(
        6,
        "extremality vs Choi oracle",
        disagreements == 0 and dep_ok and damping_ok,
        {"channels": n_maps, "extremal": extremal, "non_extremal": len(non_extremal),
         "disagreements": disagreements, "depolarizing_decomposes": dep_ok, "damping_extremal": damping_ok},
        time.perf_counter() - t0,
    )

    t1 = time.perf_counter()
    bad, min_gap, worst_avg = 0, np.inf, 0.0
    for X, Y, f, report in non_extremal + [(X2, X2, dep, dep_report)]:
        cp, fixed, gap, avg = _decomposition_ok(X, Y, f, report)
        min_gap, worst_avg = min(min_gap, gap), max(worst_avg, avg)
        bad += not (cp and fixed and gap > DISTINCT_TOL)
    res7 = CriterionResult(
        7,
        "decomposition soundness",
        bad == 0 and len(non_extremal) > 0,
        {"decompositions": len(non_extremal) + 1, "failures": bad, "min_gap": float(min_gap), "max_average_error": worst_avg},
        time.perf_counter() - t1,
    )
    return res6, res7


def _states(rng):
    """``(algebra, density blocks, total rank)`` covering every rank pattern."""
    for n in (2, 3):
        alg = Algebra((n,))
        for rank in range(1, n + 1):
            for _ in range(3):
                yield alg, [random_density(n, rank, rng)], rank
    alg = Algebra((1, 2))
    patterns = [(1, 0), (0, 1), (0, 2), (1, 1), (1, 2)]
    for r1, r2 in patterns:
        for _ in range(3):
            w = rng.uniform(0.2, 0.8) if r1 and r2 else (1.0 if r1 else 0.0)
            b1 = np.array([[w]]) if r1 else np.zeros((1, 1))
            b2 = (1 - w) * random_density(2, r2, rng) if r2 else np.zeros((2, 2))
            yield alg, [b1, b2], r1 + r2


def criterion_pure_states(seed: int = 8) -> CriterionResult:
    rng = np.random.default_rng(seed)
    failures, count = 0, 0
    for alg, blocks, rank in _states(rng):
        X = random_module_for(alg, rng)
        pure, env = is_pure_state(X, vector_state(alg, blocks))
        single_unit = sorted(env) == [0] * (len(env) - 1) + [1]
        failures += pure != (rank == 1) or single_unit != (rank == 1)
        count += 1
    return CriterionResult(8, "pure states iff irreducible environment", failures == 0, {"states": count, "failures": failures})


def random_chain(rng, length: int):
    algs = [random_algebra(rng, 2, 2) for _ in range(length + 1)]
    return [
        Bimodule(algs[k], algs[k + 1], tuple(tuple(int(v) for v in row) for row in rng.integers(0, 3, size=(len(algs[k]), len(algs[k + 1])))))
        for k in range(length)
    ]


def criterion_fusion_coherence(n_chains: int = 100, seed: int = 9) -> CriterionResult:
    rng = np.random.default_rng(seed)
    pent_fail = tri_fail = dist_fail = 0
    for _ in range(n_chains):
        M, N, O, P = random_chain(rng, 4)
        lhs = associator(M, N, fuse(O, P)) @ associator(fuse(M, N), O, P)
        rhs = (
            fuse_intertwiners(identity_intertwiner(M), associator(N, O, P))
            @ associator(M, fuse(N, O), P)
            @ fuse_intertwiners(associator(M, N, O), identity_intertwiner(P))
        )
        pent_fail += not lhs == rhs

        one = identity_bimodule(M.right)
        lam_N = unitors(N)[0]
        rho_M = unitors(M)[1]
        tri_l = fuse_intertwiners(identity_intertwiner(M), lam_N) @ associator(M, one, N)
        tri_r = fuse_intertwiners(rho_M, identity_intertwiner(N))
        tri_fail += not tri_l == tri_r

        M2 = Bimodule(M.left, M.right, tuple(tuple(int(v) for v in row) for row in rng.integers(0, 3, size=M.mult_array.shape)))
        D = distributor([M, M2], N)
        ds = direct_sum([M, M2])
        target = direct_sum([fuse(M, N), fuse(M2, N)])
        injections = [D @ fuse_intertwiners(w, identity_intertwiner(N)) for w in ds.injections]
        ok = all(a == b for a, b in zip(injections, target.injections))
        for a, wa in enumerate(injections):
            for b, wb in enumerate(injections):
                expect = identity_intertwiner(wa.source) if a == b else None
                prod = wa.adjoint() @ wb
                if expect is not None:
                    ok &= prod == expect
                else:
                    ok &= all(not np.any(g) for g in prod.blocks.values())
        total = injections[0] @ injections[0].adjoint() + injections[1] @ injections[1].adjoint()
        ok &= total == identity_intertwiner(target.total)
        ok &= D.adjoint() @ D == identity_intertwiner(D.source) and D @ D.adjoint() == identity_intertwiner(D.target)
        dist_fail += not ok
    return CriterionResult(
        9,
        "fusion coherence",
        pent_fail == tri_fail == dist_fail == 0,
        {"chains": n_chains, "pentagon_failures": pent_fail, "triangle_failures": tri_fail,
         "distributivity_failures": dist_fail},
    )


def _random_object(rng):
    base = random_algebra(rng, 2, 3)
    return GeneratingModule(base, tuple(int(v) for v in rng.integers(1, 4, size=len(base))))


def criterion_cpinf_laws(n_cases: int = 200, seed: int = 10) -> CriterionResult:
    rng = np.random.default_rng(seed)
    assoc_fail = unit_fail = functor_fail = 0
    worst = 0.0
    for _ in range(n_cases):
        X, Y, Z, W = (_random_object(rng) for _ in range(4))
        f = _random_channel(X.end, Y.end, rng, 1, 2)
        g = _random_channel(Y.end, Z.end, rng, 1, 2)
        h = _random_channel(Z.end, W.end, rng, 1, 2)
        mf, mg, mh = cpinf_from_cpmap(X, Y, f), cpinf_from_cpmap(Y, Z, g), cpinf_from_cpmap(Z, W, h)
        left = cpinf_compose(cpinf_compose(mf, mg), mh)
        right = cpinf_compose(mf, cpinf_compose(mg, mh))
        assoc_fail += not cpinf_equal(left, right, SIGMA_TOL)
        unit_fail += not cpinf_equal(cpinf_compose(cpinf_identity(X), mf), mf, SIGMA_TOL)
        unit_fail += not cpinf_equal(cpinf_compose(mf, cpinf_identity(Y)), mf, SIGMA_TOL)
        d = distance(cpinf_to_cpmap(cpinf_compose(mf, mg)), compose_cpmaps(f, g))
        worst = max(worst, d)
        functor_fail += d > FUNCTOR_TOL
    return CriterionResult(
        10,
        "CP-infinity category laws",
        assoc_fail == unit_fail == functor_fail == 0,
        {"cases": n_cases, "associativity_failures": assoc_fail, "unit_failures": unit_fail,
         "functor_failures": functor_fail, "max_functor_distance": worst},
    )


def all_generating_modules(max_blocks=2, max_size=3, max_mult=3):
    for k in range(1, max_blocks + 1):
        for sizes in itertools.product(range(1, max_size + 1), repeat=k):
            for mult in itertools.product(range(1, max_mult + 1), repeat=k):
                yield GeneratingModule(Algebra(sizes), mult)


def criterion_classification() -> CriterionResult:
    modules = list(all_generating_modules())
    iso_fail = witness_fail = witnesses = 0
    verified: dict = {}
    for X in modules:
        for Y in modules:
            w = star_isomorphic(X, Y)
            same = sorted(X.mult) == sorted(Y.mult)
            iso_fail += (w is not None) != same
            if w is None:
                continue
            witnesses += 1
            key = (X, Y)
            if key not in verified:
                verified[key] = verify_star_isomorphism(X, Y, w)
            witness_fail += not verified[key]

    algebras = sorted({X.base for X in modules}, key=lambda a: a.blocks)
    morita_fail = 0
    for r in algebras:
        for s in algebras:
            w = morita_equivalent(r, s)
            morita_fail += (w is not None) != (len(r) == len(s))
            if w is not None:
                morita_fail += fuse(w.bimodule, w.inverse).mult != identity_bimodule(r).mult
                morita_fail += fuse(w.inverse, w.bimodule).mult != identity_bimodule(s).mult
                morita_fail += classify_intertwiner(w.unit_iso) != IntertwinerKind.UNITARY
                morita_fail += classify_intertwiner(w.counit_iso) != IntertwinerKind.UNITARY
    return CriterionResult(
        11,
        "classification of algebras",
        iso_fail == witness_fail == morita_fail == 0,
        {"module_pairs": len(modules) ** 2, "witnesses": witnesses, "iso_failures": iso_fail,
         "witness_failures": witness_fail, "algebra_pairs": len(algebras) ** 2, "morita_failures": morita_fail},
    )


def _timed(fn: Callable[[], CriterionResult]) -> CriterionResult:
    t0 = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - t0
    return res


CRITERIA: dict[int, Callable[[], object]] = {
    1: criterion_round_trip,
    2: criterion_unital_isometry,
    3: criterion_gns_agreement,
    4: criterion_minimality,
    5: criterion_star_hom,
    8: criterion_pure_states,
    9: criterion_fusion_coherence,
    10: criterion_cpinf_laws,
    11: criterion_classification,
}


def run_all(selected=None) -> list[CriterionResult]:
    selected = set(selected or range(1, 12))
    results = []
    for number in range(1, 12):
        if number not in selected:
            continue
        if number == 6:
            results.extend(r for r in criterion_extremality() if r.number in selected)
        elif number == 7:
            if 6 not in selected:
                results.append(criterion_extremality()[1])
        else:
            results.append(_timed(CRITERIA[number]))
    return sorted(results, key=lambda r: r.number)


def _non_cp_variant(f, rng):
    """Subtract a rank-one term large enough to push one Choi block negative."""
    keys = [k for k, c in f.choi.items() if c.size]
    key = keys[int(rng.integers(len(keys)))]
    c = f.choi[key]
    v = rng.standard_normal(c.shape[0]) + 1j * rng.standard_normal(c.shape[0])
    v /= np.linalg.norm(v)
    t = 2.0 * np.linalg.norm(c, 2) + 0.1
    choi = dict(f.choi)
    choi[key] = c - t * np.outer(v, v.conj())
    return type(f)(f.source, f.target, choi)


def oracle_checks(n_maps: int = 500, seed: int = 12) -> CriterionResult:
    """Gram positivity versus the Choi-block CP test, on CP and deliberately non-CP maps."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    disagreements = 0
    for k in range(n_maps):
        A, B = random_algebra(rng, 2, 3), random_algebra(rng, 2, 3)
        while A.dim > 10 or B.dim > 10:
            A, B = random_algebra(rng, 2, 3), random_algebra(rng, 2, 3)
        f = random_cp_map(A, B, rng.integers(1, 3, size=(len(A), len(B))), rng)
        expected = k % 2 == 0
        if not expected:
            f = _non_cp_variant(f, rng)
        disagreements += gram_is_psd(f) != expected or is_completely_positive(f) != expected
    return CriterionResult(
        0, "Gram oracle vs CP test", disagreements == 0, {"maps": n_maps, "disagreements": disagreements},
        time.perf_counter() - t0,
    )
