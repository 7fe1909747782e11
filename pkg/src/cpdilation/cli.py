"""Command-line interface.

Exit codes: 0 success or property true, 1 property false, 2 invalid input,
3 numerical failure. Inputs and outputs are JSON files (``-`` is stdin/stdout).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from . import serialize as js
from .algebra import Algebra
from .config import Tolerances
from .cpinf import (
    cpinf_compose,
    cpinf_from_cpmap,
    cpinf_to_cpmap,
    morita_equivalent,
    star_isomorphic,
    verify_star_isomorphism,
)
from .cpmap import (
    CPMap,
    choi_ranks,
    cp_violation,
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
    standard_module,
)
from .errors import DilationError, GeneratorFailureError, InvalidInputError, NumericalError
from .extremal import is_extremal, is_pure_state
from .oracles import random_channel, random_cp_map, random_density, vector_state

EXIT_OK, EXIT_FALSE, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# input helpers
# --------------------------------------------------------------------------


def _read(path: str):
    if path == "-":
        return js.loads(sys.stdin.read())
    return js.load_file(path)


def _write(obj, path: str | None):
    text = js.dumps(obj)
    if path in (None, "-"):
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _module(path: str | None, alg: Algebra) -> GeneratingModule:
    if path is None:
        return standard_module(alg)
    X = js.module_from_json(_read(path))
    if X.end != alg:
        raise InvalidInputError(f"module has End = {X.end.blocks}, the map needs {alg.blocks}")
    return X


def _modules(args, f: CPMap) -> tuple[GeneratingModule, GeneratingModule]:
    return _module(args.x, f.source), _module(args.y, f.target)


def _rep_modules(args, rep: Representation) -> tuple[GeneratingModule, GeneratingModule]:
    """``Y`` is read off the source of ``V``; ``X`` defaults to the standard module."""
    src = rep.V.source
    Y_default = GeneratingModule(src.right, src.mult[0]) if len(src.left) == 1 else None
    if args.x is not None:
        X = js.module_from_json(_read(args.x))
    else:
        X = standard_module(rep.environment.left)
    Y = js.module_from_json(_read(args.y)) if args.y is not None else Y_default
    if Y is None:
        raise InvalidInputError("cannot infer the target module; pass --y")
    return X, Y


def _tolerances(args) -> Tolerances:
    try:
        env = Tolerances.from_env()
    except ValueError as exc:
        raise InvalidInputError(f"bad tolerance in environment: {exc}") from exc
    tol = env.override(args.tol_rank, args.tol_eq)
    if not (tol.rank > 0 and tol.eq > 0 and np.isfinite(tol.rank) and np.isfinite(tol.eq)):
        raise InvalidInputError("tolerances must be positive and finite")
    return tol


def _blocks(text: str) -> Algebra:
    try:
        return Algebra(tuple(int(t) for t in text.split(",")))
    except ValueError as exc:
        raise InvalidInputError(f"bad block list {text!r}") from exc


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_dilate(args, tol: Tolerances) -> int:
    f = js.cpmap_from_json(_read(args.map))
    X, Y = _modules(args, f)
    if args.gns:
        if args.x is not None or args.y is not None:
            raise InvalidInputError("--gns works with standard modules only")
        rep = dilate_gns(f, tol.rank, tol.eq)
    else:
        rep = dilate_minimal(X, Y, f, tol.rank, tol.eq)
    certificate = {
        "choi_ranks": choi_ranks(f, tol.rank).tolist(),
        "environment_mult": [list(r) for r in rep.environment.mult],
        "kernel_dimension": morphism_kernel_dimension(X, rep, tol.rank),
        "reconstruction_error": distance(reconstruct(X, Y, rep), f),
    }
    certificate["minimal"] = (
        certificate["choi_ranks"] == certificate["environment_mult"] and certificate["kernel_dimension"] == 0
    )
    _write({"representation": js.representation_to_json(rep), "certificate": certificate}, args.output)
    return EXIT_OK


def cmd_reconstruct(args, tol: Tolerances) -> int:
    rep = js.representation_from_json(_read(args.representation))
    X, Y = _rep_modules(args, rep)
    _write(js.cpmap_to_json(reconstruct(X, Y, rep)), args.output)
    return EXIT_OK


def cmd_minimize(args, tol: Tolerances) -> int:
    rep = js.representation_from_json(_read(args.representation))
    X, Y = _rep_modules(args, rep)
    minimal, iota = minimize_representation(X, Y, rep, tol.rank)
    _write({"representation": js.representation_to_json(minimal), "iota": js.intertwiner_to_json(iota)}, args.output)
    return EXIT_OK


def cmd_check(args, tol: Tolerances) -> int:
    f = js.cpmap_from_json(_read(args.map))
    X, Y = _modules(args, f)
    wanted = [name for name in ("cp", "unital", "channel", "star_hom", "extremal", "pure") if getattr(args, name)]
    if not wanted:
        raise InvalidInputError("choose at least one property flag")
    report: dict = {}
    cp = is_completely_positive(f, tol.eq)
    if "cp" in wanted or not cp:
        entry = {"value": cp}
        if not cp:
            key, eig = cp_violation(f)
            entry.update(offending_block=list(key), min_eigenvalue=eig)
        report["cp"] = entry
    if "unital" in wanted:
        report["unital"] = {"value": is_unital(f, tol.eq), "unit_error": (f.unit_image() - f.target.unit()).norm()}
    if "channel" in wanted:
        report["channel"] = {"value": cp and is_unital(f, tol.eq)}
    if cp:
        if "star_hom" in wanted:
            value = is_star_homomorphism(X, Y, f, tol.eq, tol.rank)
            if value != is_multiplicative(f, tol.eq):
                raise NumericalError("the V-unitarity and multiplicativity tests disagree")
            report["star_hom"] = {"value": value}
        if "extremal" in wanted:
            r = is_extremal(X, Y, f, tol.rank, tol.eq)
            report["extremal"] = {"value": r.extremal, **js.report_to_json(r)}
        if "pure" in wanted:
            pure, env = is_pure_state(X, f, tol.rank, tol.eq)
            report["pure"] = {"value": pure, "environment_mult": list(env)}
    else:
        for name in (w for w in wanted if w in ("star_hom", "extremal", "pure")):
            report[name] = {"value": False, "reason": "map is not completely positive"}
    _write(report, args.output)
    return EXIT_OK if all(v["value"] for v in report.values()) else EXIT_FALSE


def cmd_compose(args, tol: Tolerances) -> int:
    f = js.cpmap_from_json(_read(args.first))
    g = js.cpmap_from_json(_read(args.second))
    if f.target != g.source:
        raise InvalidInputError("maps are not composable")
    X, Y, Z = _module(args.x, f.source), _module(args.y, f.target), _module(args.z, g.target)
    m = cpinf_compose(cpinf_from_cpmap(X, Y, f, tol=tol.eq), cpinf_from_cpmap(Y, Z, g, tol=tol.eq), tol.rank)
    _write({"cpmap": js.cpmap_to_json(cpinf_to_cpmap(m)), "representation": js.representation_to_json(m.normal_form)}, args.output)
    return EXIT_OK


def cmd_classify(args, tol: Tolerances) -> int:
    a, b = _read(args.first), _read(args.second)
    if args.morita:
        r, s = js.algebra_from_json(a), js.algebra_from_json(b)
        w = morita_equivalent(r, s)
        if w is None:
            _write({"equivalent": False}, args.output)
            return EXIT_FALSE
        out = {
            "equivalent": True,
            "bimodule": js.bimodule_to_json(w.bimodule),
            "inverse": js.bimodule_to_json(w.inverse),
            "unit_iso": js.intertwiner_to_json(w.unit_iso),
            "counit_iso": js.intertwiner_to_json(w.counit_iso),
        }
    else:
        X, Y = js.module_from_json(a), js.module_from_json(b)
        w = star_isomorphic(X, Y)
        if w is None:
            _write({"equivalent": False}, args.output)
            return EXIT_FALSE
        if not verify_star_isomorphism(X, Y, w, tol.eq):
            raise NumericalError("the isomorphism witness failed verification")
        out = {
            "equivalent": True,
            "equivalence": js.bimodule_to_json(w.equivalence),
            "U": js.intertwiner_to_json(w.U),
            "ad_U": js.cpmap_to_json(w.ad_U),
        }
    _write(out, args.output)
    return EXIT_OK


def cmd_random(args, tol: Tolerances) -> int:
    rng = np.random.default_rng(args.seed)
    A = _blocks(args.source)
    if args.kind == "state":
        B = Algebra((1,))
        weights = rng.dirichlet(np.ones(len(A)))
        f = vector_state(A, [w * random_density(n, n, rng) for w, n in zip(weights, A.blocks)])
    else:
        if args.target is None:
            raise InvalidInputError("--target is required")
        B = _blocks(args.target)
        gen = random_channel if args.kind == "channel" else random_cp_map
        f = gen(A, B, args.kraus, rng)
    _write(js.cpmap_to_json(f), args.output)
    return EXIT_OK


def cmd_verify(args, tol: Tolerances) -> int:
    results = acceptance.run_all(args.criteria)
    if args.oracles:
        results.insert(0, acceptance.oracle_checks())
    stream = sys.stderr if args.report == "-" else sys.stdout
    for r in results:
        print(r.line(), file=stream)
    passed = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} passed", file=stream)
    if args.report is not None:
        report = {
            "passed": passed,
            "criteria": [
                {"number": r.number, "name": r.name, "passed": r.passed, "seconds": r.seconds, "details": r.details}
                for r in results
            ],
        }
        _write(report, args.report)
    return EXIT_OK if passed else EXIT_FALSE


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=None, help="rank tolerance (default 1e-9)")
    common.add_argument("--tol-eq", type=float, default=None, help="equality tolerance (default 1e-8)")
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    modules = argparse.ArgumentParser(add_help=False)
    modules.add_argument("--x", default=None, help="source generating module JSON (default standard)")
    modules.add_argument("--y", default=None, help="target generating module JSON (default standard)")

    p = _Parser(prog="cpdilation", description="Stinespring dilations of CP maps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("dilate", parents=[common, modules], help="minimal representation of a CP map")
    s.add_argument("map")
    s.add_argument("--gns", action="store_true", help="use the GNS construction")
    s.set_defaults(func=cmd_dilate)

    for name, fn, text in (
        ("reconstruct", cmd_reconstruct, "CP map of a representation"),
        ("minimize", cmd_minimize, "minimize a representation"),
    ):
        s = sub.add_parser(name, parents=[common, modules], help=text)
        s.add_argument("representation")
        s.set_defaults(func=fn)

    s = sub.add_parser("check", parents=[common, modules], help="test properties of a map")
    s.add_argument("map")
    for flag in ("cp", "unital", "channel", "extremal", "pure"):
        s.add_argument(f"--{flag}", action="store_true")
    s.add_argument("--star-hom", dest="star_hom", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("compose", parents=[common, modules], help="g o f through environment fusion")
    s.add_argument("first", help="f: X -> Y")
    s.add_argument("second", help="g: Y -> Z")
    s.add_argument("--z", default=None, help="module for the target of g")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("classify", parents=[common], help="Morita equivalence or *-isomorphism")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--morita", action="store_true", help="inputs are algebras")
    mode.add_argument("--iso", action="store_true", help="inputs are generating modules")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("random", parents=[common], help="seeded random map")
    s.add_argument("kind", choices=["cp", "channel", "state"])
    s.add_argument("--source", required=True, help="block sizes, e.g. 2,3")
    s.add_argument("--target", default=None, help="block sizes, e.g. 2")
    s.add_argument("--kraus", type=int, default=2, help="Kraus operators per block pair")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_random)

    s = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    s.add_argument("--criteria", type=int, nargs="+", choices=range(1, 12), default=None)
    s.add_argument("--oracles", action="store_true", help="also run the oracle agreement check")
    s.add_argument("--report", default=None, help="write the JSON report here ('-' for stdout)")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args, _tolerances(args))
    except (GeneratorFailureError, NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DilationError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
