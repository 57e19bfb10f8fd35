"""Command line interface: ``colorgraphs <subcommand> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors (bad flags, unreadable or malformed graph files).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .bounds import LemmaInapplicable, TheoremViolation, certified_lower_bound
from .canonical import canonical_form
from .graphcore import GraphValidationError, face_profile
from .io import FORMAT_VERSION, ParseError, dumps_json, load_fixtures, read_graph, serialize_graph
from .matching import max_faces
from .moments import DEFAULT_NU, RNG_NAME, factorization_diagnostic, mc_estimate, moment_polynomial
from .survey import (
    Mode,
    SurveyConfig,
    SurveyError,
    count_colored_graphs,
    default_workers,
    run_survey,
    verify_fixture_set,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, command: str, result: dict, text: str) -> None:
    if args.json:
        sys.stdout.write(dumps_json({"format_version": FORMAT_VERSION, "command": command, "result": result}))
    else:
        print(text)


def _graph(args):
    try:
        return read_graph(args.graph)
    except OSError as exc:
        raise UsageError(f"--graph: cannot read {args.graph}: {exc.strerror}") from exc
    except (ParseError, GraphValidationError) as exc:
        raise UsageError(f"--graph: {args.graph}: {exc}") from exc


def cmd_survey(args) -> int:
    config = SurveyConfig(args.n, Mode(args.mode), workers=args.workers, checkpoint=args.checkpoint,
                          out=args.out, exact_all=args.exact_all)
    report = run_survey(config)
    res = report.results
    hist = ", ".join(f"{k}: {v}" for k, v in res["mst_max_f_histogram"].items())
    text = (f"n={res['n']} mode={res['mode']}: {res['class_count']} classes, MST {res['mst_count']}, "
            f"max_f over MST {{{hist}}}, violators {res['violator_count']}")
    result = dict(res)
    if args.full:
        result["classes"] = report.records
    result["provenance"] = report.provenance
    _emit(args, "survey", result, text)
    return EXIT_OK


def cmd_verify_fixtures(args) -> int:
    try:
        graphs = load_fixtures(args.fixtures)
    except OSError as exc:
        raise UsageError(f"--fixtures: cannot read {args.fixtures}: {exc.strerror}") from exc
    except (ParseError, GraphValidationError) as exc:
        raise UsageError(f"--fixtures: {exc}") from exc
    report = verify_fixture_set(graphs)
    maxima = sorted({g["max_f"] for g in report["graphs"]})
    text = (f"{report['passed']}/{report['count']} pass: MST, non-bipartite, "
            f"maxF={','.join(map(str, maxima))}")
    if report["failed"]:
        text += f"\nfailed graph rows: {', '.join(map(str, report['failed']))}"
    _emit(args, "verify-fixtures", report, text)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_max_faces(args) -> int:
    G = _graph(args)
    bound = "none" if args.exact else args.bound
    res = max_faces(G, args.budget, bound=bound, count_maximizers=args.count)
    result = {
        "n": G.n, "max_f": res.max_f, "exact": res.exact, "maximizer_count": res.maximizer_count,
        "matchings_examined": res.matchings_examined, "pruned": res.pruned,
        "witness": [list(e) for e in res.witness.edges()], "bound": bound,
    }
    text = str(res.max_f) if res.exact else f"{res.max_f} (lower bound: budget exhausted)"
    _emit(args, "max-faces", result, text)
    return EXIT_OK


def cmd_bound(args) -> int:
    G = _graph(args)
    try:
        cert = certified_lower_bound(G)
    except TheoremViolation as exc:
        _emit(args, "bound", {"n": G.n, "error": str(exc)}, f"no certificate: {exc}")
        return EXIT_FAIL
    result = cert.to_dict()
    result["n"] = G.n
    result["exceeds_threshold"] = 2 * cert.bound > 3 * G.n
    _emit(args, "bound", result, f"{cert.bound} ({cert.rule.value})")
    return EXIT_OK


def cmd_moment(args) -> int:
    G = _graph(args)
    poly = moment_polynomial(G, args.nu, force=args.force)
    result = poly.to_dict()
    result["code"] = canonical_form(G).hex()
    lines = ["  ".join(f"{c}*N^{e}" for e, c in sorted(poly.terms.items(), reverse=True))]
    if args.eval is not None:
        value = poly.evaluate(args.eval)
        result["eval"] = {"N": args.eval, "value": str(value)}
        lines.append(f"<Tr_G> at N={args.eval}: {value}")
    if args.mc is not None:
        mean, err = mc_estimate(G, args.N, args.mc, args.seed, args.nu)
        result["mc"] = {"N": args.N, "samples": args.mc, "seed": args.seed, "rng": RNG_NAME,
                        "mean": mean, "stderr": err}
        lines.append(f"Monte Carlo at N={args.N}: {mean:.6g} +- {err:.2g}")
    if args.diagnostic:
        result["diagnostic"] = factorization_diagnostic(G, args.nu)
        lines.append(f"violates: {result['diagnostic']['violates']}")
    _emit(args, "moment", result, "\n".join(lines))
    return EXIT_OK


def cmd_canon(args) -> int:
    G = _graph(args)
    form = canonical_form(G, permute_colors=args.color_orbit)
    prof = face_profile(G)
    result = {"n": G.n, "code": form.hex(), "color_orbit": args.color_orbit,
              "profile": list(prof.as_tuple()), "connected": prof.connected, "bipartite": prof.bipartite,
              "record": serialize_graph(G, "explicit")}
    _emit(args, "canon", result, form.hex())
    return EXIT_OK


def cmd_count_classes(args) -> int:
    count = count_colored_graphs(args.n)
    _emit(args, "count-classes", {"n": args.n, "count": count}, str(count))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")

    p = argparse.ArgumentParser(prog="colorgraphs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("survey", parents=[common], help="single-face-pair survey at fixed n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.SINGLE_FACE_PAIR.value)
    s.add_argument("--workers", type=int, default=default_workers())
    s.add_argument("--checkpoint", type=Path)
    s.add_argument("--out", type=Path, help="write the full report JSON here")
    s.add_argument("--exact-all", action="store_true", help="exact maximum for non-MST classes too")
    s.add_argument("--full", action="store_true", help="include per-class records in --json output")
    s.set_defaults(func=cmd_survey)

    s = sub.add_parser("verify-fixtures", parents=[common], help="check the bundled 41 graphs")
    s.add_argument("--fixtures", type=Path)
    s.set_defaults(func=cmd_verify_fixtures)

    s = sub.add_parser("max-faces", parents=[common], help="max over color-0 matchings of F(M, G)")
    s.add_argument("--graph", type=Path, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="visit every matching")
    g.add_argument("--pruned", action="store_true", help="branch and bound (default)")
    s.add_argument("--bound", choices=["tight", "simple"], default="tight")
    s.add_argument("--budget", type=int)
    s.add_argument("--count", action="store_true", help="count all maximizers")
    s.set_defaults(func=cmd_max_faces)

    s = sub.add_parser("bound", parents=[common], help="constructive lower-bound certificate")
    s.add_argument("--graph", type=Path, required=True)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("moment", parents=[common], help="exact Gaussian moment <Tr_G(T)>")
    s.add_argument("--graph", type=Path, required=True)
    s.add_argument("--nu", type=int, default=DEFAULT_NU)
    s.add_argument("--eval", type=int, metavar="N")
    s.add_argument("--mc", type=int, metavar="SAMPLES")
    s.add_argument("--N", type=int, default=2, help="tensor dimension for --mc")
    s.add_argument("--force", action="store_true", help="lift the n <= 8 enumeration guard")
    s.add_argument("--diagnostic", action="store_true", help="factorization diagnostic")
    s.set_defaults(func=cmd_moment)

    s = sub.add_parser("canon", parents=[common], help="canonical code")
    s.add_argument("--graph", type=Path, required=True)
    s.add_argument("--color-orbit", action="store_true", help="also minimize over color permutations")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("count-classes", parents=[common], help="connected classes (full sweep, n <= 5)")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_count_classes)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"colorgraphs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SurveyError, ValueError, LemmaInapplicable) as exc:
        print(f"colorgraphs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
