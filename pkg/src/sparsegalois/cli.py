"""Command-line entry point: ``sparsegalois {analyze,monodromy,mixed-volume,connectivity}``."""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from .criterion import inductive_connectivity
from .errors import InputError, NumericalError, ParseError, SparseGaloisError
from .lattice import AbelianPresentation, IntMatrix
from .polytope import lattice_mixed_volume
from .report import SCHEMA_VERSION, analyze_report, monodromy_section, to_json, to_text
from .tuples import SupportTuple, normalize

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise ParseError("document must be an object with \"version\": 1")
    return doc


def _int_vec(v, n, what):
    if not isinstance(v, list) or len(v) != n or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise ParseError(f"{what}: expected {n} integers, got {v!r}")
    return tuple(v)


def parse_tuple(doc: dict) -> SupportTuple:
    n = doc.get("n")
    sups = doc.get("supports")
    if not isinstance(n, int) or n < 1:
        raise ParseError("\"n\" must be a positive integer")
    if not isinstance(sups, list) or len(sups) != n:
        raise ParseError(f"\"supports\" must list exactly n = {n} sets")
    sets = []
    for i, s in enumerate(sups):
        if not isinstance(s, list) or not s:
            raise ParseError(f"support {i} must be a nonempty list of vectors")
        sets.append([_int_vec(p, n, f"support {i}") for p in s])
    return SupportTuple.of(sets, n)


def _matrix(cols, k, what) -> IntMatrix:
    if not isinstance(cols, list):
        raise ParseError(f"\"{what}\" must be a list of columns")
    return IntMatrix.from_columns([_int_vec(c, k, what) for c in cols], k)


def cmd_analyze(args) -> dict:
    return analyze_report(parse_tuple(_load(args.path)))


def cmd_monodromy(args) -> dict:
    from .monodromy.checks import poisson_divisibility_check, verify_wreath_structure
    from .monodromy.run import RunConfig, run_monodromy

    t = parse_tuple(_load(args.path))
    report = analyze_report(t)
    report["command"] = "monodromy"
    config = RunConfig(budget=args.budget, seed=args.seed, newton_tol=args.newton_tol, match_tol=args.match_tol)
    run = run_monodromy(t, config=config)
    wreath = verify_wreath_structure(run)
    basis = [tuple(int(i == k) for i in range(t.dim)) for k in range(t.dim)]
    poisson = [poisson_divisibility_check(run, b) for b in basis]
    report["monodromy"] = monodromy_section(run, wreath, poisson)
    report["config"] = {"seed": args.seed, "budget": args.budget, "newton_tol": args.newton_tol,
                        "match_tol": args.match_tol, "stable_loops": config.stable_loops}
    if run.budget_exhausted:
        report["warnings"] = ["budget exhausted before the run stabilized"]
    return report


def cmd_mixed_volume(args) -> dict:
    t = parse_tuple(_load(args.path))
    return {"schema_version": SCHEMA_VERSION, "command": "mixed-volume",
            "input": {"n": t.dim, "supports": t.to_lists()},
            "mixed_volume": lattice_mixed_volume(*normalize(t).sets)}


def cmd_connectivity(args) -> dict:
    doc = _load(args.path)
    k = doc.get("ambient_generators")
    if not isinstance(k, int) or k < 0:
        raise ParseError("\"ambient_generators\" must be a nonnegative integer")
    rel = [_int_vec(c, k, "relations") for c in doc.get("relations", [])]
    ambient = AbelianPresentation.from_relations(rel, k)
    cover = _matrix(doc.get("cover_image", []), k, "cover_image")
    subset = _matrix(doc.get("subset_image", []), k, "subset_image")
    return {"schema_version": SCHEMA_VERSION, "command": "connectivity",
            "input": {"ambient_generators": k, "relations": [list(r) for r in rel],
                      "cover_image": [list(c) for c in cover.columns()],
                      "subset_image": [list(c) for c in subset.columns()]},
            "connected": inductive_connectivity(cover, subset, ambient)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsegalois", description="Galois groups of sparse polynomial systems.")
    p.add_argument("--format", choices=["json", "text"], default="text")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="combinatorial report and verdict")
    a.add_argument("path")
    a.set_defaults(func=cmd_analyze)
    m = sub.add_parser("monodromy", help="numerical monodromy run")
    m.add_argument("path")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--budget", type=int, default=400)
    m.add_argument("--newton-tol", type=float, default=1e-12)
    m.add_argument("--match-tol", type=float, default=1e-4)
    m.set_defaults(func=cmd_monodromy)
    v = sub.add_parser("mixed-volume", help="lattice-normalized mixed volume")
    v.add_argument("path")
    v.set_defaults(func=cmd_mixed_volume)
    c = sub.add_parser("connectivity", help="inductive connectivity of a subset preimage")
    c.add_argument("path")
    c.set_defaults(func=cmd_connectivity)
    for s in (a, m, v, c):
        s.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    warnings.simplefilter("ignore", RuntimeWarning)
    try:
        report = args.func(args)
    except InputError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, SparseGaloisError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(to_json(report) if args.format == "json" else to_text(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
