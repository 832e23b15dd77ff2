"""Command-line front door.

Subcommands::

    spatialmin minimize --input m.json --output m.dot [--json out.json]
                        [--image] [--connectivity ortho|orthodiagonal] [--trace]
    spatialmin check    --input m.json (--formula TEXT | --formula-file F)
                        --output sat.json [--oracle]
    spatialmin equiv    --input m.json --points x,y [--general]

Exit codes: 0 success, 2 usage or input problems, 3 internal invariant
violation, 4 oracle mismatch.  All output is deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import checker, minimize as minimize_mod, model_io
from .closure_coalg import FiniteClosureSpace, iml_distinguishing_formula, iml_equivalence
from .formulas import FormulaSyntaxError, format_formula, parse
from .model import Model, SizeLimitError

__all__ = ["main", "entry"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3
EXIT_ORACLE = 4

_CONNECTIVITY = {"ortho": "orthogonal", "orthodiagonal": "orthodiagonal"}


class _InternalInvariantError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spatialmin",
        description="Minimize, model-check and compare quasi-discrete closure models.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_min = sub.add_parser("minimize", help="bisimulation-minimize a model")
    p_min.add_argument("--input", required=True, help="model document or image file")
    p_min.add_argument("--image", action="store_true", help="treat input as a PNG/BMP image")
    p_min.add_argument(
        "--connectivity", choices=sorted(_CONNECTIVITY), default="orthodiagonal",
        help="pixel adjacency for --image (default: orthodiagonal)",
    )
    p_min.add_argument("--output", required=True, help="DOT file for the minimal model")
    p_min.add_argument("--json", help="also write minimal model + projection as JSON")
    p_min.add_argument("--trace", action="store_true", help="dump per-round partitions")

    p_chk = sub.add_parser("check", help="compute the satisfaction set of a formula")
    p_chk.add_argument("--input", required=True, help="model document")
    grp = p_chk.add_mutually_exclusive_group(required=True)
    grp.add_argument("--formula", help="formula text")
    grp.add_argument("--formula-file", help="file containing the formula")
    p_chk.add_argument("--oracle", action="store_true",
                       help="cross-check against the brute-force oracle")
    p_chk.add_argument("--output", required=True, help="JSON file for the satisfaction set")

    p_eq = sub.add_parser("equiv", help="test two points for equivalence")
    p_eq.add_argument("--input", required=True, help="model document")
    p_eq.add_argument("--points", required=True, help="two point ids, comma separated")
    p_eq.add_argument("--general", action="store_true",
                      help="use the near-only modal equivalence instead")
    return ap


def _load_as_model(path) -> Model:
    loaded = model_io.load_document(path)
    if isinstance(loaded, FiniteClosureSpace):
        return loaded.to_model()
    return loaded


def _cmd_minimize(args) -> int:
    if args.image:
        opts = model_io.ImageOptions(connectivity=_CONNECTIVITY[args.connectivity])
        m = model_io.load_image_model(args.input, opts)
    else:
        m = _load_as_model(args.input)
    trace = minimize_mod.partition_refine(m)
    final = trace.final
    if args.trace:
        for r, part in enumerate(trace.rounds):
            assigns = " ".join(
                f"{pid}={part.of(i)}" for i, pid in enumerate(m.point_ids)
            )
            print(f"round {r} [{part.blocks} blocks]: {assigns}")
    q = minimize_mod.quotient(m, final)
    # projection must commute with the one-step observations
    for b in range(final.blocks):
        rep = m.id_of(int(final.members(b)[0]))
        bid = q.projection[rep]
        down_fwd = {q.projection[p] for p in m.forward_closure(rep).ids()}
        down_bwd = {q.projection[p] for p in m.backward_closure(rep).ids()}
        if down_fwd != set(q.model.forward_closure(bid).ids()) or down_bwd != set(
            q.model.backward_closure(bid).ids()
        ):
            raise _InternalInvariantError(
                f"projection is not an observation homomorphism at block {bid}"
            )
    dot = model_io.emit_dot(q.model, style="plain")
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(dot)
    if args.json:
        doc = {
            "version": model_io.SCHEMA_VERSION,
            "blocks": final.blocks,
            "model": json.loads(model_io.dumps_model(q.model)),
            "projection": {str(k): str(v) for k, v in sorted(q.projection.items(), key=lambda kv: str(kv[0]))},
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    print(f"blocks: {final.blocks}")
    return EXIT_OK


def _cmd_check(args) -> int:
    m = _load_as_model(args.input)
    if args.formula is not None:
        text = args.formula
    else:
        with open(args.formula_file, "r", encoding="utf-8") as fh:
            text = fh.read().strip()
    f = parse(text)
    result = checker.sat(m, f)
    ids = sorted((str(p) for p in result.sat.ids()))
    if args.oracle:
        oracle = checker.sat_oracle(m, f)
        if oracle.sat != result.sat:
            extra = sorted(str(p) for p in (result.sat - oracle.sat).ids())
            missing = sorted(str(p) for p in (oracle.sat - result.sat).ids())
            print(
                f"oracle mismatch: checker-only={extra} oracle-only={missing}",
                file=sys.stderr,
            )
            return EXIT_ORACLE
    doc = {"formula": text, "count": len(ids), "sat": ids}
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"satisfied at {len(ids)} of {m.n} points")
    return EXIT_OK


def _cmd_equiv(args) -> int:
    parts = args.points.split(",")
    if len(parts) != 2:
        print("--points needs exactly two comma-separated ids", file=sys.stderr)
        return EXIT_INPUT
    x, y = parts
    loaded = model_io.load_document(args.input)
    if args.general:
        space = loaded if isinstance(loaded, FiniteClosureSpace) else FiniteClosureSpace.from_model(loaded)
        xi, yi = space.index_of(x), space.index_of(y)
        part = iml_equivalence(space)
        if part.same_block(xi, yi):
            print("equivalent")
        else:
            formula = iml_distinguishing_formula(space, x, y)
            print(f"distinguished by: {format_formula(formula)}")
        return EXIT_OK
    m = loaded.to_model() if isinstance(loaded, FiniteClosureSpace) else loaded
    m.index_of(x)
    m.index_of(y)
    formula = minimize_mod.distinguishing_formula(m, x, y)
    if formula is None:
        print("equivalent")
    else:
        print(f"distinguished by: {format_formula(formula)}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_OK
    try:
        if args.command == "minimize":
            return _cmd_minimize(args)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_equiv(args)
    except (model_io.DocumentError, FormulaSyntaxError, SizeLimitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except _InternalInvariantError as e:
        print(f"internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
