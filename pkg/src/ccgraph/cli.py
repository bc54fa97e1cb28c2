"""ccgraph command line: graph export, closures, analytics, verification, Jordan data."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from ccgraph import analytics, linalg
from ccgraph.closure import closure
from ccgraph.descriptor import RingSpecError
from ccgraph.export import FORMATS, atomic_write, load_or_build, render_graph, resolve_cache_dir
from ccgraph.rings import MatrixRingHandle, RingHandle, SizeGuardError, build_ring, decode_matrix
from ccgraph.verify import DEFAULT_SEED, SUITES, UnknownSuiteError, run_suite

log = logging.getLogger("ccgraph")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SIZE, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _ring(args) -> RingHandle:
    return build_ring(args.ring, allow_large=args.allow_large)


def _graph(args, ring: RingHandle):
    return load_or_build(ring, resolve_cache_dir(args.cache_dir), args.threads)


def parse_element(ring: RingHandle, text: str) -> int:
    """Integer id, or a JSON literal in the ring's decoded shape (e.g. [[0,1],[0,0]])."""
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse element {text!r}: {exc.msg}") from None
    if isinstance(value, int) and not isinstance(value, bool):
        if not 0 <= value < ring.size:
            raise UsageError(f"element {value} out of range for {ring.spec} (size {ring.size})")
        return value
    try:
        return ring.check(ring.from_literal(value))
    except (ValueError, TypeError, IndexError, KeyError) as exc:
        raise UsageError(f"element {text!r} is not a literal of {ring.spec}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_graph(args) -> int:
    ring = _ring(args)
    g = _graph(args, ring)
    _emit(render_graph(g, ring, args.format), args.out)
    return EXIT_OK


def cmd_closure(args) -> int:
    ring = _ring(args)
    a = parse_element(ring, args.element)
    res = closure(ring, [a], _graph(args, ring))
    members = []
    for m in sorted(res.level):
        row = {"id": m, "level": res.level[m]}
        if args.decode:
            row["decoded"] = ring.render(m)
        members.append(row)
    doc = {"ring": ring.spec, "element": a, "size": len(members), "max_level": res.depth, "members": members}
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    ring = _ring(args)
    g = _graph(args, ring)
    wanted_any = args.diameter or args.girth or args.distance
    doc: dict = {"ring": ring.spec}
    if args.element is not None:
        a = parse_element(ring, args.element)
        doc["element"] = a
        if args.diameter or not wanted_any:
            doc["class_diameter"] = analytics.class_diameter(g, a)
            doc["eccentricity"] = analytics.eccentricity(g, a)
        if args.girth or not wanted_any:
            doc["class_girth"] = analytics.class_girth(g, a)
    else:
        if args.diameter or not wanted_any:
            doc["diameter"] = analytics.ring_diameter(g)
        if args.girth or not wanted_any:
            doc["girth"] = analytics.ring_girth(g)
    if args.distance:
        a, b = (parse_element(ring, t) for t in args.distance)
        doc["distance"] = analytics.distance(g, a, b)
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.ring or None, seed=args.seed, threads=args.threads)
    text = report.to_json(timings=args.timings)
    if args.json:
        atomic_write(args.json, text)
    else:
        sys.stdout.write(text)
    s = report.summary
    for r in report.results:
        log.info("%-4s %s %s", r.status, r.check_id, r.ring)
    print(f"{report.suite}: {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_jordan(args) -> int:
    ring = _ring(args)
    if not isinstance(ring, MatrixRingHandle):
        raise UsageError(f"jordan needs a matrix ring M(n,F), got {ring.spec}")
    a = parse_element(ring, args.element)
    F, A = ring.field, decode_matrix(ring, a)
    cp = linalg.char_poly(F, A)
    fit = linalg.fitting_decomposition(F, A)
    nu = linalg.nilpotency_index(F, A)
    doc = {
        "ring": ring.spec,
        "element": a,
        "decoded": ring.render(a),
        "rank": linalg.rank(F, A),
        "rank_sequence": linalg.rank_sequence(F, A),
        "nilpotency_index": nu,
        "jordan_partition": list(linalg.jordan_partition(F, A).blocks) if nu is not None else None,
        "char_poly": {"coefficients": list(cp.coefficients), "rendered": cp.render(F)},
        "fitting": {
            "invertible_size": fit.invertible_size,
            "nilpotent_size": A.size - fit.invertible_size,
            "nilpotent_partition": (
                list(linalg.jordan_partition(F, fit.nilpotent_part).blocks)
                if fit.nilpotent_part is not None else []
            ),
        },
    }
    _emit(_dump(doc), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccgraph", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def ring_cmd(name, help_text, ring_required=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--ring", required=ring_required, help='ring spec, e.g. "M(2,GF(3))" or "Z(4)xGF(2)"')
        p.add_argument("--threads", type=int, default=1, help="worker threads for the pair sweep")
        p.add_argument("--cache-dir", help="graph cache directory (default: $CCGRAPH_CACHE)")
        p.add_argument("--allow-large", action="store_true", help="lift the 2^20 element guard")
        p.add_argument("--out", help="output file (default: stdout)")
        return p

    p = ring_cmd("graph", "export the commutation graph")
    p.add_argument("--format", choices=FORMATS, default="edgelist")
    p.set_defaults(func=cmd_graph)

    p = ring_cmd("closure", "closure of one element with S_i levels")
    p.add_argument("--element", required=True, help="element id or JSON literal")
    p.add_argument("--decode", action="store_true", help="include rendered elements")
    p.set_defaults(func=cmd_closure)

    p = ring_cmd("analyze", "diameter, girth and distances (all when no flag is given)")
    p.add_argument("--diameter", action="store_true")
    p.add_argument("--girth", action="store_true")
    p.add_argument("--distance", nargs=2, metavar=("A", "B"))
    p.add_argument("--element", help="report class-level quantities for this element's class")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, help=f"one of {', '.join(sorted(SUITES))}, all")
    p.add_argument("--ring", action="append", help="ring spec (repeatable; default: suite rings)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="include elapsed seconds (breaks byte-stability)")
    p.set_defaults(func=cmd_verify)

    p = ring_cmd("jordan", "rank sequence, Jordan partition, char poly and Fitting sizes of a matrix")
    p.add_argument("--element", required=True, help="element id or JSON literal")
    p.set_defaults(func=cmd_jordan)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except RingSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, UnknownSuiteError) as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
