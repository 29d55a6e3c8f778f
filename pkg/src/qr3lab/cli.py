"""Command line entry point: ``qr3lab <subcommand> ...``.

Exit codes: 0 success, 2 usage or input error, 3 refuted verdict under --assert,
4 guard violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction

from . import counting, experiments, generators, reduced, regularity
from ._search import default_workers
from .core import GuardError, HypergraphError, format_hypergraph, read_hypergraph, write_hypergraph
from .quasirandomness import Notion, deviation, is_quasirandom

EXIT_OK, EXIT_USAGE, EXIT_REFUTED, EXIT_GUARD = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _emit(doc, out=None) -> None:
    text = json.dumps(doc, indent=2, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _workers(args) -> int:
    return args.threads if args.threads else default_workers()


# --- subcommands ------------------------------------------------------------------

def cmd_generate(args) -> int:
    kind = args.construction
    if kind in ("random", "bichromatic", "tournament") and args.seed is None:
        raise UsageError(f"generate {kind} needs --seed")
    if kind == "random":
        if args.p is None:
            raise UsageError("generate random needs --p")
        H = generators.random_hypergraph(args.n, args.p, args.seed)
    elif kind == "bichromatic":
        phi = generators.random_colouring(args.n, args.seed)
        if args.aux:
            generators.write_text(generators.format_colouring(phi), args.aux)
        H = generators.bichromatic_hypergraph(phi)
    elif kind == "tournament":
        T = generators.random_tournament(args.n, args.seed)
        if args.aux:
            generators.write_text(generators.format_tournament(T), args.aux)
        H = generators.cyclic_triangle_hypergraph(T)
    else:
        H = generators.turan_construction(args.n)
    stats = {"construction": kind, "n": H.n, "seed": args.seed, "edges": H.num_edges,
             "density": float(H.density()) if H.n >= 3 else None, "out": args.out}
    if args.out:
        write_hypergraph(H, args.out)
        _emit(stats)
    else:
        sys.stdout.write(format_hypergraph(H))
        print(json.dumps(stats), file=sys.stderr)
    return EXIT_OK


def cmd_deviation(args) -> int:
    H = read_hypergraph(args.input, lenient=args.lenient)
    kw = dict(restarts=args.restarts, trials=args.trials, seed=args.seed, workers=_workers(args))
    if args.eta is not None:
        v = is_quasirandom(H, args.d, args.eta, args.notion, args.method, **kw)
        doc = dict(v.report.to_dict(), eta=float(v.eta), verdict=v.verdict)
        _emit(doc, args.out)
        return EXIT_REFUTED if args.assert_ and v.refuted else EXIT_OK
    if args.assert_:
        raise UsageError("--assert needs --eta")
    rep = deviation(H, args.d, args.notion, args.method, **kw)
    _emit(rep.to_dict(), args.out)
    return EXIT_OK


def cmd_count(args) -> int:
    H = read_hypergraph(args.input, lenient=args.lenient)
    F = counting.parse_pattern(args.pattern)
    labeled = counting.count_labeled(F, H)
    aut = counting.automorphisms(F)
    doc = {"pattern": F.label(), "n": H.n, "labeled": labeled, "automorphisms": aut,
           "unordered": labeled // aut}
    if H.n >= 3:
        p = float(H.density())
        doc["expected_labeled_at_density"] = counting.expected_labeled(F, H.n, p)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_regularity(args) -> int:
    H = read_hypergraph(args.hypergraph, lenient=args.lenient)
    kw = dict(restarts=args.restarts, trials=args.trials, seed=args.seed, workers=_workers(args))
    if args.kind == "triad":
        P = regularity.read_triad(args.triad)
        d3 = args.d3 if args.d3 is not None else regularity.relative_density(H, P)
        rep = regularity.triad_regularity(H, P, d3, args.method, args.delta3, **kw)
        doc = dict(rep.to_dict(), triangles=regularity.triangles(P),
                   relative_density=float(regularity.relative_density(H, P)))
        _emit(doc, args.out)
        return EXIT_REFUTED if args.assert_ and rep.verdict is False else EXIT_OK
    classes, parts = regularity.read_partition(args.partition)
    if args.kind == "partition":
        for name in ("d2", "delta2", "d3", "delta3"):
            if getattr(args, name) is None:
                raise UsageError(f"regularity partition needs --{name}")
        chk = regularity.check_partition(H, classes, parts, args.d2, args.delta2, args.d3, args.delta3,
                                         args.method, **kw)
        doc = {"ok": chk.ok, "equal_classes": chk.equal_classes,
               "irregular_pairs": [list(x) for x in chk.irregular_pairs],
               "sparse_or_dense": chk.sparse_or_dense,
               "irregular_triads": {",".join(map(str, k)): v for k, v in chk.irregular_triads.items()},
               "clause4": chk.clause4}
        _emit(doc, args.out)
        return EXIT_REFUTED if args.assert_ and not chk.ok else EXIT_OK
    # embedding: four classes, one part per pair
    if args.d3 is None or args.delta3 is None:
        raise UsageError("regularity embedding needs --d3 and --delta3")
    if len(classes) != 4 or any(len(p) != 1 for p in parts.values()):
        raise UsageError("regularity embedding needs four classes and exactly one part per pair")
    single = {k: v[0] for k, v in parts.items()}
    chk = regularity.embedding_hypotheses(H, classes, single, args.d3, args.delta3, args.method, **kw)
    doc = {"hypotheses_hold": chk.hypotheses_hold,
           "regular": {",".join(map(str, k)): v for k, v in chk.regular.items()},
           "dense": {",".join(map(str, k)): v for k, v in chk.dense.items()},
           "tetrahedron": list(chk.contains_k4) if chk.contains_k4 else None}
    _emit(doc, args.out)
    return EXIT_OK


def _load_reduced(args) -> reduced.ReducedHypergraph:
    sources = [x is not None for x in (args.input, args.random, args.complete, args.partition)]
    if sum(sources) != 1:
        raise UsageError("give exactly one of INPUT, --random, --complete, --partition")
    if args.input:
        return reduced.read_reduced(args.input)
    if args.random:
        m, size, density, seed = args.random
        return reduced.ReducedHypergraph.random(int(m), int(size), float(density), int(seed))
    if args.complete:
        m, size = args.complete
        return reduced.ReducedHypergraph.complete(m, size)
    if args.hypergraph is None or args.d3 is None:
        raise UsageError("--partition needs --hypergraph and --d3")
    H = read_hypergraph(args.hypergraph, lenient=args.lenient)
    classes, parts = regularity.read_partition(args.partition)
    return reduced.from_partition(H, classes, parts, args.d3)


def cmd_solve_reduced(args) -> int:
    A = _load_reduced(args)
    if args.save:
        reduced.write_reduced(A, args.save)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = reduced.lemma_solver(A, args.epsilon, args.delta)
    if isinstance(out, reduced.K4Pattern):
        doc = {"status": "pattern", **out.to_dict(), "valid": reduced.validate_pattern(A, out),
               "trace": out.trace}
    else:
        doc = out.to_dict()
    doc["warnings"] = [str(w.message) for w in caught]
    if args.brute_force:
        b = reduced.find_pattern_bruteforce(A)
        doc["brute_force"] = b.to_dict() if b else None
    _emit(doc, args.out)
    return EXIT_REFUTED if args.assert_ and doc["status"] != "pattern" else EXIT_OK


def cmd_experiment(args) -> int:
    params = {"n": args.n, "seeds": args.seeds, "p": args.p, "seed0": args.seed}
    if args.name in ("ev-trend", "oracle-dominance", "hierarchy", "regularity"):
        params["workers"] = _workers(args)
    exp = experiments.run(args.name, **params)
    if args.csv:
        exp.write_csv(args.csv)
    _emit(exp.summary, args.out)
    return EXIT_REFUTED if args.assert_ and not exp.passed else EXIT_OK


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qr3lab", description="Quasirandom 3-graph toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: QR3LAB_THREADS or CPU count)")
    common.add_argument("--out", help="output path (the .3hg file for generate, the JSON report otherwise)")
    common.add_argument("--lenient", action="store_true", help="accept unsorted or duplicate .3hg lines")
    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--method", choices=("exact", "ascent", "sample"), default="exact")
    search.add_argument("--restarts", type=int, default=20)
    search.add_argument("--trials", type=int, default=1000)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--assert", dest="assert_", action="store_true",
                        help="exit with code 3 if the verdict is negative")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a construction as .3hg")
    g.add_argument("construction", choices=("random", "bichromatic", "tournament", "turan"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--aux", help="also write the colouring or tournament here")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("deviation", parents=[common, search], help="deviation report for a .3hg file")
    d.add_argument("input")
    d.add_argument("--notion", type=Notion.parse, default=Notion.EV,
                   help="v, vv, vvv, e, ev, ee or eee")
    d.add_argument("--d", type=_fraction, default=None, help="reference density (default: edge density)")
    d.add_argument("--eta", type=_fraction, default=None, help="decide (d, eta)-quasirandomness")
    d.set_defaults(func=cmd_deviation)

    c = sub.add_parser("count", parents=[common], help="count copies of a small pattern")
    c.add_argument("input")
    c.add_argument("--pattern", default="k4", help="k4, k4minus, edge or 'v=4;012,013,023'")
    c.set_defaults(func=cmd_count)

    r = sub.add_parser("regularity", parents=[common, search], help="triad and partition checks")
    r.add_argument("kind", choices=("triad", "partition", "embedding"))
    r.add_argument("--hypergraph", required=True)
    r.add_argument("--triad", help="triad JSON (kind triad)")
    r.add_argument("--partition", help="partition JSON (kinds partition, embedding)")
    r.add_argument("--d2", type=_fraction)
    r.add_argument("--delta2", type=_fraction)
    r.add_argument("--d3", type=_fraction)
    r.add_argument("--delta3", type=_fraction)
    r.set_defaults(func=cmd_regularity)

    s = sub.add_parser("solve-reduced", parents=[common], help="run the three-step pattern search")
    s.add_argument("input", nargs="?", help="reduced hypergraph JSON")
    s.add_argument("--random", nargs=4, metavar=("M", "SIZE", "DENSITY", "SEED"))
    s.add_argument("--complete", nargs=2, type=int, metavar=("M", "SIZE"))
    s.add_argument("--partition", help="build from a partition JSON of --hypergraph")
    s.add_argument("--hypergraph")
    s.add_argument("--d3", type=_fraction)
    s.add_argument("--epsilon", type=_fraction, required=True)
    s.add_argument("--delta", type=_fraction, default=None, help="hole granularity (default epsilon/4)")
    s.add_argument("--brute-force", action="store_true", help="also run the exhaustive search")
    s.add_argument("--save", help="write the instance JSON here")
    s.add_argument("--assert", dest="assert_", action="store_true")
    s.set_defaults(func=cmd_solve_reduced)

    e = sub.add_parser("experiment", parents=[common], help="run a desk-scale experiment recipe")
    e.add_argument("name", choices=sorted(experiments.RECIPES))
    e.add_argument("--n", type=int)
    e.add_argument("--seeds", type=int)
    e.add_argument("--p", type=float)
    e.add_argument("--seed", type=int, help="first seed")
    e.add_argument("--csv", help="write per-run rows here")
    e.add_argument("--assert", dest="assert_", action="store_true")
    e.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        ap.error("--threads must be positive")
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"qr3lab: guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except UsageError as exc:
        print(f"qr3lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HypergraphError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"qr3lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
