"""Command-line harness: generation, classification, localization,
trilateration sweeps, comparison reports, and SVG rendering.

Exit codes: 0 success, 2 input error, 3 precondition unmet (no leader,
generator gave up), 4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import files
from .files import FileFormatError, derive_seed, dump_json
from .network import (
    GenerationError,
    NetworkError,
    classify_all,
    generate_honeycomb_family,
    generate_random,
)
from .protocol import run_simulation, verify_localization
from .trilateration import (
    SweepStats,
    enumerate_triangles,
    sweep_all_triangles,
    trilaterate_from,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _parse_region(spec: str) -> tuple[float, float]:
    try:
        w, h = spec.lower().split("x")
        return float(w), float(h)
    except ValueError as e:
        raise FileFormatError(f"bad --region {spec!r}, expected WxH") from e


def cmd_generate(args) -> int:
    if args.kind == "random":
        width, height = _parse_region(args.region)
        seed = derive_seed(args.seed, "generate")
        net = generate_random(args.n, width, height, args.range, seed)
    else:
        net = generate_honeycomb_family(args.k, r=args.range)
    _write_out(dump_json(files.network_to_dict(net)), args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    net = files.load_network(args.network)
    classes = classify_all(net)
    counts: dict[str, int] = {}
    for cls in classes.values():
        counts[cls.value] = counts.get(cls.value, 0) + 1
    doc = {
        "schema": "commwheel-classes/1",
        "nodes": [{"id": v, "class": classes[v].value} for v in net.ids],
        "counts": counts,
    }
    _write_out(dump_json(doc), args.out)
    return EXIT_OK


def cmd_localize(args) -> int:
    net = files.load_network(args.network)
    result = run_simulation(net, seed=derive_seed(args.seed, "localize"))
    report = verify_localization(result, net)
    _write_out(dump_json(files.result_to_dict(result, report)), args.out)
    if args.trace is not None:
        with open(args.trace, "w") as fh:
            fh.write(files.trace_to_jsonl(result))
    if result.no_leader:
        print("no leader: strong interior empty or disconnected; "
              "classification written, localization skipped", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def _sweep_chunk(payload) -> dict:
    path, chunk = payload
    net = files.load_network(path)
    return {tuple(t): trilaterate_from(net, tuple(t)).count for t in chunk}


def cmd_trilaterate(args) -> int:
    net = files.load_network(args.network)
    if args.triangle is not None:
        try:
            tri = tuple(int(x) for x in args.triangle.split(","))
        except ValueError as e:
            raise FileFormatError(f"bad --triangle {args.triangle!r}") from e
        if len(tri) != 3:
            raise FileFormatError("--triangle needs exactly three ids")
        run = trilaterate_from(net, tri)
        doc = {
            "schema": "commwheel-trilateration/1",
            "triangle": list(run.triangle),
            "localized_count": run.count,
            "sweeps": run.sweeps,
            "nodes": [{"id": v, "pos": [run.positions[v].x, run.positions[v].y]}
                      for v in sorted(run.positions)],
        }
        _write_out(dump_json(doc), args.out)
        return EXIT_OK
    if args.jobs > 1:
        triangles = enumerate_triangles(net)
        if len(triangles) > args.limit:
            stats = sweep_all_triangles(net, limit=args.limit,
                                        seed=derive_seed(args.seed, "sweep"))
        else:
            chunks = [triangles[i::args.jobs] for i in range(args.jobs)]
            stats = SweepStats(triangle_count=len(triangles), sampled=False)
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for part in pool.map(_sweep_chunk,
                                     [(args.network, c) for c in chunks]):
                    stats.counts.update(part)
    else:
        stats = sweep_all_triangles(net, limit=args.limit,
                                    seed=derive_seed(args.seed, "sweep"))
    _write_out(files.sweep_to_csv(stats), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    net = files.load_network(args.network)
    result = run_simulation(net, seed=derive_seed(args.seed, "localize"))
    report = verify_localization(result, net)
    stats = sweep_all_triangles(net, limit=args.limit,
                                seed=derive_seed(args.seed, "sweep"))
    doc = {
        "schema": "commwheel-compare/1",
        "wheel": {
            "localized": len(result.localized),
            "total": net.n,
            "leader": result.leader,
            "no_leader": result.no_leader,
        },
        "trilateration": {
            "triangles": stats.triangle_count,
            "sampled": stats.sampled,
            "best": stats.best,
            "worst": stats.worst,
            "histogram": {str(k): v for k, v in stats.histogram().items()},
        },
        "theorem6_inclusion":
            report.theorem6_holds if report.theorem6_applicable else "skipped",
    }
    _write_out(dump_json(doc), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    net = files.load_network(args.network)
    if args.result is not None:
        result = files.load_result(args.result)
        svg = files.render_svg(net, result=result)
    else:
        svg = files.render_svg(net, classes=classify_all(net))
    _write_out(svg, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commwheel",
        description="Anchor-free localization of unit-disk sensor networks "
                    "via communication wheels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a network file")
    gsub = p.add_subparsers(dest="kind", required=True)
    pr = gsub.add_parser("random", help="uniform random connected network")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--region", required=True, help="WxH in range units")
    pr.add_argument("--range", type=float, default=1.0)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_generate)
    ph = gsub.add_parser("honeycomb",
                         help="family on which trilateration stalls")
    ph.add_argument("--k", type=int, required=True)
    ph.add_argument("--range", type=float, default=1.0)
    ph.add_argument("--out")
    ph.set_defaults(func=cmd_generate)

    p = sub.add_parser("classify", help="node classes from the wheel algorithm")
    p.add_argument("network")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("localize", help="run the localization protocol")
    p.add_argument("network")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--trace", help="write the message trace as JSON lines")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("trilaterate", help="trilateration run or sweep")
    p.add_argument("network")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--sweep", action="store_true", default=True)
    group.add_argument("--triangle", help="a,b,c seed ids for a single run")
    p.add_argument("--limit", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_trilaterate)

    p = sub.add_parser("compare",
                       help="wheel protocol vs trilateration sweep")
    p.add_argument("network")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=100_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("render", help="SVG drawing of a network")
    p.add_argument("network")
    p.add_argument("--result", help="result file for localization coloring")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, FileFormatError, NetworkError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except GenerationError as e:
        print(f"generation failed: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except AssertionError as e:
        print(f"internal assertion failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
