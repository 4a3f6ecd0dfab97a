"""Command-line interface.

Verbs: gen, metrics, mantel, network, heatmap, transpile, run.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DataFormatError, NonFiniteMetricError, StageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; this artifact reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_gen(sub):
    p = sub.add_parser("gen", help="generate synthetic tuning curves")
    p.add_argument("-o", "--output", required=True, help="curve CSV to write")
    p.add_argument("--neurons", type=int, default=76)
    p.add_argument("--stimuli", type=int, default=9)
    p.add_argument("--sigma", type=float, default=1.2)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--box", default="400,400,80", help="x,y,z extents in um")
    p.add_argument("--seed", type=int, default=0)


def _add_metrics(sub):
    p = sub.add_parser("metrics", help="compute one metric's distance matrix")
    p.add_argument("-i", "--input", required=True, help="curve CSV")
    p.add_argument("--metric", required=True)
    p.add_argument("--mode", choices=["analytic", "shots"], default="analytic")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--outdir", required=True)


def _add_mantel(sub):
    p = sub.add_parser("mantel", help="Mantel test between two matrix CSVs")
    p.add_argument("--a", required=True, help="first matrix CSV")
    p.add_argument("--b", required=True, help="second matrix CSV")
    p.add_argument("--permutations", type=int, default=999)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="result JSON (default: stdout)")


def _add_network(sub):
    p = sub.add_parser("network", help="build a functional network from a matrix")
    p.add_argument("--matrix", required=True, help="matrix JSON (or CSV with --orientation)")
    p.add_argument("--orientation", choices=["similarity", "dissimilarity"])
    p.add_argument("--curves", help="curve CSV supplying node positions")
    p.add_argument("--kind", choices=["mst", "top"], default="mst")
    p.add_argument("--percent", type=float, help="edge percentage for --kind top")
    p.add_argument("--format", choices=["graphml", "json"], default="graphml")
    p.add_argument("-o", "--output", required=True)


def _add_heatmap(sub):
    p = sub.add_parser("heatmap", help="render a matrix as an SVG heatmap")
    p.add_argument("--matrix", required=True, help="matrix JSON (or CSV with --orientation)")
    p.add_argument("--orientation", choices=["similarity", "dissimilarity"])
    p.add_argument("-o", "--output", required=True)


def _add_transpile(sub):
    p = sub.add_parser("transpile", help="lower a circuit to native gates")
    p.add_argument("-i", "--input", required=True, help="circuit text file")
    p.add_argument("--ddd", action="store_true", help="insert XYXY trains in idle windows")
    p.add_argument("--min-window", type=int, default=4)
    p.add_argument("-o", "--output", required=True, help="lowered circuit text file")
    p.add_argument("--census", help="write a census JSON here")


def _add_run(sub):
    p = sub.add_parser("run", help="run the whole pipeline")
    p.add_argument("-o", "--outdir", required=True)
    p.add_argument("--config", help="key = value config file; flags win")
    p.add_argument("--input", help="curve CSV (omit to generate synthetic data)")
    p.add_argument("--metrics", help="comma-separated metric names")
    p.add_argument("--mode", choices=["analytic", "shots"])
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--permutations", type=int)
    p.add_argument("--networks", help="comma-separated: mst,top:5,top:10")
    p.add_argument("--neurons", type=int)
    p.add_argument("--stimuli", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--noise", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--box")
    p.add_argument("--jobs", type=int)
    p.add_argument("--skip-degenerate", action="store_const", const=1, dest="skip_degenerate")
    p.add_argument("--no-figures", action="store_const", const=0, dest="figures")


def build_parser() -> _Parser:
    parser = _Parser(prog="qfnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_gen, _add_metrics, _add_mantel, _add_network, _add_heatmap,
                _add_transpile, _add_run):
        add(sub)
    return parser


def _load_matrix(path: str, orientation: str | None):
    from .metrics import MetricSpec, matrix_from_csv, matrix_from_json

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return matrix_from_json(text)
    if orientation is None:
        raise SystemExit(
            _usage_error("--orientation is required for CSV matrices")
        )
    spec = MetricSpec(
        "euclidean" if orientation == "dissimilarity" else "classical_fidelity",
        orientation=orientation,
    )
    return matrix_from_csv(text, spec)


def _usage_error(message: str) -> int:
    print(f"qfnet: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _cmd_gen(args) -> int:
    from .synthetic import SyntheticSpec, curves_to_csv, generate_synthetic

    box = tuple(float(p) for p in args.box.split(","))
    if len(box) != 3:
        return _usage_error("--box needs three comma-separated extents")
    spec = SyntheticSpec(
        neurons=args.neurons, stimuli=args.stimuli, sigma=args.sigma,
        noise=args.noise, amplitude=args.amplitude, box=box, seed=args.seed,
    )
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(curves_to_csv(generate_synthetic(spec)))
    print(f"wrote {spec.neurons} curves to {args.output}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    import os
    from concurrent.futures import ThreadPoolExecutor

    from .io import ingest_csv
    from .metrics import (
        MetricSpec, build_distance_matrix, matrix_to_csv, matrix_to_json,
        to_canonical_distance,
    )

    curves = ingest_csv(args.input)
    spec = MetricSpec(args.metric, mode=args.mode, shots=args.shots, seed=args.seed)
    executor = ThreadPoolExecutor(max_workers=args.jobs) if args.jobs > 1 else None
    try:
        m = build_distance_matrix(curves, spec, executor=executor)
    finally:
        if executor is not None:
            executor.shutdown()
    os.makedirs(args.outdir, exist_ok=True)
    base = os.path.join(args.outdir, spec.name)
    for suffix, text in (
        (".csv", matrix_to_csv(m)),
        (".json", matrix_to_json(m)),
        (".canonical.csv", matrix_to_csv(to_canonical_distance(m))),
    ):
        with open(base + suffix, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(f"wrote {base}.csv / .json / .canonical.csv ({m.size} neurons)")
    return EXIT_OK


def _cmd_mantel(args) -> int:
    from .metrics import matrix_from_csv, matrix_from_json
    from .stats import mantel

    mats = []
    for path in (args.a, args.b):
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        mats.append(
            matrix_from_json(text) if path.endswith(".json") else matrix_from_csv(text)
        )
    result = mantel(mats[0], mats[1], permutations=args.permutations, seed=args.seed)
    doc = result.to_json(metric_a=args.a, metric_b=args.b)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        print(doc, end="")
    return EXIT_OK


def _cmd_network(args) -> int:
    from .io import ingest_csv
    from .netgraph import export_graph, mst, top_percent_network

    m = _load_matrix(args.matrix, args.orientation)
    positions = None
    if args.curves:
        curves = {c.neuron_id: c.position for c in ingest_csv(args.curves)}
        try:
            positions = [curves[nid] for nid in m.neuron_ids]
        except KeyError as exc:
            raise DataFormatError(f"curve CSV is missing neuron {exc}") from exc
    if args.kind == "mst":
        net = mst(m, positions)
    else:
        if args.percent is None:
            return _usage_error("--kind top requires --percent")
        net = top_percent_network(m, args.percent, positions)
    with open(args.output, "wb") as fh:
        fh.write(export_graph(net, args.format))
    print(f"wrote {args.output} ({len(net.edges)} edges)")
    return EXIT_OK


def _cmd_heatmap(args) -> int:
    from .heatmap import render_heatmap_svg

    m = _load_matrix(args.matrix, args.orientation)
    render_heatmap_svg(m, args.output)
    print(f"wrote {args.output} ({m.size}x{m.size} cells)")
    return EXIT_OK


def _cmd_transpile(args) -> int:
    import json as _json

    from .circuits import from_text, to_text
    from .transpile import insert_ddd_xyxy, lower

    with open(args.input, "r", encoding="utf-8") as fh:
        circuit = from_text(fh.read())
    lowered = lower(circuit, provenance=args.input)
    if args.ddd:
        lowered = insert_ddd_xyxy(lowered, min_window=args.min_window)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(to_text(lowered.circuit))
    if args.census:
        census = lowered.census
        doc = {
            "source": args.input,
            "total_gates": census.total_gates,
            "per_kind": census.per_kind,
            "two_qubit_gates": census.two_qubit_gates,
            "depth": census.depth,
        }
        with open(args.census, "w", encoding="utf-8") as fh:
            fh.write(_json.dumps(doc, indent=2) + "\n")
    print(
        f"wrote {args.output}: {lowered.census.total_gates} gates, "
        f"depth {lowered.census.depth}"
    )
    return EXIT_OK


def _cmd_run(args) -> int:
    from .pipeline import config_from_sources, load_config_file, run_pipeline

    file_values = load_config_file(args.config) if args.config else None
    flag_values = {
        key: getattr(args, key)
        for key in (
            "input", "metrics", "mode", "shots", "seed", "permutations",
            "networks", "neurons", "stimuli", "sigma", "noise", "amplitude",
            "box", "jobs", "skip_degenerate", "figures",
        )
    }
    config = config_from_sources(args.outdir, file_values, flag_values)
    manifest = run_pipeline(config)
    print(
        f"run complete: {manifest['neurons']} neurons, "
        f"{len(manifest['config']['metrics'])} metrics, "
        f"outputs in {config.outdir}"
    )
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "metrics": _cmd_metrics,
    "mantel": _cmd_mantel,
    "network": _cmd_network,
    "heatmap": _cmd_heatmap,
    "transpile": _cmd_transpile,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except StageError as exc:
        cause = exc.__cause__
        print(f"qfnet: {exc}", file=sys.stderr)
        if isinstance(cause, (DataFormatError, NonFiniteMetricError)):
            return EXIT_DATA
        if exc.stage == "internal":
            return EXIT_INTERNAL
        return EXIT_DATA
    except (DataFormatError, NonFiniteMetricError) as exc:
        print(f"qfnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"qfnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"qfnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit:
        raise
    except Exception as exc:  # invariant violations and bugs
        print(f"qfnet: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
