"""Command-line interface: ``modlayout {layout,cluster,eval,gen,render}``.

Exit codes: 0 success, 2 input error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import io
from .clustering import maximize_modularity
from .energy import EnergyParams, ar_energy
from .equivalence import (cluster_densities, consistency_report, normalized_energy,
                          verify_equivalence)
from .graph import Clustering, InputError, Layout, Network, NumericError
from .layout import LayoutOptions, minimize_energy
from .netgen import PlantedPartitionSpec, figure2_networks, planted_partition, two_vertex_network
from .render import render_svg

__all__ = ["main", "auto_r", "build_parser"]

POSITION_DIGITS = 9
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def auto_r(net: Network) -> tuple[float, float]:
    """Repulsion exponent from the modularity of the best clustering found.

    Returns ``(r, modularity)``: -2 above 0.5, -1 below 0.3, else -1.5
    (boundary values fall in the middle band).
    """
    _, q = maximize_modularity(net)
    if q > 0.5:
        return -2.0, q
    if q < 0.3:
        return -1.0, q
    return -1.5, q


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _common(p: argparse.ArgumentParser, energy: bool = True) -> None:
    p.add_argument("input", help="edge list: source<TAB>target[<TAB>weight]")
    p.add_argument("--vertex-weights", default="degree", metavar="{unit|degree|file=PATH}")
    if energy:
        p.add_argument("-a", type=float, default=0.0, help="attraction exponent (default 0)")
        p.add_argument("-r", default="-1", help="repulsion exponent or 'auto' (default -1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modlayout", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("layout", help="energy-minimizing layout")
    _common(p)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--exact", action="store_true", help="disable Barnes-Hut approximation")
    p.add_argument("-o", "--output", help="positions file (default: standard output)")
    p.add_argument("--svg", help="also render an SVG")

    p = sub.add_parser("cluster", help="modularity clustering")
    _common(p, energy=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="assignment file (default: standard output)")
    p.add_argument("--svg", help="render the clustering (needs --layout)")
    p.add_argument("--layout", help="positions file used by --svg")

    p = sub.add_parser("eval", help="report on a layout and/or clustering")
    _common(p)
    p.add_argument("--layout", help="positions file")
    p.add_argument("--clustering", help="assignment file")
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("-o", "--output", help="report file (default: standard output)")

    p = sub.add_parser("gen", help="generate a fixture network")
    p.add_argument("kind", choices=("planted", "figure2", "two-vertex"))
    p.add_argument("--k", type=int, default=8, help="planted: cluster count")
    p.add_argument("--size", type=int, default=16, help="planted: vertices per cluster")
    p.add_argument("--p-in", type=float, default=1.0)
    p.add_argument("--p-out", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=("direct", "subdivided"), default="direct",
                   help="figure2: bridge edge or weight-0 midpoint")
    p.add_argument("--weights", type=float, nargs=3, default=(1.0, 1.0, 1.0),
                   metavar=("W_UV", "W_U", "W_V"), help="two-vertex weights")
    p.add_argument("-o", "--output", required=True, help="edge list file")
    p.add_argument("--truth", help="planted: write the generating clustering here")
    p.add_argument("--vertex-weights-out", help="write the vertex weights here")

    p = sub.add_parser("render", help="SVG of a layout")
    p.add_argument("input")
    p.add_argument("--vertex-weights", default="degree")
    p.add_argument("--layout", required=True)
    p.add_argument("--clustering")
    p.add_argument("--no-edges", action="store_true")
    p.add_argument("-o", "--output", required=True)
    return parser


def _write(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _params(args, net: Network) -> EnergyParams:
    if args.r == "auto":
        r, _ = auto_r(net)
        return EnergyParams(0.0, r)
    try:
        r = float(args.r)
    except ValueError:
        raise InputError(f"-r must be a number or 'auto' (got {args.r!r})") from None
    return EnergyParams(args.a, r)


def _load_layout(net: Network, path) -> Layout:
    labels, pos = io.read_positions(path)
    return Layout(io.align_to_network(net, labels, pos, "layout"))


def _load_clustering(net: Network, path) -> Clustering:
    labels, ids = io.read_assignment(path)
    return Clustering.from_labels(io.align_to_network(net, labels, ids, "clustering"))


def cmd_layout(args) -> int:
    net = io.read_network(args.input, args.vertex_weights)
    params = _params(args, net)
    opts = LayoutOptions(dimension=args.dim, max_iterations=args.iters, seed=args.seed,
                         convergence_tol=args.tol, theta=args.theta,
                         use_barnes_hut=False if args.exact else None)
    res = minimize_energy(net, params, opts)
    _write(args.output, io.format_positions(net.labels, res.positions, POSITION_DIGITS))
    if args.svg:
        _write(args.svg, render_svg(net, res.layout))
    print(f"a={params.a:g} r={params.r:g} energy={res.energy:.9g} "
          f"iterations={res.iterations} converged={str(res.converged).lower()}", file=sys.stderr)
    return EXIT_OK


def cmd_cluster(args) -> int:
    net = io.read_network(args.input, args.vertex_weights)
    clustering, q = maximize_modularity(net, seed=args.seed)
    text = io.format_assignment(net.labels, clustering)
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    print(f"modularity={q:.6f}")
    if args.svg:
        if not args.layout:
            raise InputError("--svg needs --layout")
        _write(args.svg, render_svg(net, _load_layout(net, args.layout), clustering))
    return EXIT_OK


def _fmt_value(x) -> str:
    if x is None:
        return "NA"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "NA" if math.isnan(x) else f"{x:.9g}"


def cmd_eval(args) -> int:
    net = io.read_network(args.input, args.vertex_weights)
    if not args.layout and not args.clustering:
        raise InputError("eval needs --layout and/or --clustering")
    layout = _load_layout(net, args.layout) if args.layout else None
    clustering = _load_clustering(net, args.clustering) if args.clustering else None
    params = _params(args, net)
    a, r = params.a, params.r
    rows: list[tuple[str, object]] = [("a", a), ("r", r), ("n", net.n), ("m", net.m)]
    if layout is not None:
        try:
            exact = ar_energy(net, layout, params)
        except NumericError:
            exact = None
        try:
            norm = normalized_energy(net, layout, a, r)
        except NumericError:
            norm = None
        rows += [("energy", exact), ("normalized_energy", norm)]
    if clustering is not None:
        # the residual does not depend on the exponents inside their domain
        ea, er = (a, r) if a > -1 and r > -1 else (0.0, -0.5)
        check = verify_equivalence(net, clustering, ea, er)
        rows += [("clusters", clustering.k), ("modularity", check.modularity),
                 ("simplex_energy", check.energy), ("equivalence_residual", check.residual),
                 ("equivalence_pass", check.passed)]
        if layout is not None:
            report = consistency_report(net, layout, clustering, a, r)
            rows.append(("separation_ratio", report.separation_ratio))
            rows += [kv for kv in report.items()
                     if kv[0].startswith(("density_within", "density_between"))]
        else:
            D = cluster_densities(net, clustering)
            rows += [(f"density_within[{c}]", D[c, c]) for c in range(clustering.k)]
            rows += [(f"density_between[{c},{d}]", D[c, d])
                     for c in range(clustering.k) for d in range(c + 1, clustering.k)]
    sep = "\t" if args.format == "tsv" else "="
    text = "".join(f"{k}{sep}{_fmt_value(v)}\n" for k, v in rows)
    if args.format == "tsv":
        text = f"key\tvalue\n{text}"
    _write(args.output, text)
    return EXIT_OK


def cmd_gen(args) -> int:
    truth = None
    if args.kind == "planted":
        net, truth = planted_partition(PlantedPartitionSpec(args.k, args.size, args.p_in,
                                                            args.p_out, args.seed))
    elif args.kind == "figure2":
        net = figure2_networks()[0 if args.variant == "direct" else 1]
    else:
        net = two_vertex_network(*args.weights)
    if net.m == 0:
        raise InputError("generated network has no edges; nothing to write")
    if args.truth and truth is None:
        raise InputError("--truth applies to planted networks only")
    try:
        io.write_edge_list(net, args.output)
        if args.truth:
            io.write_assignment(net.labels, truth, args.truth)
        if args.vertex_weights_out:
            io.write_vertex_weights(net, args.vertex_weights_out)
    except OSError as exc:
        raise InputError(f"{exc.filename}: {exc.strerror}") from None
    return EXIT_OK


def cmd_render(args) -> int:
    net = io.read_network(args.input, args.vertex_weights)
    layout = _load_layout(net, args.layout)
    clustering = _load_clustering(net, args.clustering) if args.clustering else None
    _write(args.output, render_svg(net, layout, clustering, edges=not args.no_edges))
    return EXIT_OK


COMMANDS = {"layout": cmd_layout, "cluster": cmd_cluster, "eval": cmd_eval,
            "gen": cmd_gen, "render": cmd_render}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SystemExit as exc:      # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
