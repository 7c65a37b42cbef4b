"""Command-line interface: ``aitrust {validate,pagerank,trustrank,assess,sweep,catalog}``.

Exit codes: 0 success, 1 parse or validation failure, 2 usage error,
3 non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .assessment import ClassificationThresholds, assess, edge_perturbation, seed_sweep
from .catalog import SCENARIO_IDS, altai_catalog, find_requirement, scenario_graph
from .formats import (
    GraphSyntaxError,
    GraphValidationError,
    emit_dot,
    emit_report_json,
    emit_scores_csv,
    parse_graph_text,
)
from .graph import validate_graph
from .ranking import ConvergenceWarning, RankParams, pagerank, trustrank
from .svg import emit_svg_bars

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _styled(text: str, code: str) -> str:
    if os.environ.get("NO_COLOR") or not sys.stderr.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


def _diag(kind: str, message: str) -> None:
    colour = "31" if kind == "error" else "33"
    print(f"{_styled(kind + ':', colour)} {message}", file=sys.stderr)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aitrust",
        description="PageRank/TrustRank trustworthiness assessment of layered AI-system graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def input_args(p):
        p.add_argument("file", nargs="?", help="graph model file ('-' for stdin)")
        p.add_argument("--scenario", choices=SCENARIO_IDS, help="use a bundled scenario instead of FILE")

    def rank_args(p, seeds: bool, formats: tuple[str, ...], default: str):
        input_args(p)
        if seeds:
            p.add_argument("--seeds", required=True, help="comma-separated trusted node tokens")
            p.add_argument(
                "--normalize",
                choices=("iteration", "final"),
                default="iteration",
                help="TrustRank normalization: every sweep (default) or once at the end",
            )
        p.add_argument("--alpha", type=float, default=0.85, help="damping/decay factor (default 0.85)")
        p.add_argument("--epsilon", type=float, default=1e-8, help="convergence threshold (default 1e-8)")
        p.add_argument("--max-iter", type=_positive_int, default=1000, help="iteration cap (default 1000)")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("-o", "--output", help="write to this path instead of stdout")
        p.add_argument("--strict", action="store_true", help="exit 3 if any run fails to converge")

    p = sub.add_parser("validate", help="check a graph model file")
    input_args(p)

    rank_args(sub.add_parser("pagerank", help="PageRank scores"), False, ("csv", "json", "dot", "svg"), "csv")
    rank_args(sub.add_parser("trustrank", help="TrustRank scores"), True, ("csv", "json", "dot", "svg"), "csv")

    p = sub.add_parser("assess", help="rank, classify and aggregate")
    rank_args(p, True, ("json", "csv", "dot", "svg"), "json")
    p.add_argument("--theta", type=float, default=0.5, help="dominance ratio for conditions A/B")
    p.add_argument("--cutoff", type=float, default=None, help="explicit high/low score cutoff")

    p = sub.add_parser("sweep", help="seed and edge sensitivity tables")
    rank_args(p, True, ("csv", "json"), "csv")
    p.add_argument("--workers", type=_positive_int, default=None, help="parallel variant workers")

    p = sub.add_parser("catalog", help="list the ALTAI requirements")
    p.add_argument("--requirement", help="show one requirement (key or title)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("-o", "--output")
    return parser


def _load_graph(args, validate: bool = True):
    if (args.file is None) == (args.scenario is None):
        raise UsageError("give exactly one of FILE or --scenario")
    if args.scenario:
        return scenario_graph(args.scenario).graph
    try:
        if args.file == "-":
            text, source = sys.stdin.read(), "<stdin>"
        else:
            text, source = Path(args.file).read_text(encoding="utf-8"), args.file
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror or exc}") from None
    return parse_graph_text(text, validate=validate, source=source)


def _params(args) -> RankParams:
    try:
        return RankParams(args.alpha, args.epsilon, args.max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _seeds(args, graph) -> list[str]:
    seeds = [s.strip() for s in args.seeds.split(",") if s.strip()]
    if not seeds:
        raise UsageError("--seeds needs at least one node token")
    missing = [s for s in seeds if s not in graph]
    if missing:
        raise UsageError(f"seed(s) not in graph: {', '.join(missing)}")
    return seeds


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _vector_json(label: str, vec) -> str:
    doc = {
        "label": label,
        "iterations": vec.iterations,
        "converged": vec.converged,
        "values": {k: vec[k] for k in sorted(vec)},
    }
    return json.dumps(doc, indent=2) + "\n"


def _emit_vectors(args, graph, vectors) -> str:
    if args.format == "csv":
        return emit_scores_csv(vectors)
    if args.format == "json":
        if len(vectors) == 1:
            return _vector_json(*vectors[0])
        return json.dumps([json.loads(_vector_json(*v)) for v in vectors], indent=2) + "\n"
    if args.format == "dot":
        return emit_dot(graph, vectors[-1][1])
    return emit_svg_bars(vectors, title=graph.title or "")


def _timestamp() -> str | None:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


def _cmd_validate(args) -> int:
    graph = _load_graph(args, validate=False)
    violations = validate_graph(graph)
    for v in violations:
        _diag("error", str(v))
    if violations:
        return EXIT_INVALID
    print(f"ok: {len(graph.nodes)} nodes, {len(graph.edges)} edges, {graph.orientation.value}")
    return EXIT_OK


def _cmd_pagerank(args):
    graph = _load_graph(args)
    vec = pagerank(graph, _params(args))
    _write(args, _emit_vectors(args, graph, [("PageRank", vec)]))
    return [vec]


def _cmd_trustrank(args):
    graph = _load_graph(args)
    seeds = _seeds(args, graph)
    vec = trustrank(graph, seeds, _params(args), normalize=args.normalize)
    _write(args, _emit_vectors(args, graph, [("TrustRank{" + ",".join(seeds) + "}", vec)]))
    return [vec]


def _cmd_assess(args):
    graph = _load_graph(args)
    seeds = _seeds(args, graph)
    try:
        thresholds = ClassificationThresholds(args.theta, args.cutoff)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = assess(
        graph, seeds, _params(args), thresholds, normalize=args.normalize, timestamp=_timestamp()
    )
    if args.format == "json":
        _write(args, emit_report_json(report))
    else:
        label = "TrustRank{" + ",".join(report.seeds) + "}"
        _write(args, _emit_vectors(args, graph, [("PageRank", report.pagerank), (label, report.trustrank)]))
    return [report.pagerank, report.trustrank]


def _cmd_sweep(args):
    graph = _load_graph(args)
    seeds = _seeds(args, graph)
    params = _params(args)
    sweep = seed_sweep(graph, seeds, params, normalize=args.normalize, workers=args.workers)
    edges = edge_perturbation(graph, seeds, params, normalize=args.normalize, workers=args.workers)
    for w in sweep.warnings:
        _diag("warning", w)
    tokens = graph.tokens
    if args.format == "json":
        doc = {
            "seed_sweep": [
                {
                    "variant": r.variant,
                    "seeds": list(r.seeds),
                    "max_delta": r.max_delta,
                    "deltas": {k: r.deltas[k] for k in tokens},
                }
                for r in sweep.rows
            ],
            "edge_perturbation": [
                {
                    "edge": list(e.edge),
                    "pagerank_delta": e.pagerank_delta,
                    "trustrank_delta": e.trustrank_delta,
                }
                for e in edges
            ],
            "warnings": list(sweep.warnings),
        }
        _write(args, json.dumps(doc, indent=2) + "\n")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["variant", "seeds", "max_delta", *tokens])
        for r in sweep.rows:
            w.writerow([r.variant, " ".join(r.seeds), f"{r.max_delta:.6f}", *(f"{r.deltas[t]:+.6f}" for t in tokens)])
        buf.write("\n")
        w.writerow(["edge", "pagerank_delta", "trustrank_delta"])
        for e in edges:
            w.writerow([f"{e.edge[0]} -> {e.edge[1]}", f"{e.pagerank_delta:.6f}", f"{e.trustrank_delta:.6f}"])
        _write(args, buf.getvalue())
    return [r.scores for r in sweep.rows] + [e.trustrank for e in edges]


def _cmd_catalog(args) -> int:
    if args.requirement:
        try:
            reqs = [find_requirement(args.requirement)]
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    else:
        reqs = altai_catalog()
    if args.format == "json":
        doc = [
            {
                "key": r.key,
                "title": r.title,
                "description": r.description,
                "aspects": list(r.aspects),
                "meta_analysis": r.meta_analysis,
            }
            for r in reqs
        ]
        _write(args, json.dumps(doc, indent=2) + "\n")
    else:
        lines = []
        for r in reqs:
            lines.append(f"{r.title}  [{r.key}]")
            lines.append(f"  {r.description}")
            lines.extend(f"  - {a}" for a in r.aspects)
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "pagerank": _cmd_pagerank,
    "trustrank": _cmd_trustrank,
    "assess": _cmd_assess,
    "sweep": _cmd_sweep,
    "catalog": _cmd_catalog,
}


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConvergenceWarning)
            result = _COMMANDS[args.command](args)
        for w in caught:
            _diag("warning", str(w.message))
    except UsageError as exc:
        _diag("error", str(exc))
        return EXIT_USAGE
    except (GraphSyntaxError, InputError) as exc:
        _diag("error", str(exc))
        return EXIT_INVALID
    except GraphValidationError as exc:
        for v in exc.violations:
            _diag("error", str(v))
        return EXIT_INVALID
    if isinstance(result, int):
        return result
    if getattr(args, "strict", False) and not all(v.converged for v in result):
        _diag("error", "non-convergence under --strict")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())
