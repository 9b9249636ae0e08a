#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Command line interface.

Subcommands:

* ``validate <config>``: report every problem in a model file
* ``invariant <config> --method {tree,direct,reversible}``: compute and write a measure
* ``compare <config>``: run every applicable method and check agreement
* ``ring-scaling <config> --N 100,200,400,800``: convergence of lattice walks
* ``mctt <chain.json>``: stationary vector of a finite chain, two ways

Exit codes: 0 on success, 1 on any arborist error or failed check, 2 on
usage errors. With ``--json`` errors are printed to stderr as a JSON object.
"""

import argparse
import json
import logging
import sys
import typing as t

import numpy as np

from . import __version__
from .config import read_json, diagnose, load_chain, load_config
from .discrete import convergence_table, mctt_stationary, stationary_linear
from .errors import ArboristError, MethodNotApplicableError
from .log import LOG_LEVEL_VARIABLE, configure_logging
from .report import FORMATS, MeasureReport, relative_difference
from .solver import (
    assemble_and_solve,
    is_reversible,
    reversible_invariant,
    stationarity_residuals,
    vertex_chain,
)
from .treemeasure import Measure, TreeFormula, ring_density_closed_form


logger = logging.getLogger(__name__)

METHODS = ("tree", "direct", "reversible")


def compute(config, method: str) -> Measure:
    """Invariant measure of a model by the named method"""
    diffusion = config.diffusion
    if method == "tree":
        return TreeFormula(diffusion).invariant_measure()
    if method == "direct":
        return assemble_and_solve(diffusion)
    if method == "reversible":
        return reversible_invariant(vertex_chain(diffusion), diffusion)
    raise MethodNotApplicableError(f"unknown method '{method}'; choose from {list(METHODS)}")


def _emit(text: str, out: t.Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args: argparse.Namespace) -> int:
    problems = diagnose(read_json(args.config))
    if args.json:
        document = {
            "valid": not problems,
            "errors": [{"location": p.location, "message": p.reason} for p in problems],
        }
        print(json.dumps(document, indent=2))
    elif problems:
        for problem in problems:
            print(f"{args.config}: {problem}")
    else:
        print(f"{args.config}: ok")
    return 1 if problems else 0


def cmd_invariant(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    measure = compute(config, args.method)
    report = MeasureReport(measure, stationarity_residuals(measure, config.diffusion))
    if args.out:
        report.write(args.out, args.format)
    else:
        _emit(report.to_json() + "\n" if args.format == "json" else report.to_csv(), None)
    return 0


def _closed_form(diffusion, reference: Measure) -> t.Optional[Measure]:
    """Ring closed form on the grid of ``reference``, borrowing its atom.

    Only rings whose loop germs carry equal weights qualify.
    """
    graph = diffusion.graph
    if len(graph.vertices) != 1 or len(graph.edges) != 1 or not graph.edges[0].is_loop:
        return None
    if len({diffusion.params.weight(g) for g in graph.all_germs()}) > 1:
        return None
    edge_id = graph.edge_ids[0]
    edge_mass = 1.0 - sum(reference.atoms.values())
    return Measure(
        atoms=dict(reference.atoms),
        grids=reference.grids,
        densities={
            edge_id: ring_density_closed_form(diffusion, reference.grids[edge_id], edge_mass)
        },
        currents={edge_id: np.nan},
        normalization=1.0,
        method="closed_form",
    )


def cmd_compare(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    diffusion = config.diffusion
    tolerance = config.numerics.compare_tol
    measures = {"tree": compute(config, "tree"), "direct": compute(config, "direct")}
    reversibility = is_reversible(vertex_chain(diffusion))
    if reversibility:
        measures["reversible"] = compute(config, "reversible")
    closed = _closed_form(diffusion, measures["direct"])
    if closed is not None:
        measures["closed_form"] = closed
    names = sorted(measures)
    differences = {
        f"{a}-{b}": relative_difference(measures[a], measures[b])
        for i, a in enumerate(names) for b in names[i + 1:]
    }
    residuals = {
        name: stationarity_residuals(measure, diffusion).as_dict()
        for name, measure in measures.items() if name != "closed_form"
    }
    failed = any(d > tolerance for d in differences.values()) or any(
        max(v for k, v in r.items() if k != "scale") > tolerance for r in residuals.values()
    )
    document = {
        "tolerance": tolerance,
        "reversible": bool(reversibility),
        "differences": differences,
        "residuals": residuals,
        "agree": not failed,
    }
    if not reversibility:
        document["certificate"] = [[e, d] for e, d in reversibility.certificate]
    print(json.dumps(document, indent=2))
    return 1 if failed else 0


def _sizes(text: str) -> t.List[int]:
    try:
        return [int(n) for n in text.split(",") if n.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_ring_scaling(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    sizes = args.N or list(config.scaling.sizes)
    table = convergence_table(config.diffusion, config.scaling.fields, sizes, config.scaling.c)
    _emit(table.to_csv(index=False, float_format="%.17g"), args.out)
    return 0


def cmd_mctt(args: argparse.Namespace) -> int:
    chain = load_chain(args.chain)
    tree = mctt_stationary(chain)
    linear = stationary_linear(chain)
    document = {
        "states": [str(s) for s in chain.states],
        "mctt": tree.tolist(),
        "linear": linear.tolist(),
        "max_difference": float(np.max(np.abs(tree - linear))),
    }
    print(json.dumps(document, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arborist",
        description="Invariant measures of diffusions on metric graphs.",
        epilog=f"Set {LOG_LEVEL_VARIABLE}=DEBUG for progress logging.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--json", action="store_true", help="machine-readable errors")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable errors"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser(
        "validate", help="check a model configuration", parents=[common]
    )
    validate.add_argument("config")
    validate.set_defaults(handler=cmd_validate)

    invariant = commands.add_parser(
        "invariant", help="compute the invariant measure", parents=[common]
    )
    invariant.add_argument("config")
    invariant.add_argument("--method", choices=METHODS, default="tree")
    invariant.add_argument("--out", help="output file (default: stdout)")
    invariant.add_argument("--format", choices=FORMATS, default="csv")
    invariant.set_defaults(handler=cmd_invariant)

    compare = commands.add_parser(
        "compare", help="cross-check every applicable method", parents=[common]
    )
    compare.add_argument("config")
    compare.set_defaults(handler=cmd_compare)

    scaling = commands.add_parser(
        "ring-scaling", help="lattice walk convergence on a ring", parents=[common]
    )
    scaling.add_argument("config")
    scaling.add_argument("--N", type=_sizes, help="comma-separated lattice sizes")
    scaling.add_argument("--out", help="output file (default: stdout)")
    scaling.set_defaults(handler=cmd_ring_scaling)

    mctt = commands.add_parser(
        "mctt", help="stationary vector of a finite chain", parents=[common]
    )
    mctt.add_argument("chain")
    mctt.set_defaults(handler=cmd_mctt)
    return parser


def _report_error(err: ArboristError, as_json: bool):
    if as_json:
        document = {
            "error": type(err).__name__,
            "message": str(err),
            "location": getattr(err, "location", ""),
        }
        print(json.dumps(document), file=sys.stderr)
    else:
        print(f"arborist: {type(err).__name__}: {err}", file=sys.stderr)


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        return args.handler(args)
    except ArboristError as err:
        logger.debug("command failed", exc_info=True)
        _report_error(err, args.json)
        return 1
