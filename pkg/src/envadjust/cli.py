"""Command-line interface: adjust, test, plot, simulate.

Exit codes: 0 success, 2 input or validation error, 3 pointwise tie under
the strict policy, 4 permutation degeneracy (retry cap exhausted).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adjust import compute_report
from .curves import Direction, TiePolicy
from .errors import (
    DegeneratePermutationsError,
    InputValidationError,
    PointwiseTieError,
)
from .io import (
    RunManifest,
    read_curves_csv,
    read_report_json,
    read_twogroup_csv,
    write_curves_csv,
    write_report_csv,
    write_report_json,
)
from .permutation import permutation_curves
from .plotting import render_report_svg
from .simulate import SimConfig, fwer_experiment

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TIES = 3
EXIT_DEGENERATE = 4


def _common_flags(p, with_permutation: bool):
    p.add_argument(
        "--direction",
        choices=[d.value for d in Direction],
        default=Direction.TWO_SIDED.value,
    )
    p.add_argument(
        "--ties",
        choices=[t.value for t in TiePolicy],
        default=TiePolicy.STRICT.value,
    )
    if with_permutation:
        p.add_argument("-M", "--permutations", type=int, default=4000,
                       help="ensemble size including the observed curve")
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envadjust",
        description="Envelope tests and multiplicity-adjusted pointwise "
        "p-values for curve ensembles.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("adjust", help="adjust a precomputed statistic ensemble")
    p.add_argument("curves_csv")
    _common_flags(p, with_permutation=False)

    p = sub.add_parser("test", help="permutation test for two-group data")
    p.add_argument("data_csv")
    _common_flags(p, with_permutation=True)

    p = sub.add_parser("plot", help="render the two-panel SVG figure")
    p.add_argument("report_json")
    p.add_argument("curves_csv")
    p.add_argument("--alpha", default="0.05")
    p.add_argument("-o", "--output", default="report.svg", help="output SVG path")

    p = sub.add_parser("simulate", help="Monte Carlo check of FWER control")
    p.add_argument("--config", help="JSON file with SimConfig fields")
    p.add_argument("--n0", type=int, default=15)
    p.add_argument("--n1", type=int, default=15)
    p.add_argument("-G", "--grid-size", type=int, default=40)
    p.add_argument("-M", "--permutations", type=int, default=200)
    p.add_argument("-R", "--replicates", type=int, default=1000)
    p.add_argument("--alpha", default="0.05")
    p.add_argument("--noise", choices=["gp", "iid"], default="gp")
    p.add_argument("--length-scale", type=float, default=0.1)
    p.add_argument("--signal-scale", type=float, default=0.0,
                   help="constant shift added to group 1 on the upper half of the grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=".", help="output directory")
    return parser


def _outdir(args) -> Path:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit_report(curves, args, outdir: Path, manifest: RunManifest) -> None:
    report = compute_report(curves, args.direction)
    write_report_csv(outdir / "report.csv", report)
    write_report_json(outdir / "report.json", report, manifest.core())
    manifest.write(outdir / "manifest.json")


def _cmd_adjust(args) -> int:
    outdir = _outdir(args)
    curves = read_curves_csv(args.curves_csv, args.ties)
    manifest = RunManifest(
        subcommand="adjust",
        inputs={"curves_csv": str(args.curves_csv)},
        direction=args.direction,
        n_permutations=curves.n_curves,
        seed=None,
        tie_policy=args.ties,
        alpha=None,
        outputs={"report_csv": "report.csv", "report_json": "report.json"},
    )
    _emit_report(curves, args, outdir, manifest)
    return EXIT_OK


def _cmd_test(args) -> int:
    outdir = _outdir(args)
    data = read_twogroup_csv(args.data_csv)
    curves = permutation_curves(data, args.permutations, args.seed, args.ties)
    write_curves_csv(outdir / "curves.csv", curves)
    manifest = RunManifest(
        subcommand="test",
        inputs={"data_csv": str(args.data_csv)},
        direction=args.direction,
        n_permutations=args.permutations,
        seed=args.seed,
        tie_policy=args.ties,
        alpha=None,
        outputs={
            "report_csv": "report.csv",
            "report_json": "report.json",
            "curves_csv": "curves.csv",
        },
    )
    _emit_report(curves, args, outdir, manifest)
    return EXIT_OK


def _cmd_plot(args) -> int:
    report, manifest = read_report_json(args.report_json)
    ties = manifest.get("tie_policy") or report.tie_policy
    curves = read_curves_csv(args.curves_csv, ties)
    svg = render_report_svg(curves, report, args.alpha)
    out = Path(args.output)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    return EXIT_OK


def _sim_config(args) -> SimConfig:
    if args.config:
        try:
            body = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputValidationError(f"cannot read config {args.config}: {exc}")
        if body.get("signal") is not None:
            body["signal"] = tuple(body["signal"])
        try:
            return SimConfig(**body)
        except TypeError as exc:
            raise InputValidationError(f"bad config {args.config}: {exc}")
    signal = None
    if args.signal_scale != 0.0:
        g = args.grid_size
        signal = tuple(
            args.signal_scale if i >= g // 2 else 0.0 for i in range(g)
        )
    return SimConfig(
        n0=args.n0,
        n1=args.n1,
        grid_size=args.grid_size,
        n_permutations=args.permutations,
        replicates=args.replicates,
        alpha=args.alpha,
        noise=args.noise,
        length_scale=args.length_scale,
        signal=signal,
        seed=args.seed,
    )


def _cmd_simulate(args) -> int:
    outdir = _outdir(args)
    config = _sim_config(args)
    result = fwer_experiment(config)
    (outdir / "simulation.json").write_text(
        json.dumps(result.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )
    (outdir / "simulation.txt").write_text(result.table() + "\n", encoding="utf-8")
    RunManifest(
        subcommand="simulate",
        inputs={"config": str(args.config) if args.config else None},
        direction="two-sided",
        n_permutations=config.n_permutations,
        seed=config.seed,
        tie_policy=TiePolicy.STRICT.value,
        alpha=str(config.alpha),
        outputs={"summary_json": "simulation.json", "table": "simulation.txt"},
    ).write(outdir / "manifest.json")
    print(result.table())
    return EXIT_OK


_HANDLERS = {
    "adjust": _cmd_adjust,
    "test": _cmd_test,
    "plot": _cmd_plot,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.subcommand](args)
    except PointwiseTieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIES
    except DegeneratePermutationsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
