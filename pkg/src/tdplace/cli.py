"""``tdplace`` command line: gen, place, sta, report-paths, compare, plot.

Exit status is 0 on success, 1 for invalid input (files, configs, designs)
and 2 for runtime or numeric failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .compare import ablation_configs, cmd_compare
from .errors import (
    EndpointError,
    GenerationError,
    MismatchError,
    ParseError,
    TDPlaceError,
    ValidationError,
)
from .files import load_placement, read_json, write_json, write_text
from .generator import GeneratorSpec, generate_synthetic
from .netlist import build_timing_graph, dumps_design, load_design
from .paths import report_timing, report_timing_endpoint
from .placer import OptimizerConfig, run_placement
from .sta import run_sta

INPUT_ERRORS = (ParseError, ValidationError, GenerationError, MismatchError, EndpointError,
                FileNotFoundError, IsADirectoryError, ValueError)


def _config(path, overrides=None) -> OptimizerConfig:
    data = dict(read_json(path)) if path else {}
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return OptimizerConfig.from_dict(data)


def cmd_gen(args):
    spec = GeneratorSpec(seed=args.seed, n_cells=args.cells, n_registers=args.registers,
                         avg_fanout=args.fanout, target_fail_fraction=args.fail_frac,
                         core_size=args.core, depth=args.depth)
    write_text(args.output, dumps_design(generate_synthetic(spec)))
    print(f"wrote {args.output}")


def cmd_place(args):
    design = load_design(args.design)
    cfg = _config(args.config, {"seed": args.seed, "workers": args.workers,
                                "max_iters": args.max_iters})
    res = run_placement(design, cfg)
    out = Path(args.output)
    write_json(out / "config.json", res.config.to_dict())
    write_json(out / "placement.json", res.placement_dict(design.netlist))
    write_text(out / "metrics.csv", res.trace.to_csv())
    write_json(out / "weights.json", res.weights.to_dict(design.netlist))
    print(f"iterations {res.iterations}  hpwl {res.hpwl:.6g}  overflow {res.overflow:.4f}  "
          f"tns {res.tns:.6g}  wns {res.wns:.6g}  ({res.runtime:.1f} s)")


def cmd_sta(args):
    design = load_design(args.design)
    xy = load_placement(args.placement, design)
    ann = run_sta(build_timing_graph(design.netlist), design.netlist, design.constraints, xy)
    write_json(args.output, ann.to_dict(design.netlist))
    print(f"tns {ann.tns:.6g}  wns {ann.wns:.6g}  failing endpoints {len(ann.violated)}")


def cmd_report_paths(args):
    design = load_design(args.design)
    xy = load_placement(args.placement, design)
    graph = build_timing_graph(design.netlist)
    ann = run_sta(graph, design.netlist, design.constraints, xy)
    n = args.n if args.n is not None else max(1, len(ann.violated))
    if n < 1 or args.k < 1:
        raise ValueError("--n and --k must be >= 1")
    if args.policy == "endpoint":
        rep = report_timing_endpoint(graph, ann, n, args.k, workers=args.workers)
    else:
        rep = report_timing(graph, ann, n)
    write_json(args.output, rep.to_dict(design.netlist, wallclock=args.wallclock))
    print(f"{len(rep.paths)} paths  endpoints {rep.unique_endpoints}  pin pairs {rep.unique_pin_pairs}  "
          f"candidates {rep.candidates_generated}")


def cmd_compare_cli(args):
    design = load_design(args.design)
    configs = [_config(p) for p in args.configs or []]
    if args.preset:
        configs += ablation_configs()
    for path, cfg in zip(args.configs or [], configs):
        if cfg.name == "default":
            cfg.name = Path(path).stem
    report = cmd_compare(design, configs, seed=args.seed, jobs=args.jobs)
    write_text(args.output, report.to_csv(runtime=not args.no_runtime))
    print(report.table())
    return 2 if any(r.error for r in report.rows) else 0


def cmd_plot_cli(args):
    from .plot import cmd_plot

    design = load_design(args.design)
    cmd_plot(design, args.placement, args.paths, args.output)
    print(f"wrote {args.output}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage mistakes are input errors too
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tdplace", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic design")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cells", type=int, default=1000)
    p.add_argument("--registers", type=int, default=None)
    p.add_argument("--fanout", type=float, default=2.0)
    p.add_argument("--fail-frac", type=float, default=0.2)
    p.add_argument("--core", type=float, default=None, help="square core side")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("place", help="run timing-driven global placement")
    p.add_argument("design")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("sta", help="timing report for a placement")
    p.add_argument("design")
    p.add_argument("placement")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sta)

    p = sub.add_parser("report-paths", help="critical-path extraction")
    p.add_argument("design")
    p.add_argument("placement")
    p.add_argument("--policy", choices=("endpoint", "topn"), default="endpoint")
    p.add_argument("--n", type=int, default=None, help="default: all failing endpoints")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--wallclock", action="store_true", help="record elapsed_ms (not reproducible)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_report_paths)

    p = sub.add_parser("compare", help="ablation over several configurations")
    p.add_argument("design")
    p.add_argument("--configs", nargs="*", default=[])
    p.add_argument("--preset", action="store_true", help="append the standard ablation rows")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1, help="parallel runs across configurations")
    p.add_argument("--no-runtime", action="store_true", help="leave the runtime column empty")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_compare_cli)

    p = sub.add_parser("plot", help="render a placement as SVG")
    p.add_argument("design")
    p.add_argument("placement")
    p.add_argument("--paths", default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plot_cli)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TDPlaceError, FloatingPointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
