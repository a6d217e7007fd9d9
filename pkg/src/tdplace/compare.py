"""Ablation harness: several optimizer configurations on one design and seed."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import TDPlaceError
from .netlist import Design, build_timing_graph
from .paths import report_timing, report_timing_endpoint
from .placer import OptimizerConfig, run_placement
from .sta import run_sta

COLUMNS = ("config", "tns", "wns", "hpwl", "overflow", "runtime", "unique_endpoints",
           "unique_pin_pairs", "candidates_generated", "error")


@dataclass
class CompareRow:
    config: str
    tns: float = math.nan
    wns: float = math.nan
    hpwl: float = math.nan
    overflow: float = math.nan
    runtime: float = math.nan
    unique_endpoints: int | None = None
    unique_pin_pairs: int | None = None
    candidates_generated: int | None = None
    error: str | None = None


@dataclass
class CompareReport:
    rows: list
    seed: int

    def row(self, name: str) -> CompareRow:
        for r in self.rows:
            if r.config == name:
                return r
        raise KeyError(name)

    def to_csv(self, runtime: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            vals = dataclasses.asdict(r)
            if not runtime:
                vals["runtime"] = math.nan
            w.writerow([_cell(vals[c]) for c in COLUMNS])
        return buf.getvalue()

    def table(self) -> str:
        head = ("config", "TNS", "WNS", "HPWL", "overflow", "time[s]", "endpoints", "pairs", "candidates")
        lines = []
        for r in self.rows:
            if r.error:
                lines.append((r.config, f"error: {r.error}") + ("",) * 7)
                continue
            lines.append((
                r.config, f"{r.tns:.4g}", f"{r.wns:.4g}", f"{r.hpwl:.6g}", f"{r.overflow:.3f}",
                f"{r.runtime:.1f}", *(("-" if v is None else str(v))
                                      for v in (r.unique_endpoints, r.unique_pin_pairs,
                                                r.candidates_generated)),
            ))
        widths = [max(len(head[i]), *(len(ln[i]) for ln in lines)) for i in range(len(head))]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        out = [fmt.format(*head), fmt.format(*("-" * w for w in widths))]
        out += [fmt.format(*ln).rstrip() for ln in lines]
        return "\n".join(out)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def ablation_configs(**overrides) -> list:
    """The standard rows: quadratic, linear, HPWL and net-weighted variants, both
    extraction policies, and the no-attraction baseline."""
    base = OptimizerConfig(**overrides)
    rep = dataclasses.replace
    return [
        rep(base, name="quadratic"),
        rep(base, name="linear", pp_loss="linear"),
        rep(base, name="pp_hpwl", pp_loss="hpwl"),
        rep(base, name="net_weight", timing="net_weight"),
        rep(base, name="topn", extraction="topn"),
        rep(base, name="endpoint", extraction="endpoint"),
        rep(base, name="beta0", beta=0.0),
    ]


def extraction_stats(design: Design, config: OptimizerConfig, snapshot) -> dict:
    """Extraction counters for ``config``'s policy on a frozen placement."""
    graph = build_timing_graph(design.netlist)
    ann = run_sta(graph, design.netlist, design.constraints, snapshot)
    n_fail = len(ann.violated)
    if n_fail == 0:
        return {"unique_endpoints": 0, "unique_pin_pairs": 0, "candidates_generated": 0}
    if config.extraction == "endpoint":
        rep = report_timing_endpoint(graph, ann, n_fail, config.k)
    else:
        rep = report_timing(graph, ann, n_fail * config.k)
    return {"unique_endpoints": rep.unique_endpoints, "unique_pin_pairs": rep.unique_pin_pairs,
            "candidates_generated": rep.candidates_generated}


def _run_one(design, config, snapshot):
    row = CompareRow(config.name)
    try:
        res = run_placement(design, config)
        row.tns, row.wns, row.hpwl = res.tns, res.wns, res.hpwl
        row.overflow, row.runtime = res.overflow, res.runtime
        if config.timing == "pin_pair":
            for key, val in extraction_stats(design, config, snapshot).items():
                setattr(row, key, val)
    except (TDPlaceError, ValueError, FloatingPointError) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def cmd_compare(design: Design, configs, seed: int | None = None, jobs: int = 1) -> CompareReport:
    """Run every configuration on ``design`` with one shared seed.

    Extraction counters come from a single coarse placement snapshot (the
    state where timing optimization would begin), so policies are compared on
    identical input. A failing row records its error and the rest still run.
    """
    configs = list(configs)
    if len(configs) < 2:
        raise ValueError("need ≥ 2 configurations")
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ValueError(f"configuration names must be distinct: {names}")
    seed = configs[0].seed if seed is None else seed
    configs = [dataclasses.replace(c, seed=seed) for c in configs]
    first = configs[0]
    coarse = dataclasses.replace(first, name="snapshot", timing="off", max_iters=first.timing_start_iter)
    snapshot = run_placement(design, coarse).positions
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_one, [design] * len(configs), configs, [snapshot] * len(configs)))
    else:
        rows = [_run_one(design, c, snapshot) for c in configs]
    return CompareReport(rows=rows, seed=seed)
