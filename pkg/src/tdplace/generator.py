"""Seeded synthetic designs: a levelized random DAG between register boundaries."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError
from .netlist import Design, design_from_dict
from .placer import OptimizerConfig, run_placement
from .sta import run_sta
from .netlist import build_timing_graph

ROW_HEIGHT = 100.0


@dataclass
class GeneratorSpec:
    seed: int = 0
    n_cells: int = 1000
    n_registers: int | None = None  # default n_cells // 8
    avg_fanout: float = 2.0
    target_fail_fraction: float = 0.2
    core_size: float | None = None  # square core side; default from utilization
    utilization: float = 0.4
    depth: int = 12
    r_unit: float = 2e-3
    c_unit: float = 2e-3
    pin_cap: float = 0.1
    calibrate: bool = True

    def validate(self):
        if self.n_cells < 1:
            raise GenerationError("n_cells must be >= 1")
        if not 0 <= self.target_fail_fraction <= 1:
            raise GenerationError("target_fail_fraction must lie in [0, 1]")
        if self.avg_fanout < 1:
            raise GenerationError("avg_fanout must be >= 1")
        if self.avg_fanout > self.n_cells:
            raise GenerationError(f"avg_fanout {self.avg_fanout} exceeds the cell count {self.n_cells}")
        if self.depth < 1:
            raise GenerationError("depth must be >= 1")
        n_reg = self.registers
        if n_reg > self.n_cells:
            raise GenerationError("more registers than cells")
        if self.r_unit <= 0 or self.c_unit <= 0:
            raise GenerationError("r_unit and c_unit must be positive")

    @property
    def registers(self) -> int:
        return self.n_registers if self.n_registers is not None else self.n_cells // 8


def _netlist_dict(spec: GeneratorSpec, rng: np.random.Generator) -> dict:
    n_reg = spec.registers
    n_comb = spec.n_cells - n_reg
    n_pi = max(2, spec.n_cells // 40)

    comb_levels = np.sort(rng.integers(1, spec.depth + 1, size=n_comb)) if n_comb else np.array([], int)
    widths = ROW_HEIGHT * rng.integers(1, 4, size=n_comb)
    n_in = 1 + rng.poisson(spec.avg_fanout - 1.0, size=n_comb)
    n_in = np.minimum(n_in, 4)

    cells, pins, nets = [], [], []
    sources, endpoints = [], []
    # driver pools by level: level 0 holds primary inputs and register outputs
    drivers_at = [[] for _ in range(spec.depth + 1)]
    sinks_of: dict[str, list] = {}

    for i in range(n_pi):
        name = f"pi{i}"
        pins.append({"name": name, "terminal": None, "dir": "out"})
        drivers_at[0].append(name)
        sources.append(name)
    reg_d = []
    for r in range(n_reg):
        c = f"reg{r}"
        cells.append({"name": c, "width": 2 * ROW_HEIGHT, "height": ROW_HEIGHT})
        pins.append({"name": f"{c}/D", "cell": c, "dx": 0.0, "dy": ROW_HEIGHT / 2, "dir": "in",
                     "cap": spec.pin_cap})
        pins.append({"name": f"{c}/Q", "cell": c, "dx": 2 * ROW_HEIGHT, "dy": ROW_HEIGHT / 2, "dir": "out"})
        drivers_at[0].append(f"{c}/Q")
        sources.append(f"{c}/Q")
        endpoints.append(f"{c}/D")
        reg_d.append(f"{c}/D")

    comb_out = []
    for i in range(n_comb):
        c, lv, w, k = f"g{i}", int(comb_levels[i]), float(widths[i]), int(n_in[i])
        cells.append({"name": c, "width": w, "height": ROW_HEIGHT})
        pool = [p for lvl in range(max(0, lv - 3), lv) for p in drivers_at[lvl]]
        if not pool:
            pool = [p for lvl in range(lv) for p in drivers_at[lvl]]
        picks = rng.choice(len(pool), size=min(k, len(pool)), replace=False)
        for j, pidx in enumerate(sorted(picks.tolist())):
            pin = f"{c}/i{j}"
            pins.append({"name": pin, "cell": c, "dx": 0.0,
                         "dy": ROW_HEIGHT * (j + 1) / (len(picks) + 1), "dir": "in", "cap": spec.pin_cap})
            sinks_of.setdefault(pool[pidx], []).append(pin)
        out = f"{c}/o"
        pins.append({"name": out, "cell": c, "dx": w, "dy": ROW_HEIGHT / 2, "dir": "out"})
        drivers_at[lv].append(out)
        comb_out.append(out)

    # registers capture from random combinational outputs, unused ones first
    unused = [p for p in comb_out if p not in sinks_of]
    rng.shuffle(unused)
    for d_pin in reg_d:
        if unused:
            drv = unused.pop()
        elif comb_out:
            drv = comb_out[int(rng.integers(len(comb_out)))]
        else:
            drv = drivers_at[0][int(rng.integers(len(drivers_at[0])))]
        sinks_of.setdefault(drv, []).append(d_pin)
    # anything still dangling drives a primary output
    dangling = [p for lvl in drivers_at for p in lvl if p not in sinks_of]
    for i, drv in enumerate(dangling):
        po = f"po{i}"
        pins.append({"name": po, "terminal": None, "dir": "in", "cap": spec.pin_cap})
        endpoints.append(po)
        sinks_of[drv] = [po]

    order = {p["name"]: i for i, p in enumerate(pins)}
    for drv in sorted(sinks_of, key=order.get):
        nets.append({"name": f"n_{drv}", "driver": drv, "sinks": sinks_of[drv]})
    return {"cells": cells, "pins": pins, "nets": nets, "sources": sources, "endpoints": endpoints}


def _place_terminals(pins, core, rng):
    x_lo, y_lo, x_hi, y_hi = core
    ins = [p for p in pins if p.get("terminal", 0) is None and p["dir"] == "out"]
    outs = [p for p in pins if p.get("terminal", 0) is None and p["dir"] == "in"]
    for group, x in ((ins, x_lo), (outs, x_hi)):
        ys = np.sort(rng.uniform(y_lo, y_hi, size=len(group)))
        for p, y in zip(group, ys):
            p["terminal"] = {"x": float(x), "y": float(y)}
            p["dx"], p["dy"] = 0.0, 0.0


def coarse_config(seed: int = 0) -> OptimizerConfig:
    """Wirelength/density-only run up to where timing optimization would begin."""
    base = OptimizerConfig(seed=seed)
    return dataclasses.replace(base, timing="off", max_iters=base.timing_start_iter)


def generate_synthetic(spec: GeneratorSpec) -> Design:
    """Build a design; the clock period is set so ``target_fail_fraction`` of the
    endpoints fail after coarse placement."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    body = _netlist_dict(spec, rng)
    area = sum(c["width"] * c["height"] for c in body["cells"])
    side = spec.core_size or math.ceil(math.sqrt(area / spec.utilization) / ROW_HEIGHT) * ROW_HEIGHT
    core = (0.0, 0.0, float(side), float(side))
    _place_terminals(body["pins"], core, rng)
    data = {
        "core": list(core),
        "clock_period": 1.0,
        "r_unit": spec.r_unit,
        "c_unit": spec.c_unit,
        "default_cell_delay": 1.0,
        **body,
    }
    design = design_from_dict(data)
    if spec.calibrate:
        data["clock_period"] = calibrate_clock(design, spec.target_fail_fraction, spec.seed)
        design = design_from_dict(data)
    return design


def calibrate_clock(design: Design, fail_fraction: float, seed: int = 0) -> float:
    """Clock period at the ``1 - fail_fraction`` quantile of coarse-placement endpoint arrivals."""
    res = run_placement(design, coarse_config(seed))
    graph = build_timing_graph(design.netlist)
    ann = run_sta(graph, design.netlist, design.constraints, res.positions)
    arr = np.sort(ann.arr[graph.endpoints])
    n_fail = int(round(fail_fraction * len(arr)))
    if n_fail <= 0:
        return float(arr[-1] * 1.05 + 1.0)
    if n_fail >= len(arr):
        return float(max(arr[0] * 0.5, 1e-6))
    # midpoint between the last passing and first failing arrival
    lo, hi = arr[len(arr) - n_fail - 1], arr[len(arr) - n_fail]
    return float(0.5 * (lo + hi)) if hi > lo else float(np.nextafter(hi, -np.inf))
