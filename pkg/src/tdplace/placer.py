"""Timing-driven global placement loop.

Objective: sum of (optionally net-weighted) WA wirelength, ``lambda`` times the
bin density penalty, and ``beta`` times the pin-pair attraction. From
``timing_start_iter`` on, every ``m`` iterations a timing round runs STA,
extracts critical paths and grows the pin-pair weights.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteError
from .netlist import Design, DesignConstraints, Netlist, TimingGraph, build_timing_graph
from .objectives import (
    BinGrid,
    PinPairWeights,
    apply_net_weights,
    density_penalty,
    hpwl,
    pin_pair_loss,
    pins_to_cells,
    update_pair_weights,
    wa_wirelength_all,
)
from .paths import collect_pin_pairs, report_timing, report_timing_endpoint
from .sta import TimingAnnotation, run_sta

TIMING_MODES = ("pin_pair", "net_weight", "off")
EXTRACTION_POLICIES = ("endpoint", "topn")
PP_LOSSES = ("quadratic", "linear", "hpwl")


@dataclass
class OptimizerConfig:
    name: str = "default"
    # objective
    gamma: float | None = None  # default: 1% of the core span
    bins: int | None = None  # default: power of two near sqrt(#movable cells)
    target_density: float = 1.0
    beta: float = 2.5e-5
    pp_loss: str = "quadratic"
    pp_eps: float | None = None  # smoothing of non-quadratic losses; default gamma / 100
    # timing schedule
    timing: str = "pin_pair"
    extraction: str = "endpoint"
    k: int = 1
    m: int = 15
    w0: float = 10.0
    w1: float = 0.2
    timing_start_iter: int = 500
    # optimizer
    max_iters: int = 1000
    stop_overflow: float = 0.1
    lr: float = 0.01  # fraction of the core span
    lr_decay: float = 0.997
    lambda_growth: float = 1.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    init_noise: float = 0.001  # fraction of the core span
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.timing not in TIMING_MODES:
            raise ValueError(f"timing must be one of {TIMING_MODES}")
        if self.extraction not in EXTRACTION_POLICIES:
            raise ValueError(f"extraction must be one of {EXTRACTION_POLICIES}")
        if self.pp_loss not in PP_LOSSES:
            raise ValueError(f"pp_loss must be one of {PP_LOSSES}")
        if self.m < 1 or self.k < 1 or self.max_iters < 0:
            raise ValueError("m, k must be >= 1 and max_iters >= 0")
        if self.beta < 0 or self.lambda_growth <= 0 or self.lr <= 0:
            raise ValueError("beta must be >= 0; lr and lambda_growth positive")
        if self.bins is not None and self.bins < 1:
            raise ValueError("bins must be >= 1")
        if (self.gamma is not None and self.gamma <= 0) or (self.pp_eps is not None and self.pp_eps <= 0):
            raise ValueError("gamma and pp_eps must be positive")
        if not 0 < self.target_density <= 1:
            raise ValueError("target_density must lie in (0, 1]")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizerConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def resolved(self, design: Design) -> "OptimizerConfig":
        """Copy with every ``None`` default replaced by its design-derived value."""
        span = design.constraints.core_span
        gamma = self.gamma if self.gamma is not None else 0.01 * span
        n_mov = len(design.netlist.movable)
        bins = self.bins if self.bins is not None else default_bins(n_mov)
        eps = self.pp_eps if self.pp_eps is not None else gamma / 100
        return dataclasses.replace(self, gamma=gamma, bins=bins, pp_eps=eps)


def default_bins(n_movable: int) -> int:
    return int(min(64, max(4, 2 ** round(math.log2(max(1.0, math.sqrt(n_movable)))))))


@dataclass
class PlacementState:
    xy: np.ndarray  # (n_movable, 2) lower-left corners
    lam: float
    beta: float
    iteration: int = 0
    m1: np.ndarray | None = None
    m2: np.ndarray | None = None


class PlacementProblem:
    """Everything about a design that stays constant during optimization."""

    def __init__(self, design: Design, config: OptimizerConfig):
        self.netlist: Netlist = design.netlist
        self.constraints: DesignConstraints = design.constraints
        self.config = config.resolved(design)
        self.graph: TimingGraph = build_timing_graph(design.netlist)
        self.base_xy = np.array(design.positions, dtype=float)
        self.movable = design.netlist.movable
        core = design.constraints.core
        n = self.config.bins
        self.grid = BinGrid(core, n, n, self.config.target_density)
        size = design.netlist.cell_size[self.movable]
        self.lo = np.array([core[0], core[1]])
        self.hi = np.array([core[2], core[3]]) - size

    def cell_xy(self, xy: np.ndarray) -> np.ndarray:
        full = self.base_xy.copy()
        full[self.movable] = xy
        return full

    def clamp(self, xy: np.ndarray) -> np.ndarray:
        return np.clip(xy, self.lo, np.maximum(self.lo, self.hi))


@dataclass
class ObjectiveValue:
    value: float
    grad: np.ndarray  # (n_movable, 2)
    wl: float
    density: float
    pp: float
    overflow: float
    wl_grad: np.ndarray = field(repr=False, default=None)
    density_grad: np.ndarray = field(repr=False, default=None)
    pp_grad: np.ndarray = field(repr=False, default=None)


def objective_and_gradient(state: PlacementState, problem: PlacementProblem,
                           weights: PinPairWeights, net_weights=None) -> ObjectiveValue:
    """``WL (+ net weights) + lam * D + beta * PP`` and its gradient over movable cells."""
    cfg = problem.config
    nl = problem.netlist
    cell_xy = problem.cell_xy(state.xy)
    pin_pos = nl.pin_positions(cell_xy)
    mov = problem.movable

    wl, _, wl_pin = wa_wirelength_all(pin_pos, nl, cfg.gamma, net_weights)
    g_wl = pins_to_cells(wl_pin, nl)[mov]
    dens = density_penalty(cell_xy, nl, problem.grid)
    g_d = dens.grad[mov]
    if state.iteration >= cfg.timing_start_iter and len(weights):
        pp, pp_pin = pin_pair_loss(weights, pin_pos, cfg.pp_loss, cfg.pp_eps)
        g_pp = pins_to_cells(pp_pin, nl)[mov]
    else:
        pp, g_pp = 0.0, np.zeros_like(g_wl)

    value = wl + state.lam * dens.value + state.beta * pp
    grad = g_wl + state.lam * g_d + state.beta * g_pp
    if not (np.isfinite(value) and np.all(np.isfinite(grad))):
        raise NonFiniteError("objective or gradient is not finite", state.iteration)
    return ObjectiveValue(value, grad, wl, dens.value, pp, dens.overflow, g_wl, g_d, g_pp)


TRACE_COLUMNS = ("iter", "hpwl", "overflow", "tns", "wns", "wl_term", "density_term",
                 "pp_term", "lambda", "beta_pp")


class MetricTrace:
    """One row per iteration; ``tns``/``wns`` are NaN except on timing rounds."""

    def __init__(self):
        self.rows: list[dict] = []

    def append(self, **row):
        self.rows.append({c: row[c] for c in TRACE_COLUMNS})

    def __len__(self):
        return len(self.rows)

    def column(self, name) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def sta_iterations(self) -> list:
        return [r["iter"] for r in self.rows if not math.isnan(r["tns"])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in TRACE_COLUMNS])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if math.isnan(v) else repr(float(v))


@dataclass
class TimingRound:
    iteration: int
    tns: float
    wns: float
    n_failing: int
    paths: int = 0
    unique_endpoints: int = 0
    unique_pin_pairs: int = 0
    candidates_generated: int = 0
    elapsed: float = 0.0


@dataclass
class PlacementResult:
    positions: np.ndarray  # (n_cells, 2)
    trace: MetricTrace
    weights: PinPairWeights
    timing: TimingAnnotation
    hpwl: float
    overflow: float
    iterations: int
    rounds: list
    runtime: float
    config: OptimizerConfig

    @property
    def tns(self) -> float:
        return self.timing.tns

    @property
    def wns(self) -> float:
        return self.timing.wns

    def placement_dict(self, netlist: Netlist) -> dict:
        return {"cells": [{"name": c.name, "x": float(self.positions[c.id, 0]),
                           "y": float(self.positions[c.id, 1])} for c in netlist.cells]}


def _timing_round(problem: PlacementProblem, cell_xy, weights, it):
    cfg = problem.config
    ann = run_sta(problem.graph, problem.netlist, problem.constraints, cell_xy)
    rnd = TimingRound(it, ann.tns, ann.wns, len(ann.violated))
    net_w = None
    if cfg.timing == "net_weight":
        net_w = apply_net_weights(ann, problem.netlist)
    elif ann.wns < 0:
        n_fail = len(ann.violated)
        if cfg.extraction == "endpoint":
            rep = report_timing_endpoint(problem.graph, ann, n_fail, cfg.k, workers=cfg.workers)
        else:
            rep = report_timing(problem.graph, ann, n_fail * cfg.k)
        update_pair_weights(weights, collect_pin_pairs(rep.paths), ann.wns, cfg.w0, cfg.w1)
        rnd.paths = len(rep.paths)
        rnd.unique_endpoints = rep.unique_endpoints
        rnd.unique_pin_pairs = rep.unique_pin_pairs
        rnd.candidates_generated = rep.candidates_generated
        rnd.elapsed = rep.elapsed
    return ann, rnd, net_w


def initial_state(problem: PlacementProblem) -> PlacementState:
    cfg = problem.config
    rng = np.random.default_rng(cfg.seed)
    span = problem.constraints.core_span
    xy0 = problem.base_xy[problem.movable]
    xy = problem.clamp(xy0 + rng.normal(scale=cfg.init_noise * span, size=xy0.shape))
    state = PlacementState(xy=xy, lam=0.0, beta=cfg.beta)
    probe = objective_and_gradient(state, problem, PinPairWeights())
    gd = np.abs(probe.density_grad).sum()
    state.lam = float(np.abs(probe.wl_grad).sum() / gd) if gd > 0 else 1.0
    if state.lam <= 0:
        state.lam = 1.0
    state.m1 = np.zeros_like(xy)
    state.m2 = np.zeros_like(xy)
    return state


def run_placement(design: Design, config: OptimizerConfig | None = None,
                  callback=None) -> PlacementResult:
    """Optimize ``design``; returns final positions, trace and pin-pair weights.

    ``callback(iteration, state, objective, weights)`` is invoked after each row
    is logged.
    """
    t0 = time.perf_counter()
    problem = PlacementProblem(design, config or OptimizerConfig())
    cfg = problem.config
    state = initial_state(problem)
    weights = PinPairWeights()
    net_w = None
    trace = MetricTrace()
    rounds = []
    step0 = cfg.lr * problem.constraints.core_span
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2

    for it in range(cfg.max_iters):
        state.iteration = it
        cell_xy = problem.cell_xy(state.xy)
        tns = wns = math.nan
        sta_due = (cfg.timing != "off" and it >= cfg.timing_start_iter
                   and (it - cfg.timing_start_iter) % cfg.m == 0)
        if sta_due:
            ann, rnd, nw = _timing_round(problem, cell_xy, weights, it)
            tns, wns = ann.tns, ann.wns
            rounds.append(rnd)
            if nw is not None:
                net_w = nw
        obj = objective_and_gradient(state, problem, weights, net_w)
        trace.append(
            iter=it, hpwl=hpwl(problem.netlist.pin_positions(cell_xy), problem.netlist),
            overflow=obj.overflow, tns=tns, wns=wns, wl_term=obj.wl,
            density_term=obj.density, pp_term=obj.pp, **{"lambda": state.lam},
            beta_pp=state.beta * obj.pp,
        )
        if callback is not None:
            callback(it, state, obj, weights)
        # the first round's weights get a full period before an overflow stop
        if rounds and it >= rounds[0].iteration + cfg.m and obj.overflow <= cfg.stop_overflow:
            break
        # adam step
        g = obj.grad
        state.m1 = b1 * state.m1 + (1 - b1) * g
        state.m2 = b2 * state.m2 + (1 - b2) * g * g
        mh = state.m1 / (1 - b1 ** (it + 1))
        vh = state.m2 / (1 - b2 ** (it + 1))
        step = step0 * cfg.lr_decay ** it
        state.xy = problem.clamp(state.xy - step * mh / (np.sqrt(vh) + 1e-12))
        state.lam *= cfg.lambda_growth

    final_xy = problem.cell_xy(state.xy)
    final_pins = problem.netlist.pin_positions(final_xy)
    ann = run_sta(problem.graph, problem.netlist, problem.constraints, final_xy)
    dens = density_penalty(final_xy, problem.netlist, problem.grid)
    return PlacementResult(
        positions=final_xy, trace=trace, weights=weights, timing=ann,
        hpwl=hpwl(final_pins, problem.netlist), overflow=dens.overflow,
        iterations=len(trace), rounds=rounds, runtime=time.perf_counter() - t0, config=cfg,
    )


def load_config(path) -> OptimizerConfig:
    with open(path, encoding="utf-8") as fh:
        return OptimizerConfig.from_dict(json.load(fh))
