"""Design data model, JSON design files and timing-graph construction."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import jsonschema
import numpy as np

from .errors import CycleError, ParseError, ValidationError

TERMINAL = -1
INPUT = "in"
OUTPUT = "out"

_NUM = {"type": "number"}
_POINT = {
    "type": "object",
    "properties": {"x": _NUM, "y": _NUM},
    "required": ["x", "y"],
    "additionalProperties": False,
}

DESIGN_SCHEMA = {
    "type": "object",
    "properties": {
        "core": {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4},
        "clock_period": _NUM,
        "r_unit": _NUM,
        "c_unit": _NUM,
        "default_cell_delay": _NUM,
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "width": _NUM,
                    "height": _NUM,
                    "fixed": {"type": "boolean"},
                    "x": _NUM,
                    "y": _NUM,
                    "delay": _NUM,
                },
                "required": ["name", "width", "height"],
                "additionalProperties": False,
            },
        },
        "pins": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "cell": {"type": "string"},
                    "terminal": _POINT,
                    "dx": _NUM,
                    "dy": _NUM,
                    "dir": {"enum": [INPUT, OUTPUT]},
                    "cap": _NUM,
                },
                "required": ["name", "dir"],
                "oneOf": [{"required": ["cell"]}, {"required": ["terminal"]}],
                "additionalProperties": False,
            },
        },
        "nets": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "driver": {"type": "string"},
                    "sinks": {"type": "array", "items": {"type": "string"}},
                },
                "required": ["name", "driver", "sinks"],
                "additionalProperties": False,
            },
        },
        "sources": {"type": "array", "items": {"type": "string"}},
        "endpoints": {"type": "array", "items": {"type": "string"}},
    },
    "required": [
        "core", "clock_period", "r_unit", "c_unit",
        "cells", "pins", "nets", "sources", "endpoints",
    ],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class Cell:
    id: int
    name: str
    width: float
    height: float
    is_fixed: bool = False
    delay: float = 1.0


@dataclass(frozen=True)
class Pin:
    id: int
    name: str
    owner: int  # cell id, or TERMINAL
    offset: tuple[float, float]
    direction: str
    load_cap: float = 0.0
    terminal_xy: tuple[float, float] | None = None


@dataclass(frozen=True)
class Net:
    id: int
    name: str
    driver: int
    sinks: tuple[int, ...]


@dataclass(frozen=True)
class DesignConstraints:
    clock_period: float
    r_unit: float
    c_unit: float
    core: tuple[float, float, float, float]
    default_cell_delay: float = 1.0

    @property
    def core_span(self) -> float:
        x_lo, y_lo, x_hi, y_hi = self.core
        return max(x_hi - x_lo, y_hi - y_lo)

    @property
    def core_center(self) -> tuple[float, float]:
        x_lo, y_lo, x_hi, y_hi = self.core
        return (0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi))


@dataclass(frozen=True)
class Netlist:
    cells: tuple[Cell, ...]
    pins: tuple[Pin, ...]
    nets: tuple[Net, ...]
    sources: tuple[int, ...]
    endpoints: tuple[int, ...]

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_pins(self) -> int:
        return len(self.pins)

    @cached_property
    def cell_index(self) -> dict[str, int]:
        return {c.name: c.id for c in self.cells}

    @cached_property
    def pin_index(self) -> dict[str, int]:
        return {p.name: p.id for p in self.pins}

    @cached_property
    def pin_owner(self) -> np.ndarray:
        return np.array([p.owner for p in self.pins], dtype=np.int64)

    @cached_property
    def pin_offset(self) -> np.ndarray:
        return np.array([p.offset for p in self.pins], dtype=float).reshape(-1, 2)

    @cached_property
    def pin_cap(self) -> np.ndarray:
        return np.array([p.load_cap for p in self.pins], dtype=float)

    @cached_property
    def terminal_xy(self) -> np.ndarray:
        """Absolute terminal coordinates; NaN rows for cell-owned pins."""
        out = np.full((self.n_pins, 2), np.nan)
        for p in self.pins:
            if p.owner == TERMINAL:
                out[p.id] = p.terminal_xy
        return out

    @cached_property
    def cell_size(self) -> np.ndarray:
        return np.array([(c.width, c.height) for c in self.cells], dtype=float).reshape(-1, 2)

    @cached_property
    def cell_delay(self) -> np.ndarray:
        return np.array([c.delay for c in self.cells], dtype=float)

    @cached_property
    def fixed_mask(self) -> np.ndarray:
        return np.array([c.is_fixed for c in self.cells], dtype=bool)

    @cached_property
    def movable(self) -> np.ndarray:
        return np.flatnonzero(~self.fixed_mask)

    @cached_property
    def net_ptr(self) -> np.ndarray:
        """CSR offsets into :attr:`net_pins` (driver first, then sinks)."""
        sizes = [1 + len(n.sinks) for n in self.nets]
        return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)

    @cached_property
    def net_pins(self) -> np.ndarray:
        flat = [pid for n in self.nets for pid in (n.driver, *n.sinks)]
        return np.array(flat, dtype=np.int64)

    @cached_property
    def pin_net(self) -> np.ndarray:
        out = np.full(self.n_pins, -1, dtype=np.int64)
        for n in self.nets:
            out[n.driver] = n.id
            out[list(n.sinks)] = n.id
        return out

    def pin_positions(self, cell_xy: np.ndarray) -> np.ndarray:
        """Absolute pin coordinates for cell lower-left corners ``cell_xy``."""
        pos = self.terminal_xy + self.pin_offset
        owned = self.pin_owner >= 0
        pos[owned] = cell_xy[self.pin_owner[owned]] + self.pin_offset[owned]
        return pos


class Design(NamedTuple):
    netlist: Netlist
    constraints: DesignConstraints
    positions: np.ndarray  # (n_cells, 2) lower-left corners


# ---------------------------------------------------------------- loading


def load_design(path) -> Design:
    """Read and validate a JSON design file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return design_from_dict(data)


def design_from_dict(data: dict) -> Design:
    try:
        jsonschema.validate(data, DESIGN_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ParseError(f"field {where}: {exc.message}") from exc

    x_lo, y_lo, x_hi, y_hi = (float(v) for v in data["core"])
    if not (x_hi > x_lo and y_hi > y_lo):
        raise ValidationError(f"degenerate core region {data['core']}")
    default_delay = float(data.get("default_cell_delay", 1.0))
    cons = DesignConstraints(
        clock_period=float(data["clock_period"]),
        r_unit=float(data["r_unit"]),
        c_unit=float(data["c_unit"]),
        core=(x_lo, y_lo, x_hi, y_hi),
        default_cell_delay=default_delay,
    )
    if cons.clock_period <= 0:
        raise ValidationError("clock_period must be positive")
    if cons.r_unit <= 0 or cons.c_unit <= 0:
        raise ValidationError("r_unit and c_unit must be positive")

    cells, cell_ids = [], {}
    center = cons.core_center
    positions = []
    for i, c in enumerate(data["cells"]):
        name = c["name"]
        if name in cell_ids:
            raise ValidationError(f"duplicate cell name {name!r}")
        w, h = float(c["width"]), float(c["height"])
        if w <= 0 or h <= 0:
            raise ValidationError(f"cell {name!r} has non-positive size {w}x{h}")
        fixed = bool(c.get("fixed", False))
        has_xy = "x" in c and "y" in c
        if fixed and not has_xy:
            raise ValidationError(f"fixed cell {name!r} has no coordinates")
        xy = (float(c["x"]), float(c["y"])) if has_xy else center
        if fixed and not (x_lo <= xy[0] and xy[0] + w <= x_hi and y_lo <= xy[1] and xy[1] + h <= y_hi):
            raise ValidationError(f"fixed cell {name!r} lies outside the core")
        cell_ids[name] = i
        cells.append(Cell(i, name, w, h, fixed, float(c.get("delay", default_delay))))
        positions.append(xy)
    if not any(not c.is_fixed for c in cells):
        raise ValidationError("no movable cells")

    pins, pin_ids = [], {}
    for i, p in enumerate(data["pins"]):
        name = p["name"]
        if name in pin_ids:
            raise ValidationError(f"duplicate pin name {name!r}")
        cap = float(p.get("cap", 0.0))
        if cap < 0:
            raise ValidationError(f"pin {name!r} has negative load cap")
        offset = (float(p.get("dx", 0.0)), float(p.get("dy", 0.0)))
        if "cell" in p:
            if p["cell"] not in cell_ids:
                raise ValidationError(f"pin {name!r} references unknown cell {p['cell']!r}")
            owner, txy = cell_ids[p["cell"]], None
        else:
            owner, txy = TERMINAL, (float(p["terminal"]["x"]), float(p["terminal"]["y"]))
        pin_ids[name] = i
        pins.append(Pin(i, name, owner, offset, p["dir"], cap, txy))

    nets, used = [], {}
    for i, n in enumerate(data["nets"]):
        name = n["name"]
        refs = [n["driver"], *n["sinks"]]
        missing = [r for r in refs if r not in pin_ids]
        if missing:
            raise ValidationError(f"net {name!r} references unknown pins {missing}")
        if not n["sinks"]:
            raise ValidationError(f"net {name!r} has no sinks")
        driver = pin_ids[n["driver"]]
        sinks = tuple(pin_ids[s] for s in n["sinks"])
        if pins[driver].direction != OUTPUT:
            raise ValidationError(f"net {name!r}: driver {n['driver']!r} is not an output pin")
        for s in sinks:
            if pins[s].direction != INPUT:
                raise ValidationError(f"net {name!r}: sink {pins[s].name!r} is not an input pin")
        for pid in (driver, *sinks):
            if pid in used:
                raise ValidationError(
                    f"net {name!r}: pin {pins[pid].name!r} already belongs to net {used[pid]!r}"
                )
            used[pid] = name
        nets.append(Net(i, name, driver, sinks))

    def _resolve(key, want_dir):
        out = []
        for r in data[key]:
            if r not in pin_ids:
                raise ValidationError(f"{key}: unknown pin {r!r}")
            pid = pin_ids[r]
            if pins[pid].direction != want_dir:
                raise ValidationError(f"{key}: pin {r!r} has direction {pins[pid].direction!r}")
            out.append(pid)
        return tuple(out)

    netlist = Netlist(
        cells=tuple(cells),
        pins=tuple(pins),
        nets=tuple(nets),
        sources=_resolve("sources", OUTPUT),
        endpoints=_resolve("endpoints", INPUT),
    )
    return Design(netlist, cons, np.array(positions, dtype=float).reshape(-1, 2))


def design_to_dict(design: Design) -> dict:
    netlist, cons, positions = design
    cells = []
    for c in netlist.cells:
        d = {"name": c.name, "width": c.width, "height": c.height}
        if c.is_fixed:
            d["fixed"] = True
        d["x"], d["y"] = float(positions[c.id, 0]), float(positions[c.id, 1])
        if c.delay != cons.default_cell_delay:
            d["delay"] = c.delay
        cells.append(d)
    pins = []
    for p in netlist.pins:
        d = {"name": p.name}
        if p.owner == TERMINAL:
            d["terminal"] = {"x": p.terminal_xy[0], "y": p.terminal_xy[1]}
        else:
            d["cell"] = netlist.cells[p.owner].name
        d["dx"], d["dy"] = p.offset
        d["dir"] = p.direction
        if p.load_cap:
            d["cap"] = p.load_cap
        pins.append(d)
    name = [p.name for p in netlist.pins]
    return {
        "core": list(cons.core),
        "clock_period": cons.clock_period,
        "r_unit": cons.r_unit,
        "c_unit": cons.c_unit,
        "default_cell_delay": cons.default_cell_delay,
        "cells": cells,
        "pins": pins,
        "nets": [
            {"name": n.name, "driver": name[n.driver], "sinks": [name[s] for s in n.sinks]}
            for n in netlist.nets
        ],
        "sources": [name[s] for s in netlist.sources],
        "endpoints": [name[e] for e in netlist.endpoints],
    }


def dumps_design(design: Design) -> str:
    return json.dumps(design_to_dict(design), indent=1) + "\n"


def save_design(design: Design, path) -> None:
    Path(path).write_text(dumps_design(design), encoding="utf-8")


# ---------------------------------------------------------------- timing graph


@dataclass(frozen=True, eq=False)
class TimingGraph:
    """Pin-level DAG. Net arcs come first (net order, sink order), then cell arcs.

    ``fwd_groups[l]`` holds the arcs whose head sits on level ``l + 1``;
    ``bwd_groups`` holds arcs grouped by tail level, deepest first.
    """

    n_pins: int
    arc_from: np.ndarray
    arc_to: np.ndarray
    arc_net: np.ndarray  # -1 for cell arcs
    arc_cell: np.ndarray  # -1 for net arcs
    sources: np.ndarray
    endpoints: np.ndarray
    level: np.ndarray | None
    order: np.ndarray | None
    in_ptr: np.ndarray = field(repr=False)
    in_arcs: np.ndarray = field(repr=False)
    fwd_groups: tuple = field(default=(), repr=False)
    bwd_groups: tuple = field(default=(), repr=False)

    @property
    def n_arcs(self) -> int:
        return len(self.arc_from)

    @property
    def n_net_arcs(self) -> int:
        return int(np.count_nonzero(self.arc_net >= 0))

    @property
    def n_cell_arcs(self) -> int:
        return int(np.count_nonzero(self.arc_cell >= 0))

    @cached_property
    def is_source(self) -> np.ndarray:
        m = np.zeros(self.n_pins, dtype=bool)
        m[self.sources] = True
        return m

    @cached_property
    def is_endpoint(self) -> np.ndarray:
        m = np.zeros(self.n_pins, dtype=bool)
        m[self.endpoints] = True
        return m

    def incoming(self, pin: int) -> np.ndarray:
        return self.in_arcs[self.in_ptr[pin]:self.in_ptr[pin + 1]]


def build_timing_graph(netlist: Netlist) -> TimingGraph:
    """Net arcs for every driver/sink pair and cell arcs for every input/output pair.

    Registers are timing boundaries: no cell arc enters a declared source pin or
    leaves a declared endpoint pin.
    """
    src = set(netlist.sources)
    ept = set(netlist.endpoints)
    frm, to, net, cell = [], [], [], []
    for n in netlist.nets:
        for s in n.sinks:
            frm.append(n.driver), to.append(s), net.append(n.id), cell.append(-1)
    by_cell: dict[int, tuple[list, list]] = {}
    for p in netlist.pins:
        if p.owner != TERMINAL:
            ins, outs = by_cell.setdefault(p.owner, ([], []))
            (ins if p.direction == INPUT else outs).append(p.id)
    for cid in sorted(by_cell):
        ins, outs = by_cell[cid]
        for i in ins:
            if i in ept:
                continue
            for o in outs:
                if o in src:
                    continue
                frm.append(i), to.append(o), net.append(-1), cell.append(cid)

    n = netlist.n_pins
    arc_from = np.array(frm, dtype=np.int64)
    arc_to = np.array(to, dtype=np.int64)
    level, order = _levelize(n, arc_from, arc_to)

    in_order = np.lexsort((np.arange(len(arc_to)), arc_to))
    in_ptr = np.searchsorted(arc_to[in_order], np.arange(n + 1)).astype(np.int64)
    head_level = level[arc_to]
    tail_level = level[arc_from]
    n_levels = int(level.max()) + 1 if n else 0
    fwd = tuple(np.flatnonzero(head_level == lv) for lv in range(1, n_levels))
    bwd = tuple(np.flatnonzero(tail_level == lv) for lv in range(n_levels - 1, -1, -1))
    return TimingGraph(
        n_pins=n,
        arc_from=arc_from,
        arc_to=arc_to,
        arc_net=np.array(net, dtype=np.int64),
        arc_cell=np.array(cell, dtype=np.int64),
        sources=np.array(netlist.sources, dtype=np.int64),
        endpoints=np.array(netlist.endpoints, dtype=np.int64),
        level=level,
        order=order,
        in_ptr=in_ptr,
        in_arcs=in_order.astype(np.int64),
        fwd_groups=fwd,
        bwd_groups=bwd,
    )


def _levelize(n, arc_from, arc_to):
    succ = [[] for _ in range(n)]
    indeg = np.zeros(n, dtype=np.int64)
    for u, v in zip(arc_from.tolist(), arc_to.tolist()):
        succ[u].append(v)
        indeg[v] += 1
    level = np.zeros(n, dtype=np.int64)
    remaining = indeg.copy()
    queue = deque(np.flatnonzero(indeg == 0).tolist())
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in succ[u]:
            if level[u] + 1 > level[v]:
                level[v] = level[u] + 1
            remaining[v] -= 1
            if remaining[v] == 0:
                queue.append(v)
    if len(order) != n:
        raise CycleError(_find_cycle(arc_from, arc_to, remaining > 0))
    return level, np.array(order, dtype=np.int64)


def _find_cycle(arc_from, arc_to, alive):
    # every unprocessed node keeps an unprocessed predecessor, so a backward
    # walk over alive nodes must revisit one
    pred = {}
    for u, v in zip(arc_from.tolist(), arc_to.tolist()):
        if alive[u] and alive[v]:
            pred.setdefault(v, u)
    u = int(np.flatnonzero(alive)[0])
    seen, path = {}, []
    while u not in seen:
        seen[u] = len(path)
        path.append(u)
        u = pred[u]
    return path[seen[u]:][::-1]
