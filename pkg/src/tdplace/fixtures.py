"""Small hand-checkable designs used by tests, demos and docs."""

from __future__ import annotations

import numpy as np

from .netlist import Design, design_from_dict


def _cell(name, x=0.0, y=0.0, delay=None, w=1.0, h=1.0):
    d = {"name": name, "width": w, "height": h, "x": x, "y": y}
    if delay is not None:
        d["delay"] = delay
    return d


def _pin(name, cell=None, terminal=None, direction="in", dx=0.0, dy=0.0):
    d = {"name": name, "dx": dx, "dy": dy, "dir": direction}
    if cell is not None:
        d["cell"] = cell
    else:
        d["terminal"] = {"x": terminal[0], "y": terminal[1]}
    return d


def _base(core, clock_period, r=1.0, c=1.0):
    return {
        "core": list(core),
        "clock_period": clock_period,
        "r_unit": r,
        "c_unit": c,
        "default_cell_delay": 1.0,
        "cells": [],
        "pins": [],
        "nets": [],
        "sources": [],
        "endpoints": [],
    }


def t1_dict(clock_period: float = 10.0) -> dict:
    """Three-cell chain PI -> A -> B -> C -> PO; the only path has delay 28."""
    d = _base((0, 0, 10, 10), clock_period)
    d["cells"] = [_cell("A", 0, 0), _cell("B", 3, 0), _cell("C", 3, 4)]
    d["pins"] = [
        _pin("PI", terminal=(0, 0), direction="out"),
        _pin("A/i", "A"), _pin("A/o", "A", direction="out"),
        _pin("B/i", "B"), _pin("B/o", "B", direction="out"),
        _pin("C/i", "C"), _pin("C/o", "C", direction="out"),
        _pin("PO", terminal=(3, 4)),
    ]
    d["nets"] = [
        {"name": "n0", "driver": "PI", "sinks": ["A/i"]},
        {"name": "n1", "driver": "A/o", "sinks": ["B/i"]},
        {"name": "n2", "driver": "B/o", "sinks": ["C/i"]},
        {"name": "n3", "driver": "C/o", "sinks": ["PO"]},
    ]
    d["sources"] = ["PI"]
    d["endpoints"] = ["PO"]
    return d


def t1(clock_period: float = 10.0) -> Design:
    return design_from_dict(t1_dict(clock_period))


def t2_dict() -> dict:
    """EP1 is reached by paths of slack -5 and -4, EP2 by one path of slack -3.

    Every pin sits at the origin, so all delay comes from cell delays.
    """
    d = _base((0, 0, 10, 10), 10.0)
    d["cells"] = [
        _cell("U", delay=14.0), _cell("V", delay=13.0),
        _cell("M", delay=1.0), _cell("W", delay=13.0),
    ]
    d["pins"] = [
        _pin("S1", terminal=(0, 0), direction="out"),
        _pin("S2", terminal=(0, 0), direction="out"),
        _pin("U/i", "U"), _pin("U/o", "U", direction="out"),
        _pin("V/i", "V"), _pin("V/o", "V", direction="out"),
        _pin("M/a", "M"), _pin("M/b", "M"), _pin("M/o", "M", direction="out"),
        _pin("W/i", "W"), _pin("W/o", "W", direction="out"),
        _pin("EP1", terminal=(0, 0)),
        _pin("EP2", terminal=(0, 0)),
    ]
    d["nets"] = [
        {"name": "s1", "driver": "S1", "sinks": ["U/i", "V/i"]},
        {"name": "u", "driver": "U/o", "sinks": ["M/a"]},
        {"name": "v", "driver": "V/o", "sinks": ["M/b"]},
        {"name": "m", "driver": "M/o", "sinks": ["EP1"]},
        {"name": "s2", "driver": "S2", "sinks": ["W/i"]},
        {"name": "w", "driver": "W/o", "sinks": ["EP2"]},
    ]
    d["sources"] = ["S1", "S2"]
    d["endpoints"] = ["EP1", "EP2"]
    return d


def t2() -> Design:
    return design_from_dict(t2_dict())


def diamond_dict(clock_period: float = 5.0) -> dict:
    """source -> {A (delay 7), B (delay 5)} -> zero-delay merge -> endpoint."""
    d = _base((0, 0, 10, 10), clock_period)
    d["cells"] = [_cell("A", delay=7.0), _cell("B", delay=5.0), _cell("J", delay=0.0)]
    d["pins"] = [
        _pin("S", terminal=(0, 0), direction="out"),
        _pin("A/i", "A"), _pin("A/o", "A", direction="out"),
        _pin("B/i", "B"), _pin("B/o", "B", direction="out"),
        _pin("J/a", "J"), _pin("J/b", "J"), _pin("J/o", "J", direction="out"),
        _pin("E", terminal=(0, 0)),
    ]
    d["nets"] = [
        {"name": "s", "driver": "S", "sinks": ["A/i", "B/i"]},
        {"name": "a", "driver": "A/o", "sinks": ["J/a"]},
        {"name": "b", "driver": "B/o", "sinks": ["J/b"]},
        {"name": "j", "driver": "J/o", "sinks": ["E"]},
    ]
    d["sources"] = ["S"]
    d["endpoints"] = ["E"]
    return d


def diamond(clock_period: float = 5.0) -> Design:
    return design_from_dict(diamond_dict(clock_period))


def shared_trunk_dict(n_endpoints: int = 16, stages: int = 5, clock_period: float = 1.0) -> dict:
    """One trunk of diamond stages (2**stages paths) fanning out to failing endpoints.

    Stage ``i`` offers a slow branch of delay ``1 + 2**i / 64`` and a fast branch of
    delay 1, so every trunk path has a distinct delay within a spread of 0.5.
    Branch ``j`` after the trunk has delay ``n_endpoints - j``: endpoint 0 owns all
    of the worst paths.
    """
    d = _base((0, 0, 10, 10), clock_period)
    cells, pins, nets = d["cells"], d["pins"], d["nets"]
    pins.append(_pin("S", terminal=(0, 0), direction="out"))
    prev = "S"
    for i in range(stages):
        slow, fast, join = f"s{i}u", f"s{i}v", f"s{i}j"
        cells += [_cell(slow, delay=1.0 + 2.0**i / 64), _cell(fast, delay=1.0), _cell(join, delay=0.0)]
        pins += [
            _pin(f"{slow}/i", slow), _pin(f"{slow}/o", slow, direction="out"),
            _pin(f"{fast}/i", fast), _pin(f"{fast}/o", fast, direction="out"),
            _pin(f"{join}/a", join), _pin(f"{join}/b", join), _pin(f"{join}/o", join, direction="out"),
        ]
        nets += [
            {"name": f"t{i}", "driver": prev, "sinks": [f"{slow}/i", f"{fast}/i"]},
            {"name": f"t{i}u", "driver": f"{slow}/o", "sinks": [f"{join}/a"]},
            {"name": f"t{i}v", "driver": f"{fast}/o", "sinks": [f"{join}/b"]},
        ]
        prev = f"{join}/o"
    fan = []
    for j in range(n_endpoints):
        b = f"b{j}"
        cells.append(_cell(b, delay=float(n_endpoints - j)))
        pins += [_pin(f"{b}/i", b), _pin(f"{b}/o", b, direction="out"), _pin(f"PO{j}", terminal=(0, 0))]
        fan.append(f"{b}/i")
        nets.append({"name": f"o{j}", "driver": f"{b}/o", "sinks": [f"PO{j}"]})
        d["endpoints"].append(f"PO{j}")
    nets.append({"name": "fan", "driver": prev, "sinks": fan})
    d["sources"] = ["S"]
    return d


def shared_trunk(n_endpoints: int = 16, stages: int = 5, clock_period: float = 1.0) -> Design:
    return design_from_dict(shared_trunk_dict(n_endpoints, stages, clock_period))


def chain_dict(n_cells: int = 10, length: float = 110.0, seed: int = 0) -> dict:
    """Straight chain between two pinned terminals; cells start at random spots."""
    rng = np.random.default_rng(seed)
    d = _base((0, 0, length, length), 1.0)
    d["pins"].append(_pin("PI", terminal=(0.0, 0.0), direction="out"))
    prev = "PI"
    for i in range(n_cells):
        name = f"c{i}"
        x, y = rng.uniform(0, length - 1, size=2)
        d["cells"].append(_cell(name, float(x), float(y)))
        d["pins"] += [_pin(f"{name}/i", name), _pin(f"{name}/o", name, direction="out")]
        d["nets"].append({"name": f"n{i}", "driver": prev, "sinks": [f"{name}/i"]})
        prev = f"{name}/o"
    d["pins"].append(_pin("PO", terminal=(length, 0.0)))
    d["nets"].append({"name": f"n{n_cells}", "driver": prev, "sinks": ["PO"]})
    d["sources"] = ["PI"]
    d["endpoints"] = ["PO"]
    return d


def chain(n_cells: int = 10, length: float = 110.0, seed: int = 0) -> Design:
    return design_from_dict(chain_dict(n_cells, length, seed))


def random_dag_dict(seed: int, n_cells: int | None = None, max_cells: int = 12,
                    integer: bool = False, span: float = 100.0) -> dict:
    """Small random design for oracle and gradient checks.

    Cells are wired in index order so the graph is acyclic. Roughly one cell in
    five is a register (data input is an endpoint, output a source), a few are
    fixed, and some outputs are left dangling. With ``integer=True`` everything
    sits on a tiny integer lattice with unit r/c, so path delays tie often.
    """
    rng = np.random.default_rng(seed)
    n = int(n_cells if n_cells is not None else rng.integers(1, max_cells + 1))

    def num(lo, hi):
        return float(rng.integers(lo, hi + 1)) if integer else float(rng.uniform(lo, hi))

    if integer:
        d = _base((0, 0, span, span), num(5, 30))
        reach, cap_scale = 3, 1
    else:
        d = _base((0, 0, span, span), num(5, 30), r=num(1, 2) / 100, c=num(1, 2) / 100)
        reach, cap_scale = span - 8, 10
    cells, pins, nets = d["cells"], d["pins"], d["nets"]
    drivers, sinks_of = [], {}
    for i in range(rng.integers(1, 4)):
        pins.append(_pin(f"pi{i}", terminal=(0.0, num(0, reach)), direction="out"))
        d["sources"].append(f"pi{i}")
        drivers.append(f"pi{i}")
    fixed_left = max(0, n - 1)
    for i in range(n):
        name = f"c{i}"
        w, h = num(2, 8), num(2, 8)
        cell = _cell(name, num(0, reach), num(0, reach), delay=num(0, 3), w=w, h=h)
        if fixed_left and rng.random() < 0.1:
            cell["fixed"] = True
            fixed_left -= 1
        cells.append(cell)
        reg = rng.random() < 0.2
        ins = []
        for j in range(rng.integers(1, 3)):
            pin = f"{name}/i{j}"
            p = _pin(pin, name, dx=0.0, dy=num(0, 1 if integer else h))
            p["cap"] = num(0, 2) / cap_scale
            pins.append(p)
            ins.append(pin)
        outs = [f"{name}/o{j}" for j in range(rng.integers(1, 3))]
        for pin in outs:
            pins.append(_pin(pin, name, direction="out", dx=1.0 if integer else w,
                             dy=num(0, 1 if integer else h)))
        for pin in ins:
            # drivers from the last few producers keep path counts enumerable
            pool = drivers[-4:]
            sinks_of.setdefault(pool[int(rng.integers(len(pool)))], []).append(pin)
        if reg:
            d["endpoints"] += ins
            d["sources"] += outs
        drivers += outs
    n_po = 0
    for drv in drivers:
        if drv not in sinks_of and rng.random() < 0.7:
            po = f"po{n_po}"
            p = _pin(po, terminal=(reach, num(0, reach)))
            p["cap"] = num(0, 2) / cap_scale
            pins.append(p)
            d["endpoints"].append(po)
            sinks_of[drv] = [po]
            n_po += 1
    order = {p["name"]: i for i, p in enumerate(pins)}
    for drv in sorted(sinks_of, key=order.get):
        nets.append({"name": f"n_{drv}", "driver": drv, "sinks": sinks_of[drv]})
    return d


def random_dag(seed: int, n_cells: int | None = None, max_cells: int = 12,
               integer: bool = False, span: float = 100.0) -> Design:
    return design_from_dict(random_dag_dict(seed, n_cells, max_cells, integer, span))
