"""Brute-force references: explicit path enumeration over a design.

Nothing here touches the propagation or search code under test; arcs and
delays are rebuilt straight from the netlist records.
"""

import numpy as np


def pin_xy(design, cell_xy=None):
    nl = design.netlist
    cell_xy = design.positions if cell_xy is None else cell_xy
    out = []
    for p in nl.pins:
        base = p.terminal_xy if p.owner < 0 else cell_xy[p.owner]
        out.append((base[0] + p.offset[0], base[1] + p.offset[1]))
    return out


def arcs_with_delays(design, cell_xy=None):
    """``{tail: [(head, delay)]}`` with register boundaries applied."""
    nl, cons = design.netlist, design.constraints
    pos = pin_xy(design, cell_xy)
    src, ep = set(nl.sources), set(nl.endpoints)
    succ = {p.id: [] for p in nl.pins}
    for net in nl.nets:
        for s in net.sinks:
            length = abs(pos[s][0] - pos[net.driver][0]) + abs(pos[s][1] - pos[net.driver][1])
            succ[net.driver].append((s, (cons.r_unit * length) * (cons.c_unit * length + nl.pins[s].load_cap)))
    for c in nl.cells:
        ins = [p for p in nl.pins if p.owner == c.id and p.direction == "in" and p.id not in ep]
        outs = [p for p in nl.pins if p.owner == c.id and p.direction == "out" and p.id not in src]
        for i in ins:
            for o in outs:
                succ[i.id].append((o.id, c.delay))
    return succ


def all_paths(design, cell_xy=None):
    """Every source-to-endpoint path as ``(pins, forward delay sum)``."""
    nl = design.netlist
    succ = arcs_with_delays(design, cell_xy)
    ep = set(nl.endpoints)
    out = []

    def walk(v, pins, total):
        if v in ep:
            out.append((tuple(pins), total))
        for w, d in succ[v]:
            pins.append(w)
            walk(w, pins, total + d)
            pins.pop()

    for s in nl.sources:
        walk(s, [s], 0.0)
    return out


def timing(design, cell_xy=None):
    """Arrival, required and slack per pin by enumerating every path."""
    nl, clock = design.netlist, design.constraints.clock_period
    succ = arcs_with_delays(design, cell_xy)
    n = nl.n_pins
    arr = np.full(n, -np.inf)

    def fwd(v, total):
        arr[v] = max(arr[v], total)
        for w, d in succ[v]:
            fwd(w, total + d)

    for s in nl.sources:
        fwd(s, 0.0)
    arr[~np.isfinite(arr)] = 0.0

    ep = set(nl.endpoints)

    def to_endpoints(v):
        """Largest delay from ``v`` to any endpoint, or None."""
        best = 0.0 if v in ep else None
        for w, d in succ[v]:
            rest = to_endpoints(w)
            if rest is not None and (best is None or d + rest > best):
                best = d + rest
        return best

    req = np.array([clock if (t := to_endpoints(v)) is None else clock - t for v in range(n)])
    return arr, req, req - arr


def ranked_paths(design, endpoint, cell_xy=None):
    """Paths into ``endpoint`` as ``(slack, pins)``, worst first, then by pin ids."""
    clock = design.constraints.clock_period
    rows = [(clock - total, pins) for pins, total in all_paths(design, cell_xy) if pins[-1] == endpoint]
    return sorted(rows)
