"""Static timing analysis with a lumped RC net-delay model.

Each driver-to-sink connection is treated as its own wire segment of Manhattan
length ``L`` with resistance ``r_unit * L`` driving ``c_unit * L + sink_cap``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphError
from .netlist import DesignConstraints, Netlist, TimingGraph


def net_delay(source_pos, sink_pos, sink_cap: float, constraints: DesignConstraints) -> float:
    length = abs(sink_pos[0] - source_pos[0]) + abs(sink_pos[1] - source_pos[1])
    return (constraints.r_unit * length) * (constraints.c_unit * length + sink_cap)


def arc_delays(graph: TimingGraph, netlist: Netlist, pin_pos: np.ndarray,
               constraints: DesignConstraints) -> np.ndarray:
    """Delay of every arc: RC delay for net arcs, the owner's delay for cell arcs."""
    d = np.empty(graph.n_arcs)
    net = graph.arc_net >= 0
    u, v = graph.arc_from[net], graph.arc_to[net]
    length = np.abs(pin_pos[v, 0] - pin_pos[u, 0]) + np.abs(pin_pos[v, 1] - pin_pos[u, 1])
    d[net] = (constraints.r_unit * length) * (constraints.c_unit * length + netlist.pin_cap[v])
    d[~net] = netlist.cell_delay[graph.arc_cell[~net]]
    return d


def _check(graph):
    if graph.level is None:
        raise GraphError("timing graph has not been levelized")


def propagate_arrival(graph: TimingGraph, delays: np.ndarray):
    """Forward max-propagation. Returns ``(arr, unreachable)``.

    Pins that no source reaches get arrival 0 and are flagged; their out-arcs
    do not contribute downstream.
    """
    _check(graph)
    arr = np.full(graph.n_pins, -np.inf)
    arr[graph.sources] = 0.0
    for arcs in graph.fwd_groups:
        cand = arr[graph.arc_from[arcs]] + delays[arcs]
        np.maximum.at(arr, graph.arc_to[arcs], cand)
    unreachable = ~np.isfinite(arr)
    arr[unreachable] = 0.0
    return arr, unreachable


def propagate_required(graph: TimingGraph, delays: np.ndarray, clock_period: float):
    """Backward min-propagation from ``clock_period`` at every endpoint.

    Returns ``(req, unconstrained)``; pins reaching no endpoint get the clock
    period and are flagged.
    """
    _check(graph)
    req = np.full(graph.n_pins, np.inf)
    req[graph.endpoints] = clock_period
    for arcs in graph.bwd_groups:
        cand = req[graph.arc_to[arcs]] - delays[arcs]
        np.minimum.at(req, graph.arc_from[arcs], cand)
    unconstrained = ~np.isfinite(req)
    req[unconstrained] = clock_period
    return req, unconstrained


def tns_wns(endpoint_slacks) -> tuple[float, float]:
    neg = [s for _, s in endpoint_slacks if s < 0]
    if not neg:
        return 0.0, 0.0
    tns = 0.0
    for s in neg:
        tns += s
    return tns, min(neg)


@dataclass(eq=False)
class TimingAnnotation:
    arr: np.ndarray
    req: np.ndarray
    slack: np.ndarray
    arc_delay: np.ndarray
    endpoint_slacks: list  # (pin id, slack) in endpoint declaration order
    tns: float
    wns: float
    clock_period: float
    unreachable: np.ndarray
    unconstrained: np.ndarray

    @property
    def violated(self) -> list:
        """Failing endpoints, worst first (ties by pin id)."""
        bad = [(s, p) for p, s in self.endpoint_slacks if s < 0]
        return [p for s, p in sorted(bad)]

    def to_dict(self, netlist: Netlist | None = None) -> dict:
        name = (lambda p: netlist.pins[p].name) if netlist is not None else int
        return {
            "tns": self.tns,
            "wns": self.wns,
            "endpoints": [{"pin": name(p), "slack": s} for p, s in self.endpoint_slacks],
            "pins": [
                {"pin": name(p), "arr": float(self.arr[p]), "req": float(self.req[p]),
                 "slack": float(self.slack[p])}
                for p in range(len(self.arr))
            ],
        }


def compute_slacks(graph: TimingGraph, arrivals, required, delays=None,
                   clock_period: float | None = None) -> TimingAnnotation:
    arr, unreachable = arrivals
    req, unconstrained = required
    slack = req - arr
    ep = [(int(p), float(slack[p])) for p in graph.endpoints]
    tns, wns = tns_wns(ep)
    if clock_period is None:
        clock_period = float(req[graph.endpoints[0]]) if len(graph.endpoints) else 0.0
    return TimingAnnotation(
        arr=arr, req=req, slack=slack,
        arc_delay=delays if delays is not None else np.zeros(graph.n_arcs),
        endpoint_slacks=ep, tns=tns, wns=wns, clock_period=clock_period,
        unreachable=unreachable, unconstrained=unconstrained,
    )


def run_sta(graph: TimingGraph, netlist: Netlist, constraints: DesignConstraints,
            cell_xy: np.ndarray) -> TimingAnnotation:
    """Full timing update for cell lower-left positions ``cell_xy``."""
    pin_pos = netlist.pin_positions(cell_xy)
    delays = arc_delays(graph, netlist, pin_pos, constraints)
    arrivals = propagate_arrival(graph, delays)
    required = propagate_required(graph, delays, constraints.clock_period)
    return compute_slacks(graph, arrivals, required, delays, constraints.clock_period)
