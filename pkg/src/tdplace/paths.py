"""Critical-path extraction: global top-n and per-endpoint policies.

Paths are ranked by ascending slack; equal slacks are ordered by the
lexicographically smallest pin-id sequence (source first).
"""

from __future__ import annotations

import heapq
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EndpointError
from .netlist import Netlist, TimingGraph
from .sta import TimingAnnotation


@dataclass(frozen=True)
class CriticalPath:
    pins: tuple[int, ...]
    arcs: tuple[int, ...]
    slack: float
    delay: float
    net_pairs: tuple[tuple[int, int], ...]  # (driver, sink) of each net arc, in path order

    @property
    def endpoint(self) -> int:
        return self.pins[-1]

    @property
    def source(self) -> int:
        return self.pins[0]


@dataclass
class ExtractionReport:
    policy: str
    n: int
    k: int
    paths: list
    unique_endpoints: int
    unique_pin_pairs: int
    candidates_generated: int
    elapsed: float = field(default=0.0, compare=False)

    def to_dict(self, netlist: Netlist | None = None, wallclock: bool = True) -> dict:
        name = (lambda p: netlist.pins[p].name) if netlist is not None else int
        return {
            "policy": self.policy,
            "n": self.n,
            "k": self.k,
            "candidates_generated": self.candidates_generated,
            "elapsed_ms": self.elapsed * 1e3 if wallclock else None,
            "paths": [{"slack": p.slack, "pins": [name(q) for q in p.pins]} for p in self.paths],
            "unique_endpoints": self.unique_endpoints,
            "unique_pin_pairs": self.unique_pin_pairs,
        }


class PathSearch:
    """Worst-path machinery bound to one timing snapshot.

    ``best_arc[v]`` is the incoming arc of the lexicographically smallest
    maximum-delay path to ``v`` (-1 for sources and unreachable pins).
    """

    def __init__(self, graph: TimingGraph, annotation: TimingAnnotation):
        self.graph = graph
        self.ann = annotation
        self.delay = annotation.arc_delay
        self.arr = annotation.arr
        self.reach = ~annotation.unreachable
        self.best_arc = self._best_arcs()

    def _best_arcs(self):
        g, arr, d = self.graph, self.arr, self.delay
        frm, to = g.arc_from, g.arc_to
        tight = self.reach[frm] & self.reach[to] & (arr[frm] + d == arr[to])
        best = np.full(g.n_pins, -1, dtype=np.int64)
        count = np.bincount(to[tight], minlength=g.n_pins)
        ids = np.flatnonzero(tight)
        single = count[to[ids]] == 1
        best[to[ids[single]]] = ids[single]
        multi = np.flatnonzero(count > 1)
        if len(multi):
            # resolve in topological order so every predecessor key is final
            rank = np.empty(g.n_pins, dtype=np.int64)
            rank[g.order] = np.arange(g.n_pins)
            tied_by_head = {}
            for a in ids[~single].tolist():
                tied_by_head.setdefault(int(to[a]), []).append(a)
            self.best_arc = best
            for v in sorted(tied_by_head, key=lambda v: rank[v]):
                best[v] = min(tied_by_head[v], key=lambda a: self.key(int(frm[a])))
        return best

    def key(self, v: int) -> list:
        """Pins of the worst (then lexicographically smallest) path ending at ``v``."""
        seq = [v]
        a = self.best_arc[v]
        while a >= 0:
            v = int(self.graph.arc_from[a])
            seq.append(v)
            a = self.best_arc[v]
        seq.reverse()
        return seq

    def _path(self, arcs, first_pin) -> CriticalPath:
        g = self.graph
        pins = [first_pin] + [int(g.arc_to[a]) for a in arcs]
        total = 0.0
        for a in arcs:
            total += self.delay[a]
        pairs = tuple((int(g.arc_from[a]), int(g.arc_to[a])) for a in arcs if g.arc_net[a] >= 0)
        return CriticalPath(tuple(pins), tuple(arcs), float(self.ann.clock_period - total), float(total), pairs)

    def worst_path(self, endpoint: int) -> CriticalPath | None:
        if not self.reach[endpoint]:
            return None
        arcs = []
        a = self.best_arc[endpoint]
        while a >= 0:
            arcs.append(int(a))
            a = self.best_arc[self.graph.arc_from[a]]
        arcs.reverse()
        first = int(self.graph.arc_from[arcs[0]]) if arcs else int(endpoint)
        return self._path(arcs, first)

    def enumerate(self, roots, limit: int) -> list:
        """Best-first deviation search over path suffixes grown backwards from ``roots``.

        A suffix ``v -> ... -> root`` is bounded by ``arr[v] + suffix delay``,
        which is exactly the delay of its best completion, so complete paths pop
        in rank order.
        """
        g = self.graph
        heap, out = [], []
        for r in roots:
            if self.reach[r]:
                heapq.heappush(heap, _Cand(self, int(r), None, 0.0))
        while heap and len(out) < limit:
            c = heapq.heappop(heap)
            lo, hi = g.in_ptr[c.node], g.in_ptr[c.node + 1]
            children = [a for a in g.in_arcs[lo:hi].tolist() if self.reach[g.arc_from[a]]]
            if not children:
                arcs = []
                link = c.suffix
                while link is not None:
                    arcs.append(link[0])
                    link = link[1]
                out.append(self._path(arcs, c.node))
                continue
            for a in children:
                heapq.heappush(heap, _Cand(self, int(g.arc_from[a]), (a, c.suffix), c.sdelay + self.delay[a]))
        out.sort(key=lambda p: (p.slack, p.pins))
        return out


class _Cand:
    __slots__ = ("search", "node", "suffix", "sdelay", "bound")

    def __init__(self, search, node, suffix, sdelay):
        self.search = search
        self.node = node
        self.suffix = suffix  # linked list (arc, rest) toward the root
        self.sdelay = sdelay
        self.bound = search.arr[node] + sdelay

    def sequence(self):
        seq = self.search.key(self.node)
        link, to = self.suffix, self.search.graph.arc_to
        while link is not None:
            seq.append(int(to[link[0]]))
            link = link[1]
        return seq

    def __lt__(self, other):
        if self.bound != other.bound:
            return self.bound > other.bound
        return self.sequence() < other.sequence()


def k_worst_paths_to(graph: TimingGraph, annotation: TimingAnnotation, endpoint: int, k: int,
                     search: PathSearch | None = None) -> list:
    if not graph.is_endpoint[endpoint]:
        raise EndpointError(f"pin {endpoint} is not a timing endpoint")
    search = search or PathSearch(graph, annotation)
    if k == 1:
        p = search.worst_path(endpoint)
        return [p] if p is not None else []
    return search.enumerate([endpoint], k)


def _unique_pairs(paths) -> int:
    return len({(min(a, b), max(a, b)) for p in paths for a, b in p.net_pairs})


def report_timing_endpoint(graph: TimingGraph, annotation: TimingAnnotation, n: int, k: int,
                           workers: int = 1) -> ExtractionReport:
    """The ``n`` worst failing endpoints, each covered by its own ``k`` worst paths."""
    t0 = time.perf_counter()
    selected = annotation.violated[:n]
    search = PathSearch(graph, annotation)

    def one(e):
        return k_worst_paths_to(graph, annotation, e, k, search)

    if workers > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_endpoint = list(pool.map(one, selected))
    else:
        per_endpoint = [one(e) for e in selected]
    paths = [p for group in per_endpoint for p in group]
    return ExtractionReport(
        policy="endpoint", n=n, k=k, paths=paths,
        unique_endpoints=len({p.endpoint for p in paths}),
        unique_pin_pairs=_unique_pairs(paths),
        candidates_generated=len(selected) * k,
        elapsed=time.perf_counter() - t0,
    )


def report_timing(graph: TimingGraph, annotation: TimingAnnotation, n: int,
                  exhaustive: bool = False) -> ExtractionReport:
    """Global top-``n``: ``n`` worst failing endpoints, ``n`` paths each, keep the worst ``n``.

    The default runs one best-first search across the selected endpoints, which
    returns the same paths as materialising every per-endpoint list
    (``exhaustive=True``); ``candidates_generated`` counts the per-endpoint
    slots either way.
    """
    t0 = time.perf_counter()
    selected = annotation.violated[:n]
    search = PathSearch(graph, annotation)
    if exhaustive:
        pool = [p for e in selected for p in search.enumerate([e], n)]
        pool.sort(key=lambda p: (p.slack, p.pins))
        paths = pool[:n]
    else:
        paths = search.enumerate(selected, n)
    return ExtractionReport(
        policy="topn", n=n, k=n, paths=paths,
        unique_endpoints=len({p.endpoint for p in paths}),
        unique_pin_pairs=_unique_pairs(paths),
        candidates_generated=len(selected) * n,
        elapsed=time.perf_counter() - t0,
    )


def collect_pin_pairs(paths) -> list:
    """One ``((lo, hi), path_slack)`` entry per net arc on each path, in path order."""
    out = []
    for p in paths:
        for a, b in p.net_pairs:
            out.append(((a, b) if a < b else (b, a), p.slack))
    return out
