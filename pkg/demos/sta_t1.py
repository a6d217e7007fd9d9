"""Timing on the three-cell chain: arrival, required and slack at every pin."""

from tdplace import build_timing_graph, fixtures, run_sta

design = fixtures.t1()
nl = design.netlist
graph = build_timing_graph(nl)
ann = run_sta(graph, nl, design.constraints, design.positions)

print(f"{'pin':6} {'arr':>6} {'req':>6} {'slack':>6}")
for p in nl.pins:
    print(f"{p.name:6} {ann.arr[p.id]:6g} {ann.req[p.id]:6g} {ann.slack[p.id]:6g}")
print(f"TNS {ann.tns:g}  WNS {ann.wns:g}")

# moving C next to B shortens the last two wires
xy = design.positions.copy()
xy[2] = (3.0, 1.0)
print("C moved to (3, 1): WNS", run_sta(graph, nl, design.constraints, xy).wns)
