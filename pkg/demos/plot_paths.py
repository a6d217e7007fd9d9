"""Place a small generated design and draw its worst paths as SVG."""

import sys
from pathlib import Path

from tdplace import (
    GeneratorSpec,
    OptimizerConfig,
    build_timing_graph,
    generate_synthetic,
    report_timing_endpoint,
    run_placement,
    run_sta,
)
from tdplace.plot import cmd_plot

out = Path(sys.argv[1] if len(sys.argv) > 1 else "layout.svg")
design = generate_synthetic(GeneratorSpec(seed=4, n_cells=120))
res = run_placement(design, OptimizerConfig(seed=4))

graph = build_timing_graph(design.netlist)
ann = run_sta(graph, design.netlist, design.constraints, res.positions)
paths = report_timing_endpoint(graph, ann, 4, 1).paths
cmd_plot(design, res.positions, paths, out)
print(f"TNS {ann.tns:.4g}, {len(paths)} paths drawn to {out}")
