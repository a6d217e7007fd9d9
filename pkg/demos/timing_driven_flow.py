"""Generate a design, then compare the full flow with the beta = 0 baseline.

Takes a few seconds on one core; pass a cell count to change the size.
"""

import sys

from tdplace import GeneratorSpec, cmd_compare, generate_synthetic
from tdplace.compare import ablation_configs

n_cells = int(sys.argv[1]) if len(sys.argv) > 1 else 400
design = generate_synthetic(GeneratorSpec(seed=1, n_cells=n_cells, target_fail_fraction=0.2))
print(f"{n_cells} cells, clock period {design.constraints.clock_period:.4g}")

report = cmd_compare(design, ablation_configs(), seed=1)
print(report.table())

full, base = report.row("quadratic"), report.row("beta0")
print(f"\nTNS {base.tns:.4g} -> {full.tns:.4g}; WNS {base.wns:.4g} -> {full.wns:.4g}")
