"""Quadratic versus linear attraction on a pinned chain of ten cells.

With every driver/sink pair weighted equally, the quadratic loss is minimized
by equal segments. The linear loss only cares about total length, so any
monotone arrangement along the line is optimal and the spacing stays uneven.
"""

import numpy as np
from scipy.optimize import minimize

from tdplace import PinPairWeights, fixtures, pin_pair_loss
from tdplace.objectives import pins_to_cells

design = fixtures.chain(n_cells=10, seed=3)
nl = design.netlist
weights = PinPairWeights({(n.driver, n.sinks[0]): 10.0 for n in nl.nets})

for loss in ("quadratic", "linear"):
    def f(flat):
        v, g = pin_pair_loss(weights, nl.pin_positions(flat.reshape(-1, 2)), loss, 0.011)
        return v, pins_to_cells(g, nl).ravel()

    res = minimize(f, design.positions.ravel(), jac=True, method="L-BFGS-B",
                   options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 10_000})
    x = np.concatenate([[0.0], res.x.reshape(-1, 2)[:, 0], [110.0]])
    seg = np.diff(x)
    print(f"{loss:9} segments {np.round(seg, 2)}  variance {seg.var():.3g}")
