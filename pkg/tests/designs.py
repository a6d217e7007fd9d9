"""Generated designs shared across test modules (built once per session)."""

from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from tdplace import fixtures
from tdplace.generator import GeneratorSpec, generate_synthetic
from tdplace.objectives import PinPairWeights, pin_pair_loss, pins_to_cells
from tdplace.placer import OptimizerConfig, run_placement


@lru_cache(maxsize=None)
def synthetic(seed, n_cells=1000, fail_frac=0.2):
    return generate_synthetic(GeneratorSpec(seed=seed, n_cells=n_cells, target_fail_fraction=fail_frac))


@lru_cache(maxsize=None)
def paired_runs(seed):
    """Full flow and the beta = 0 baseline on the 1000-cell design for ``seed``."""
    d = synthetic(seed)
    return run_placement(d, OptimizerConfig(seed=seed)), run_placement(d, OptimizerConfig(seed=seed, beta=0.0))


def chain_pp_optimum(loss, n_cells=10, seed=0):
    """Minimize the chain's attraction term alone (equal weights on every net arc)."""
    design = fixtures.chain(n_cells=n_cells, seed=seed)
    nl = design.netlist
    weights = PinPairWeights({(n.driver, n.sinks[0]): 10.0 for n in nl.nets})
    eps = 0.01 * design.constraints.core_span / 100

    def f(flat):
        pos = nl.pin_positions(flat.reshape(-1, 2))
        v, g = pin_pair_loss(weights, pos, loss, eps)
        return v, pins_to_cells(g, nl).ravel()

    res = minimize(f, design.positions.ravel(), jac=True, method="L-BFGS-B",
                   options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 10_000})
    xy = res.x.reshape(-1, 2)
    pts = np.vstack([[0.0, 0.0], xy, [design.constraints.core[2], 0.0]])
    seg = np.hypot(*np.diff(pts, axis=0).T)
    return xy, seg
