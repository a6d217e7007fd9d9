"""Objective terms: smoothed wirelength, bin density, pin-to-pin attraction.

All gradients are analytic. Vectorized routines return gradients with respect
to pin coordinates (wirelength, attraction) or cell lower-left corners
(density); :func:`pins_to_cells` folds pin gradients onto their owners.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netlist import Netlist
from .sta import TimingAnnotation

# ---------------------------------------------------------------- wirelength


def wa_wirelength(pin_xy, gamma: float):
    """Weighted-average wirelength of one net.

    ``pin_xy`` is ``(p, 2)``. Returns ``(value, grad)`` with ``grad`` shaped like
    ``pin_xy``. Exponents are shifted by the per-axis max/min.
    """
    pin_xy = np.asarray(pin_xy, dtype=float).reshape(-1, 2)
    if len(pin_xy) < 2:
        return 0.0, np.zeros_like(pin_xy)
    value, grad = 0.0, np.empty_like(pin_xy)
    for axis in range(2):
        x = pin_xy[:, axis]
        e = np.exp((x - x.max()) / gamma)
        f = np.exp((x.min() - x) / gamma)
        hi = (x * e).sum() / e.sum()
        lo = (x * f).sum() / f.sum()
        value += hi - lo
        grad[:, axis] = e / e.sum() * (1 + (x - hi) / gamma) - f / f.sum() * (1 - (x - lo) / gamma)
    return float(value), grad


def wa_wirelength_all(pin_pos, netlist: Netlist, gamma: float, net_weights=None):
    """All nets at once. Returns ``(total, per_net, pin_grad)``.

    ``net_weights`` scales each net's term (timing-weighted baseline).
    """
    ptr = netlist.net_ptr
    idx = netlist.net_pins
    starts = ptr[:-1]
    seg = np.repeat(np.arange(len(starts)), np.diff(ptr))
    per_net = np.zeros(len(starts))
    pin_grad = np.zeros((len(pin_pos), 2))
    w = None if net_weights is None else np.asarray(net_weights, dtype=float)
    for axis in range(2):
        x = pin_pos[idx, axis]
        xmax = np.maximum.reduceat(x, starts)
        xmin = np.minimum.reduceat(x, starts)
        e = np.exp((x - xmax[seg]) / gamma)
        f = np.exp((xmin[seg] - x) / gamma)
        se = np.add.reduceat(e, starts)
        sf = np.add.reduceat(f, starts)
        hi = np.add.reduceat(x * e, starts) / se
        lo = np.add.reduceat(x * f, starts) / sf
        per_net += hi - lo
        g = e / se[seg] * (1 + (x - hi[seg]) / gamma) - f / sf[seg] * (1 - (x - lo[seg]) / gamma)
        if w is not None:
            g = g * w[seg]
        pin_grad[:, axis] = np.bincount(idx, weights=g, minlength=len(pin_pos))
    total = float(per_net.sum() if w is None else (per_net * w).sum())
    return total, per_net, pin_grad


def hpwl(pin_pos, netlist: Netlist) -> float:
    starts = netlist.net_ptr[:-1]
    total = 0.0
    for axis in range(2):
        x = pin_pos[netlist.net_pins, axis]
        total += float((np.maximum.reduceat(x, starts) - np.minimum.reduceat(x, starts)).sum())
    return total


def pins_to_cells(pin_grad, netlist: Netlist) -> np.ndarray:
    """Sum pin gradients onto owning cells; terminal pins are dropped."""
    owned = netlist.pin_owner >= 0
    owner = netlist.pin_owner[owned]
    out = np.empty((netlist.n_cells, 2))
    for axis in range(2):
        out[:, axis] = np.bincount(owner, weights=pin_grad[owned, axis], minlength=netlist.n_cells)
    return out


# ---------------------------------------------------------------- density


@dataclass(frozen=True)
class BinGrid:
    core: tuple[float, float, float, float]
    nx: int
    ny: int
    target_density: float = 1.0

    @property
    def bin_w(self) -> float:
        return (self.core[2] - self.core[0]) / self.nx

    @property
    def bin_h(self) -> float:
        return (self.core[3] - self.core[1]) / self.ny

    @property
    def capacity(self) -> float:
        return self.target_density * self.bin_w * self.bin_h

    def edges(self, axis: int) -> np.ndarray:
        lo, hi = self.core[axis], self.core[axis + 2]
        return np.linspace(lo, hi, (self.nx, self.ny)[axis] + 1)


def _ramp(u, s):
    """Cumulative of the triangle kernel of half-width ``s``."""
    t = np.clip(u, -s, s)
    a, b = t + s, s - t
    return np.where(t < 0, a * a, 2 * s * s - b * b) / (2 * s * s)


def _ramp_integral(u, s):
    t = np.clip(u, -s, s)
    a, b = t + s, s - t
    c = 1.0 / (6 * s * s)
    return np.where(t < 0, a * a * a * c, t + b * b * b * c) + np.maximum(u - s, 0.0)


def axis_footprint(x, width, edges, smooth):
    """Fraction of each cell's extent falling in each bin along one axis.

    The cell profile is its box convolved with a triangle kernel, so the bin
    shares are twice differentiable in ``x``. Mass past the outer edges is
    folded into the boundary bins; rows sum to 1. Returns ``(share, d_share)``.
    """
    u = edges[None, :] - x[:, None]
    w = width[:, None]
    cdf = (_ramp_integral(u, smooth) - _ramp_integral(u - w, smooth)) / w
    pdf = (_ramp(u, smooth) - _ramp(u - w, smooth)) / w
    cdf[:, 0], cdf[:, -1] = 0.0, 1.0
    pdf[:, 0], pdf[:, -1] = 0.0, 0.0
    return np.diff(cdf, axis=1), -np.diff(pdf, axis=1)


@dataclass
class DensityResult:
    value: float
    grad: np.ndarray  # (n_cells, 2)
    overflow: float
    occupancy: np.ndarray  # (nx, ny)


def density_penalty(cell_xy, netlist: Netlist, grid: BinGrid) -> DensityResult:
    """Sum over bins of squared excess occupancy, plus the overflow ratio."""
    size = netlist.cell_size
    area = size[:, 0] * size[:, 1]
    wx, dwx = axis_footprint(cell_xy[:, 0], size[:, 0], grid.edges(0), grid.bin_w)
    wy, dwy = axis_footprint(cell_xy[:, 1], size[:, 1], grid.edges(1), grid.bin_h)
    occ = (wx * area[:, None]).T @ wy
    excess = np.maximum(occ - grid.capacity, 0.0)
    g = 2.0 * excess
    grad = np.empty((len(cell_xy), 2))
    grad[:, 0] = area * np.einsum("cl,cl->c", dwx @ g, wy)
    grad[:, 1] = area * np.einsum("cl,cl->c", wx @ g, dwy)
    return DensityResult(float((excess ** 2).sum()), grad, float(excess.sum() / area.sum()), occ)


# ---------------------------------------------------------------- pin pairs


class PinPairWeights:
    """Attraction weight per canonical ``(lo, hi)`` pin pair; keys never leave."""

    def __init__(self, items=None):
        self._w: dict[tuple[int, int], float] = {}
        self._arrays = None
        for pair, w in dict(items or {}).items():
            self._w[_canon(pair)] = float(w)

    def __len__(self):
        return len(self._w)

    def __contains__(self, pair):
        return _canon(pair) in self._w

    def __getitem__(self, pair):
        return self._w[_canon(pair)]

    def items(self):
        return self._w.items()

    def copy(self) -> "PinPairWeights":
        return PinPairWeights(dict(self._w))

    def arrays(self):
        """``(i, j, w)`` arrays in sorted pair order."""
        if self._arrays is None:
            keys = sorted(self._w)
            i = np.array([k[0] for k in keys], dtype=np.int64)
            j = np.array([k[1] for k in keys], dtype=np.int64)
            w = np.array([self._w[k] for k in keys], dtype=float)
            self._arrays = (i, j, w)
        return self._arrays

    def _set(self, pair, w):
        self._w[pair] = w
        self._arrays = None

    def to_dict(self, netlist: Netlist | None = None) -> dict:
        name = (lambda p: netlist.pins[p].name) if netlist is not None else int
        return {"pairs": [{"pins": [name(a), name(b)], "weight": self._w[(a, b)]}
                          for a, b in sorted(self._w)]}


def _canon(pair):
    a, b = int(pair[0]), int(pair[1])
    return (a, b) if a < b else (b, a)


def update_pair_weights(weights: PinPairWeights, pairs, wns: float, w0: float = 10.0,
                        w1: float = 0.2) -> PinPairWeights:
    """Sequential weight rule: insert at ``w0``; every later hit adds ``w1 * slack / wns``.

    ``pairs`` is the ``((i, j), path_slack)`` stream from path extraction.
    """
    if not wns < 0:
        raise ValueError("weight update needs a failing design (wns < 0)")
    for pair, slack in pairs:
        key = _canon(pair)
        if key in weights._w:
            weights._set(key, weights._w[key] + w1 * (slack / wns))
        else:
            weights._set(key, float(w0))
    return weights


def pin_pair_loss(weights, pin_pos, loss: str = "quadratic", eps: float = 1e-3):
    """Weighted attraction over pin pairs. Returns ``(value, pin_grad)``.

    ``loss`` is ``"quadratic"`` (squared Euclidean), ``"linear"`` (Euclidean)
    or ``"hpwl"`` (Manhattan); the last two are smoothed by ``eps``.
    """
    i, j, w = weights.arrays() if isinstance(weights, PinPairWeights) else weights
    grad = np.zeros((len(pin_pos), 2))
    if len(w) == 0:
        return 0.0, grad
    d = pin_pos[i] - pin_pos[j]
    if loss == "quadratic":
        value = float((w * (d ** 2).sum(axis=1)).sum())
        gd = 2.0 * w[:, None] * d
    elif loss == "linear":
        r = np.sqrt((d ** 2).sum(axis=1) + eps * eps)
        value = float((w * r).sum())
        gd = w[:, None] * d / r[:, None]
    elif loss == "hpwl":
        r = np.sqrt(d ** 2 + eps * eps)
        value = float((w[:, None] * r).sum())
        gd = w[:, None] * d / r
    else:
        raise ValueError(f"unknown pin-pair loss {loss!r}")
    for axis in range(2):
        grad[:, axis] += np.bincount(i, weights=gd[:, axis], minlength=len(pin_pos))
        grad[:, axis] -= np.bincount(j, weights=gd[:, axis], minlength=len(pin_pos))
    return value, grad


# ---------------------------------------------------------------- net weights


def apply_net_weights(annotation: TimingAnnotation, netlist: Netlist) -> np.ndarray:
    """Criticality weight per net: ``1 + max(0, -worst_pin_slack / |WNS|)``.

    Only pins with both an arrival and a required constraint count.
    """
    w = np.ones(len(netlist.nets))
    if annotation.wns >= 0:
        return w
    valid = ~(annotation.unreachable | annotation.unconstrained)
    slack = np.where(valid, annotation.slack, np.inf)
    per_net = np.minimum.reduceat(slack[netlist.net_pins], netlist.net_ptr[:-1])
    crit = np.where(np.isfinite(per_net), np.maximum(0.0, -per_net / abs(annotation.wns)), 0.0)
    return w + crit
