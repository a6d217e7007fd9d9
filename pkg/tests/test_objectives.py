import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gradcheck
from tdplace import fixtures
from tdplace.netlist import build_timing_graph, design_from_dict
from tdplace.objectives import (
    BinGrid,
    PinPairWeights,
    apply_net_weights,
    axis_footprint,
    density_penalty,
    hpwl,
    pin_pair_loss,
    pins_to_cells,
    update_pair_weights,
    wa_wirelength,
    wa_wirelength_all,
)
from tdplace.sta import run_sta

# ---------------------------------------------------------------- wirelength


def test_wa_single_pin():
    v, g = wa_wirelength([[3.0, 4.0]], 1.0)
    assert v == 0.0 and not g.any()


def test_wa_two_pins_reference():
    mpmath.mp.dps = 40
    e0, e10 = mpmath.e ** 0, mpmath.e ** 10
    hi = (0 * e0 + 10 * e10) / (e0 + e10)
    f0, f10 = mpmath.e ** 0, mpmath.e ** -10
    lo = (0 * f0 + 10 * f10) / (f0 + f10)
    want = float(hi - lo)
    got, _ = wa_wirelength([[0.0, 0.0], [10.0, 0.0]], 1.0)
    assert got == pytest.approx(want, abs=1e-12)
    assert round(got, 5) == 9.99909


def test_wa_survives_huge_coordinates():
    v, g = wa_wirelength([[1e6, 0.0], [1e6 + 50, 3.0]], 0.5)
    assert math.isfinite(v) and np.isfinite(g).all()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_wa_hpwl_bound(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(2, 30))
    xy = rng.uniform(-100, 100, (p, 2))
    gamma = float(rng.uniform(0.1, 20))
    for axis in range(2):
        col = np.zeros_like(xy)
        col[:, axis] = xy[:, axis]
        v, _ = wa_wirelength(col, gamma)
        gap = np.ptp(xy[:, axis]) - v
        assert -1e-9 <= gap <= 2 * gamma * math.log(p) + 1e-9


def test_vectorized_wl_matches_per_net():
    d = fixtures.random_dag(5, n_cells=12)
    nl = d.netlist
    pos = nl.pin_positions(d.positions)
    total, per_net, grad = wa_wirelength_all(pos, nl, 3.0)
    want = np.zeros_like(grad)
    for k, net in enumerate(nl.nets):
        ids = [net.driver, *net.sinks]
        v, g = wa_wirelength(pos[ids], 3.0)
        assert per_net[k] == pytest.approx(v, rel=1e-12)
        np.add.at(want, ids, g)
    assert total == pytest.approx(per_net.sum())
    np.testing.assert_allclose(grad, want, atol=1e-12)


def test_hpwl_t1():
    d = fixtures.t1()
    assert hpwl(d.netlist.pin_positions(d.positions), d.netlist) == 3 + 4 + 0 + 0


@pytest.mark.parametrize("seed", range(10))
def test_wa_gradient(seed):
    assert gradcheck.wa_case(seed) <= 1e-4

# ---------------------------------------------------------------- density


def test_footprint_rows_sum_to_one():
    rng = np.random.default_rng(0)
    edges = np.linspace(0, 100, 9)
    x = rng.uniform(-5, 100, 50)
    w = rng.uniform(1, 30, 50)
    share, _ = axis_footprint(x, w, edges, 12.5)
    np.testing.assert_allclose(share.sum(axis=1), 1.0, atol=1e-12)
    assert (share >= -1e-12).all()  # cancellation noise only


def _lone_cells(n, size):
    d = fixtures.t1_dict()
    d["core"] = [0, 0, 40, 40]
    d["cells"] = [{"name": f"k{i}", "width": size, "height": size} for i in range(n)]
    d["pins"] = [p for p in d["pins"] if "terminal" in p]
    d["nets"] = [{"name": "w", "driver": "PI", "sinks": ["PO"]}]
    return design_from_dict(d).netlist


def test_small_cell_in_roomy_bin():
    nl = _lone_cells(1, 1.0)
    res = density_penalty(np.array([[14.5, 14.5]]), nl, BinGrid((0, 0, 40, 40), 4, 4))
    assert res.value == 0 and not res.grad.any() and res.overflow == 0


def test_coincident_cells_push_apart():
    nl = _lone_cells(2, 10.0)
    grid = BinGrid((0, 0, 40, 40), 4, 4, target_density=0.5)  # room for one 10x10 cell
    c = 15.0 - 5.0  # lower-left corner that centers a cell in bin (1, 1)
    together = density_penalty(np.array([[c, c], [c, c]]), nl, grid)
    assert together.value > 0
    apart = density_penalty(np.array([[c - 0.5, c], [c + 0.5, c]]), nl, grid)
    gx = apart.grad[:, 0]
    assert gx[0] == pytest.approx(-gx[1], rel=1e-12) and gx[0] > 0 > gx[1]
    assert apart.grad[0, 1] == pytest.approx(apart.grad[1, 1], rel=1e-12)


def test_overflow_ratio():
    nl = _lone_cells(2, 10.0)
    grid = BinGrid((0, 0, 40, 40), 4, 4, target_density=0.5)
    res = density_penalty(np.array([[10.0, 10.0], [10.0, 10.0]]), nl, grid)
    excess = np.maximum(res.occupancy - grid.capacity, 0).sum()
    assert res.overflow == pytest.approx(excess / 200.0)
    assert res.occupancy.sum() == pytest.approx(200.0)


@pytest.mark.parametrize("seed", range(10))
def test_density_gradient(seed):
    assert gradcheck.density_case(seed) <= 1e-4

# ---------------------------------------------------------------- pin pairs


def test_pp_example():
    w = PinPairWeights({(0, 1): 10.0})
    v, g = pin_pair_loss(w, np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert v == 250.0 and g[0, 0] == -60.0 and g[1, 1] == 80.0


def test_pp_empty_and_coincident():
    pos = np.array([[1.0, 2.0], [1.0, 2.0]])
    assert pin_pair_loss(PinPairWeights(), pos)[0] == 0.0
    v, g = pin_pair_loss(PinPairWeights({(1, 0): 10.0}), pos)
    assert v == 0.0 and not g.any()
    for loss in ("linear", "hpwl"):
        v, g = pin_pair_loss(PinPairWeights({(1, 0): 10.0}), pos, loss)
        assert np.isfinite(v) and not g.any()


def test_pp_unknown_loss():
    with pytest.raises(ValueError):
        pin_pair_loss(PinPairWeights({(0, 1): 1.0}), np.zeros((2, 2)), "cubic")


@pytest.mark.parametrize("seed", range(10))
def test_pp_gradient(seed):
    assert gradcheck.pp_case(seed) <= 1e-4


@pytest.mark.parametrize("loss", ["linear", "hpwl"])
def test_smoothed_pp_gradients(loss):
    # smoothing must be wide relative to the stencil for the difference to resolve it
    rng = np.random.default_rng(1)
    pos = rng.uniform(0, 100, (6, 2))
    w = PinPairWeights({(0, 1): 10.0, (2, 3): 11.0, (1, 4): 12.0, (4, 5): 10.5})
    _, g = pin_pair_loss(w, pos, loss, eps=1.0)
    fd = gradcheck.central(lambda z: pin_pair_loss(w, z, loss, eps=1.0)[0], pos)
    assert gradcheck.rel_error(g, fd) <= 1e-4


def test_fixed_side_gets_no_force():
    d = fixtures.t1()
    nl = d.netlist
    pos = nl.pin_positions(d.positions)
    pos[1] += (0.0, 7.0)  # pull A's input pin away from PI
    _, g = pin_pair_loss(PinPairWeights({(0, 1): 10.0}), pos)
    cell_g = pins_to_cells(g, nl)
    assert cell_g[0, 1] != 0 and not cell_g[1:].any()  # PI is a terminal; only A feels it


def test_pair_keys_are_canonical():
    w = PinPairWeights({(5, 2): 10.0})
    assert (2, 5) in w and (5, 2) in w and w[(5, 2)] == 10.0
    assert w.to_dict() == {"pairs": [{"pins": [2, 5], "weight": 10.0}]}

# ---------------------------------------------------------------- weight updates


def test_fresh_pair_gets_w0():
    w = update_pair_weights(PinPairWeights(), [((1, 2), -3.0)], wns=-5.0)
    assert w[(1, 2)] == 10.0


def test_repeat_at_wns():
    w = update_pair_weights(PinPairWeights({(1, 2): 10.0}), [((2, 1), -5.0)], wns=-5.0)
    assert w[(1, 2)] == pytest.approx(10.2)


@pytest.mark.parametrize("order, want", [
    ([-400.0, -500.0], 10.2),
    ([-500.0, -400.0], 10.16),
])
def test_shared_pair_sequential(order, want):
    w = update_pair_weights(PinPairWeights(), [((3, 4), s) for s in order], wns=-500.0)
    assert w[(3, 4)] == pytest.approx(want)


def test_update_needs_failing_design():
    with pytest.raises(ValueError):
        update_pair_weights(PinPairWeights(), [((0, 1), 1.0)], wns=0.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6), st.floats(-100, -1e-3)), max_size=40))
def test_weights_only_grow(stream):
    stream = [((a, b), s) for a, b, s in stream if a != b]
    if not stream:
        return
    wns = min(s for _, s in stream)
    w = PinPairWeights()
    seen = {}
    for item in stream:
        update_pair_weights(w, [item], wns)
        for k, v in w.items():
            assert v >= seen.get(k, 10.0)
            seen[k] = v
    assert len(w) == len({tuple(sorted(p)) for p, _ in stream})

# ---------------------------------------------------------------- net weights


def _timed(design):
    g = build_timing_graph(design.netlist)
    return run_sta(g, design.netlist, design.constraints, design.positions)


def test_net_weights_on_t2():
    d = fixtures.t2()
    w = apply_net_weights(_timed(d), d.netlist)
    names = [n.name for n in d.netlist.nets]
    # the WNS path (s1 -> U -> M -> EP1) reaches weight 2; W's chain sits at -3 / 5
    assert w[names.index("m")] == 2.0 and w[names.index("u")] == 2.0
    assert w[names.index("w")] == pytest.approx(1.6)


def test_net_weights_all_passing():
    d = fixtures.t1(clock_period=100)
    assert apply_net_weights(_timed(d), d.netlist).tolist() == [1.0] * 4


def test_positive_slack_net_is_one():
    d = fixtures.t2_dict()
    d["cells"][3]["delay"] = 1.0  # W's path now passes
    design = design_from_dict(d)
    w = apply_net_weights(_timed(design), design.netlist)
    names = [n.name for n in design.netlist.nets]
    assert w[names.index("w")] == 1.0 and w[names.index("s2")] == 1.0
