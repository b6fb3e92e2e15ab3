from __future__ import annotations

import numpy as np
import pytest

from predgrid.config import SimConfig
from predgrid.grid import init_network
from predgrid.plasticity import INFLUX_GUARD, ltm_update

from oracles import naive_ltm_step


def fresh_net(seed=0):
    return init_network(SimConfig(), np.random.default_rng(seed))


def set_cell(net, cid, *, total, expectation, influx, strengths=None):
    net.activation[cid] = total
    net.expectation[cid] = expectation
    net.influx[cid] = influx
    if strengths is not None:
        net.strengths[cid] = strengths


def test_hand_worked_update():
    net = fresh_net()
    cid = net.processing_ids[0]
    set_cell(net, cid, total=0.5, expectation=0.1,
             influx=[0.3, 0.1, 0.0, 0.0], strengths=[0.0, 0.0, 0.0, 0.0])
    ltm_update(net, 0.02)
    assert net.expectation[cid] == pytest.approx(0.104, abs=1e-12)
    assert net.strengths[cid] == pytest.approx([0.003, 0.001, 0.0, 0.0], abs=1e-12)


def test_matches_scalar_oracle_on_random_cells(rng):
    net = fresh_net(3)
    sl = net.processing_slice
    net.activation[sl] = rng.uniform(-2, 2, net.n_processing)
    net.influx[sl] = rng.uniform(-1, 1, (net.n_processing, 4))
    # make some cells hit the guard
    for cid in list(net.processing_ids)[::5]:
        net.influx[cid] = 0.0
    expected = {}
    for cid in net.processing_ids:
        expected[cid] = naive_ltm_step(
            float(net.activation[cid]), float(net.expectation[cid]),
            [float(v) for v in net.influx[cid]],
            [float(s) for s in net.strengths[cid]], 0.02)
    ltm_update(net, 0.02)
    for cid, (exp_e, exp_s) in expected.items():
        assert net.expectation[cid] == pytest.approx(exp_e, abs=1e-14)
        assert net.strengths[cid] == pytest.approx(exp_s, abs=1e-14)


def test_zero_error_changes_nothing():
    net = fresh_net(1)
    sl = net.processing_slice
    net.activation[sl] = net.expectation[sl]
    net.influx[sl] = 0.5
    before_e = net.expectation.copy()
    before_s = net.strengths.copy()
    ltm_update(net)
    assert np.array_equal(net.expectation, before_e)
    assert np.array_equal(net.strengths, before_s)


def test_guard_skips_strengths_but_not_expectation():
    net = fresh_net(2)
    cid = net.processing_ids[0]
    set_cell(net, cid, total=0.9, expectation=0.2, influx=[0.0, 0.0, 0.0, 0.0])
    before_s = net.strengths[cid].copy()
    ltm_update(net)
    assert net.strengths[cid] == pytest.approx(before_s)
    assert net.expectation[cid] == pytest.approx(0.2 + 0.01 * 0.7, abs=1e-14)


def test_guard_threshold_is_strict():
    net = fresh_net(2)
    cid = net.processing_ids[0]
    tiny = INFLUX_GUARD / 8.0
    set_cell(net, cid, total=1.0, expectation=0.0,
             influx=[tiny, tiny, tiny, tiny])
    before_s = net.strengths[cid].copy()
    ltm_update(net)
    assert np.array_equal(net.strengths[cid], before_s)


def test_error_contracts_by_exactly_one_minus_half_lr(rng):
    # exact in real arithmetic; floating point adds at most ~1 ulp
    net = fresh_net(4)
    sl = net.processing_slice
    net.activation[sl] = rng.uniform(-2, 2, net.n_processing)
    old_error = net.activation[sl] - net.expectation[sl]
    ltm_update(net, 0.02)
    new_error = net.activation[sl] - net.expectation[sl]
    assert new_error == pytest.approx((1 - 0.01) * old_error, rel=1e-13, abs=1e-15)


def test_clip_keeps_strengths_inside_unit_box(rng):
    net = fresh_net(5)
    sl = net.processing_slice
    for _ in range(500):
        net.activation[sl] = rng.uniform(-30, 30, net.n_processing)
        net.influx[sl] = rng.uniform(-3, 3, (net.n_processing, 4))
        ltm_update(net, 0.9)
        assert np.all(net.strengths[sl] <= 1.0)
        assert np.all(net.strengths[sl] >= -1.0)


def test_update_is_local_to_each_cell(rng):
    net_a = fresh_net(6)
    net_b = fresh_net(6)
    sl = net_a.processing_slice
    values = rng.uniform(-1, 1, net_a.n_processing)
    influx = rng.uniform(-1, 1, (net_a.n_processing, 4))
    for net in (net_a, net_b):
        net.activation[sl] = values
        net.influx[sl] = influx
    target = net_a.processing_ids[7]
    # scrambling every other cell's state must not affect the target's update
    for cid in net_b.processing_ids:
        if cid != target:
            net_b.activation[cid] = rng.uniform(-5, 5)
            net_b.influx[cid] = rng.uniform(-5, 5, 4)
            net_b.expectation[cid] = rng.uniform(-5, 5)
            net_b.strengths[cid] = rng.uniform(-1, 1, 4)
    ltm_update(net_a)
    ltm_update(net_b)
    assert net_a.expectation[target] == net_b.expectation[target]
    assert np.array_equal(net_a.strengths[target], net_b.strengths[target])


def test_locked_network_is_bit_identical_after_update(rng):
    net = fresh_net(7)
    sl = net.processing_slice
    net.activation[sl] = rng.uniform(-1, 1, net.n_processing)
    net.influx[sl] = rng.uniform(-1, 1, (net.n_processing, 4))
    net.engage_lock()
    before = net.state_digest()
    ltm_update(net)
    assert net.state_digest() == before


def test_inputs_and_outputs_never_updated(rng):
    net = fresh_net(8)
    net.activation[:] = rng.uniform(-1, 1, net.n_cells)
    net.influx[:] = rng.uniform(-1, 1, (net.n_cells, 4))
    fixed_ids = list(net.input_ids) + list(net.output_ids)
    before_s = net.strengths[fixed_ids].copy()
    before_e = net.expectation[fixed_ids].copy()
    ltm_update(net)
    assert np.array_equal(net.strengths[fixed_ids], before_s)
    assert np.array_equal(net.expectation[fixed_ids], before_e)


def test_direction_proportions_are_signed_shares(rng):
    # when the guard passes, |shares| sum to 1 and the signed sum is in [-1, 1]
    for _ in range(50):
        influx = rng.uniform(-1, 1, 4)
        total = np.abs(influx).sum()
        if total <= INFLUX_GUARD:
            continue
        shares = influx / total
        assert np.abs(shares).sum() == pytest.approx(1.0, rel=1e-12)
        assert -1.0 - 1e-12 <= shares.sum() <= 1.0 + 1e-12
