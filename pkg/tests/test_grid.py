from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from predgrid.config import SimConfig
from predgrid.grid import (Coord, InitError, NetworkState, check_occupancy,
                           init_network, reset_immediate_state)

from conftest import small_config


def default_net(seed=42):
    return init_network(SimConfig(), np.random.default_rng(seed))


def assert_networks_equal(a: NetworkState, b: NetworkState):
    assert np.array_equal(a.pos, b.pos)
    assert np.array_equal(a.strengths, b.strengths)
    assert np.array_equal(a.expectation, b.expectation)
    assert a.occupancy == b.occupancy
    assert a.locked == b.locked


def test_same_seed_gives_bit_identical_networks():
    assert_networks_equal(default_net(42), default_net(42))
    assert default_net(42).state_digest() == default_net(42).state_digest()


def test_different_seeds_differ():
    assert default_net(1).state_digest() != default_net(2).state_digest()


def test_standard_layout_counts_and_fixed_coords():
    net = default_net()
    assert net.n_cells == 36
    assert len(net.occupancy) == 36
    assert [tuple(net.pos[i]) for i in net.input_ids] == [(0, 1), (0, 3), (0, 5), (0, 7)]
    assert [tuple(net.pos[i]) for i in net.output_ids] == [(8, 2), (8, 6)]
    check_occupancy(net)


def test_all_coordinates_distinct():
    for seed in range(20):
        net = default_net(seed)
        coords = {tuple(p) for p in net.pos}
        assert len(coords) == net.n_cells


def test_initial_parameters_in_range():
    net = default_net(7)
    sl = net.processing_slice
    assert np.all(net.strengths[sl] >= -1.0) and np.all(net.strengths[sl] <= 1.0)
    assert np.all(net.expectation[sl] >= -1.0) and np.all(net.expectation[sl] <= 1.0)
    # fixed senders keep the uniform strengths
    for cid in list(net.input_ids) + list(net.output_ids):
        assert np.array_equal(net.strengths[cid], [0.25, 0.25, 0.25, 0.25])
    assert not net.locked
    assert not net.activation.any()
    assert not net.influx.any()
    assert not net.activation_acc.any()
    assert not net.influx_acc.any()


def test_too_many_cells_raises():
    cfg = small_config(width=3, height=3, n_processing=7,
                       output_coords=((2, 0), (2, 2)))  # 9 - 3 fixed = 6 free
    with pytest.raises(InitError):
        init_network(cfg, np.random.default_rng(0))


def test_out_of_bounds_fixed_coordinate_raises():
    cfg = small_config(width=3, height=3, n_processing=2)  # outputs at x=4
    with pytest.raises(InitError):
        init_network(cfg, np.random.default_rng(0))


def test_reset_immediate_state_zeroes_and_is_idempotent(rng):
    net = default_net()
    net.activation[:] = rng.uniform(-1, 1, net.n_cells)
    net.influx[:] = rng.uniform(-1, 1, (net.n_cells, 4))
    net.activation_acc[:] = 3.0
    net.influx_acc[:] = -2.0
    saved_acc = net.activation_acc.copy()
    saved_inf = net.influx_acc.copy()

    reset_immediate_state(net)
    first = net.state_digest()
    sl = slice(net.n_input, net.n_cells)
    assert not net.activation[sl].any()
    assert not net.influx[sl].any()
    # accumulators are untouched by the per-wave reset
    assert np.array_equal(net.activation_acc, saved_acc)
    assert np.array_equal(net.influx_acc, saved_inf)

    reset_immediate_state(net)
    assert net.state_digest() == first


def test_lock_is_one_way():
    net = default_net()
    assert not net.locked
    net.engage_lock()
    assert net.locked
    with pytest.raises(AttributeError):
        net.locked = False  # type: ignore[misc]


def test_json_round_trip_preserves_parameters(tmp_path: Path):
    net = default_net(3)
    net.engage_lock()
    doc = net.to_json_dict()
    clone = NetworkState.from_json_dict(json.loads(json.dumps(doc)))
    assert_networks_equal(net, clone)


def test_json_document_matches_schema():
    import jsonschema

    schema = json.loads(
        (Path(__file__).resolve().parent.parent / "schemas"
         / "network_state.schema.json").read_text())
    jsonschema.validate(default_net(5).to_json_dict(), schema)


def test_json_cells_carry_expected_fields():
    doc = default_net().to_json_dict()
    assert doc["grid"] == {"width": 9, "height": 9}
    assert doc["locked"] is False
    assert len(doc["cells"]) == 36
    kinds = [c["kind"] for c in doc["cells"]]
    assert kinds.count("input") == 4
    assert kinds.count("processing") == 30
    assert kinds.count("output") == 2
    for cell in doc["cells"]:
        assert set(cell) == {"id", "kind", "pos", "strengths", "expectation"}
