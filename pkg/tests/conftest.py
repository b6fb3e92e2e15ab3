from __future__ import annotations

import numpy as np
import pytest

from predgrid.config import SimConfig
from predgrid.grid import Coord, NetworkState, init_network


def small_config(width=5, height=5, n_processing=3,
                 input_coords=((0, 1),), output_coords=((4, 1), (4, 3))):
    return SimConfig(grid_width=width, grid_height=height,
                     n_processing=n_processing,
                     input_coords=input_coords, output_coords=output_coords)


def manual_net(cfg: SimConfig, processing_positions) -> NetworkState:
    """Network with hand-picked processing positions and zeroed parameters."""
    assert len(processing_positions) == cfg.n_processing
    net = NetworkState(cfg)
    for cid, (x, y) in zip(net.input_ids, cfg.input_coords):
        net.place_cell(cid, Coord(x, y))
    for cid, (x, y) in zip(net.output_ids, cfg.output_coords):
        net.place_cell(cid, Coord(x, y))
    for cid, pos in zip(net.processing_ids, processing_positions):
        net.place_cell(cid, Coord(*pos))
    return net


def random_small_network(rng, max_side=6, max_cells=6):
    """A random small network for oracle-equivalence style tests."""
    width = int(rng.integers(3, max_side + 1))
    height = int(rng.integers(3, max_side + 1))
    n_input = int(rng.integers(1, 3))
    n_output = 2
    n_processing = int(rng.integers(1, max_cells - n_input - n_output + 1))
    coords = [(x, y) for x in range(width) for y in range(height)]
    picks = rng.choice(len(coords), size=n_input + n_output, replace=False)
    cfg = SimConfig(
        grid_width=width, grid_height=height, n_processing=n_processing,
        input_coords=tuple(coords[i] for i in picks[:n_input]),
        output_coords=tuple(coords[i] for i in picks[n_input:]),
    )
    return init_network(cfg, rng)


class FakeRng:
    """Scripted stand-in for a Generator; pops pre-set draws in order."""

    def __init__(self, randoms=(), integers=()):
        self._randoms = list(randoms)
        self._integers = list(integers)
        self.random_calls = 0
        self.integer_calls = 0

    def random(self):
        self.random_calls += 1
        return self._randoms.pop(0)

    def integers(self, low, high=None):
        self.integer_calls += 1
        return self._integers.pop(0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
