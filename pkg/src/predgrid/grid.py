"""Network state: the grid, cell populations, placement, and per-cell state.

Cells live on a rectangular grid and are stored as parallel arrays indexed by
cell id. Ids are assigned by role: input cells first (in the order their
coordinates are configured), then processing cells, then output cells. All
deterministic tie-breaks elsewhere in the system ("lowest id first") refer to
this assignment.

Directional quantities are 4-vectors ordered [up, right, down, left]. The
coordinate convention is x rightward, y downward, so "up" is -y.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple

import numpy as np

from .config import SimConfig

# [up, right, down, left] unit steps under the y-down convention.
DIRECTION_NAMES = ("up", "right", "down", "left")
DIRECTION_VECTORS = ((0, -1), (1, 0), (0, 1), (-1, 0))

# Sending strengths for cells that have no learned strengths (inputs, outputs,
# punishment epicenters).
UNIFORM_STRENGTHS = (0.25, 0.25, 0.25, 0.25)

SCHEMA_VERSION = 1


class Coord(NamedTuple):
    x: int
    y: int


class CellKind(str, Enum):
    INPUT = "input"
    PROCESSING = "processing"
    OUTPUT = "output"


@dataclass(frozen=True)
class Cell:
    """Read-only view of one cell, materialized from the state arrays."""

    id: int
    kind: CellKind
    pos: Coord
    strengths: np.ndarray
    expectation: float


class InitError(ValueError):
    """Raised when a network cannot be built from the given configuration."""


class NetworkState:
    """All mutable state of one grid network.

    Per-cell state is held in arrays indexed by cell id:

    - ``strengths`` (n, 4) and ``expectation`` (n,): the learned parameters.
      Inputs and outputs carry the fixed uniform 0.25 strengths and a zero
      expectation; neither is ever updated.
    - ``influx`` (n, 4) and ``activation`` (n,): per-wave immediate state.
    - ``influx_acc`` (n, 4) and ``activation_acc`` (n,): accumulators that
      drive the movement phase, summed over a macro-episode.

    ``locked`` can only transition False -> True (via :meth:`engage_lock`).
    """

    def __init__(self, config: SimConfig):
        self.config = config
        self.width = config.grid_width
        self.height = config.grid_height
        self.n_input = len(config.input_coords)
        self.n_processing = config.n_processing
        self.n_output = len(config.output_coords)
        n = self.n_input + self.n_processing + self.n_output
        self.n_cells = n

        self.pos = np.zeros((n, 2), dtype=np.int64)
        self.strengths = np.zeros((n, 4), dtype=np.float64)
        self.expectation = np.zeros(n, dtype=np.float64)
        self.influx = np.zeros((n, 4), dtype=np.float64)
        self.activation = np.zeros(n, dtype=np.float64)
        self.influx_acc = np.zeros((n, 4), dtype=np.float64)
        self.activation_acc = np.zeros(n, dtype=np.float64)

        self.strengths[self.input_ids] = UNIFORM_STRENGTHS
        self.strengths[self.output_ids] = UNIFORM_STRENGTHS

        # True for cells that receive during a wave (processing + output).
        self.is_receiver = np.zeros(n, dtype=bool)
        self.is_receiver[self.n_input:] = True

        self.occupancy: dict[Coord, int] = {}
        self._locked = False
        # Wave geometry cache, owned by the propagation module. Bumping the
        # version invalidates it.
        self.geometry_cache: object | None = None
        self.geometry_version = 0

    # -- id layout ---------------------------------------------------------

    @property
    def input_ids(self) -> range:
        return range(0, self.n_input)

    @property
    def processing_ids(self) -> range:
        return range(self.n_input, self.n_input + self.n_processing)

    @property
    def output_ids(self) -> range:
        return range(self.n_input + self.n_processing, self.n_cells)

    @property
    def processing_slice(self) -> slice:
        return slice(self.n_input, self.n_input + self.n_processing)

    def kind_of(self, cell_id: int) -> CellKind:
        if cell_id < self.n_input:
            return CellKind.INPUT
        if cell_id < self.n_input + self.n_processing:
            return CellKind.PROCESSING
        return CellKind.OUTPUT

    # -- lock --------------------------------------------------------------

    @property
    def locked(self) -> bool:
        return self._locked

    def engage_lock(self) -> None:
        """Permanently disable all plasticity. There is no unlock."""
        self._locked = True

    # -- cells and occupancy -----------------------------------------------

    def cell(self, cell_id: int) -> Cell:
        return Cell(
            id=cell_id,
            kind=self.kind_of(cell_id),
            pos=Coord(int(self.pos[cell_id, 0]), int(self.pos[cell_id, 1])),
            strengths=self.strengths[cell_id].copy(),
            expectation=float(self.expectation[cell_id]),
        )

    def cells(self) -> Iterator[Cell]:
        for cid in range(self.n_cells):
            yield self.cell(cid)

    def place_cell(self, cell_id: int, pos: Coord) -> None:
        """Put a cell on a free in-bounds coordinate (initialization path)."""
        pos = Coord(int(pos[0]), int(pos[1]))
        if not self.in_bounds(pos):
            raise InitError(f"coordinate {pos} is outside the {self.width}x{self.height} grid")
        if pos in self.occupancy:
            raise InitError(f"coordinate {pos} already occupied")
        self.occupancy[pos] = cell_id
        self.pos[cell_id] = pos
        self.geometry_version += 1

    def move_cell(self, cell_id: int, new_pos: Coord) -> None:
        """Relocate a cell to a free in-bounds coordinate. Caller validates."""
        old = Coord(int(self.pos[cell_id, 0]), int(self.pos[cell_id, 1]))
        new_pos = Coord(int(new_pos[0]), int(new_pos[1]))
        del self.occupancy[old]
        self.occupancy[new_pos] = cell_id
        self.pos[cell_id] = new_pos
        self.geometry_version += 1

    def in_bounds(self, pos: tuple[int, int]) -> bool:
        return 0 <= pos[0] < self.width and 0 <= pos[1] < self.height

    # -- digests and serialization ------------------------------------------

    def state_digest(self) -> str:
        """SHA-256 over all mutable state; equal digests mean equal states."""
        h = hashlib.sha256()
        for arr in (self.pos, self.strengths, self.expectation,
                    self.influx, self.activation,
                    self.influx_acc, self.activation_acc):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(b"L" if self._locked else b"u")
        return h.hexdigest()

    def ltm_digest(self) -> str:
        """Digest of the learned parameters and positions only."""
        h = hashlib.sha256()
        for arr in (self.pos, self.strengths, self.expectation):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(b"L" if self._locked else b"u")
        return h.hexdigest()

    def persistent_digest(self) -> str:
        """Digest of everything that survives between waves.

        Excludes the per-wave scratch (activation, influx), which every wave
        overwrites even on a locked network.
        """
        h = hashlib.sha256()
        for arr in (self.pos, self.strengths, self.expectation,
                    self.influx_acc, self.activation_acc):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(b"L" if self._locked else b"u")
        return h.hexdigest()

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "grid": {"width": self.width, "height": self.height},
            "locked": self._locked,
            "cells": [
                {
                    "id": c.id,
                    "kind": c.kind.value,
                    "pos": [c.pos.x, c.pos.y],
                    "strengths": [float(s) for s in c.strengths],
                    "expectation": c.expectation,
                }
                for c in self.cells()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "NetworkState":
        cells = sorted(doc["cells"], key=lambda c: c["id"])
        kinds = [c["kind"] for c in cells]
        input_coords = tuple(tuple(c["pos"]) for c in cells if c["kind"] == "input")
        output_coords = tuple(tuple(c["pos"]) for c in cells if c["kind"] == "output")
        config = SimConfig(
            grid_width=doc["grid"]["width"],
            grid_height=doc["grid"]["height"],
            n_processing=kinds.count("processing"),
            input_coords=input_coords,
            output_coords=output_coords,
        )
        net = cls(config)
        for c in cells:
            net.place_cell(c["id"], Coord(*c["pos"]))
            net.strengths[c["id"]] = c["strengths"]
            net.expectation[c["id"]] = c["expectation"]
        if doc["locked"]:
            net.engage_lock()
        check_occupancy(net)
        return net


def init_network(config: SimConfig, rng: np.random.Generator) -> NetworkState:
    """Build a fresh network.

    Draw order (pinned for reproducibility): first the processing-cell
    placement (one ``choice`` without replacement over the free coordinates,
    sorted by (x, y)), then the strengths matrix, then the expectation vector.
    """
    net = NetworkState(config)
    for cid, (x, y) in zip(net.input_ids, config.input_coords):
        net.place_cell(cid, Coord(x, y))
    for cid, (x, y) in zip(net.output_ids, config.output_coords):
        net.place_cell(cid, Coord(x, y))

    free = sorted(
        Coord(x, y)
        for x in range(config.grid_width)
        for y in range(config.grid_height)
        if Coord(x, y) not in net.occupancy
    )
    if config.n_processing > len(free):
        raise InitError(
            f"cannot place {config.n_processing} processing cells on "
            f"{len(free)} free coordinates"
        )
    picks = rng.choice(len(free), size=config.n_processing, replace=False)
    for cid, idx in zip(net.processing_ids, picks):
        net.place_cell(cid, free[int(idx)])

    sl = net.processing_slice
    net.strengths[sl] = rng.uniform(-1.0, 1.0, size=(config.n_processing, 4))
    net.expectation[sl] = rng.uniform(-1.0, 1.0, size=config.n_processing)
    return net


def reset_immediate_state(net: NetworkState) -> None:
    """Zero the per-wave state of all processing and output cells.

    Input activations are left alone; they are overwritten when the next
    action wave is seeded. Accumulated (macro-episode) state is untouched.
    """
    sl = slice(net.n_input, net.n_cells)
    net.activation[sl] = 0.0
    net.influx[sl] = 0.0


def check_occupancy(net: NetworkState) -> None:
    """Assert the occupancy index matches cell positions exactly."""
    if len(net.occupancy) != net.n_cells:
        raise AssertionError(
            f"occupancy holds {len(net.occupancy)} coords for {net.n_cells} cells"
        )
    for coord, cid in net.occupancy.items():
        if tuple(net.pos[cid]) != tuple(coord):
            raise AssertionError(f"cell {cid} at {tuple(net.pos[cid])} indexed at {coord}")
        if not net.in_bounds(coord):
            raise AssertionError(f"cell {cid} out of bounds at {coord}")
