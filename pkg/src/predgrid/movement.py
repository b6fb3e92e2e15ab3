"""Desire-driven cell migration at macro-episode boundaries.

A processing cell's desire to move is its long-term average prediction error
|mean(V) - E|. Movers pick an axis weighted by the magnitude of their average
directional influx, then step one cell away from that side if over-activated
or toward it if under-activated. Blocked moves (out of bounds, or the target
is occupied, counting moves already made this phase) are skipped without
retry. The accumulators are zeroed at the end of the phase on every path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Coord, DIRECTION_NAMES, DIRECTION_VECTORS, NetworkState


@dataclass(frozen=True)
class MovementCandidate:
    cell_id: int
    desire: float
    mean_activation: float
    mean_influx: np.ndarray  # (4,) average directional influx


@dataclass(frozen=True)
class MovementEvent:
    """One attempted move, for logging and snapshot arrows."""

    cell_id: int
    origin: Coord
    target: Coord
    desire: float
    direction: str
    blocked: bool


def compute_movement_candidates(net: NetworkState, n_steps: int,
                                rng: np.random.Generator,
                                *, desire_threshold: float = 0.1,
                                random_move_prob: float = 0.025,
                                ) -> list[MovementCandidate]:
    """Movement candidates sorted by desire descending (ties: lowest id).

    A cell is included if its desire clears the threshold, or else by an
    independent uniform draw (one per below-threshold cell, consumed in id
    order; cells at or above the threshold consume no draw).
    """
    if n_steps <= 0:
        return []
    out = []
    for cid in net.processing_ids:
        mean_act = float(net.activation_acc[cid]) / n_steps
        desire = abs(mean_act - float(net.expectation[cid]))
        if desire >= desire_threshold or rng.random() < random_move_prob:
            out.append(MovementCandidate(
                cell_id=cid,
                desire=desire,
                mean_activation=mean_act,
                mean_influx=net.influx_acc[cid] / n_steps,
            ))
    out.sort(key=lambda c: (-c.desire, c.cell_id))
    return out


def _pick_direction(rng: np.random.Generator, mean_influx: np.ndarray,
                    explore_prob: float) -> int:
    """Axis choice: explore uniformly with explore_prob, else influx-weighted.

    Zero total influx also falls back to a uniform direction. Draw order per
    candidate: one uniform for the explore check, then exactly one more draw
    for the direction itself.
    """
    if rng.random() < explore_prob:
        return int(rng.integers(0, 4))
    magnitudes = np.abs(mean_influx)
    total = float(magnitudes.sum())
    if total <= 0.0:
        return int(rng.integers(0, 4))
    cumulative = np.cumsum(magnitudes / total)
    idx = int(np.searchsorted(cumulative, rng.random(), side="right"))
    return min(idx, 3)


def execute_movement_phase(net: NetworkState, n_steps: int,
                           rng: np.random.Generator,
                           *, desire_threshold: float = 0.1,
                           random_move_prob: float = 0.025,
                           explore_prob: float = 0.05,
                           events: list[MovementEvent] | None = None) -> int:
    """Run one movement phase; returns the number of cells that moved.

    Locked networks and empty macro-episodes (n_steps == 0) move nothing.
    Candidates act in desire order; each sees the occupancy left by earlier
    movers. The accumulators are reset on every path.
    """
    moves = 0
    if not net.locked and n_steps > 0:
        candidates = compute_movement_candidates(
            net, n_steps, rng,
            desire_threshold=desire_threshold,
            random_move_prob=random_move_prob,
        )
        for cand in candidates:
            direction = _pick_direction(rng, cand.mean_influx, explore_prob)
            step = DIRECTION_VECTORS[direction]
            # Over-activated: move away from the signal source; otherwise toward.
            sign = -1 if cand.mean_activation > float(net.expectation[cand.cell_id]) else 1
            origin = Coord(int(net.pos[cand.cell_id, 0]), int(net.pos[cand.cell_id, 1]))
            target = Coord(origin.x + sign * step[0], origin.y + sign * step[1])
            blocked = not net.in_bounds(target) or target in net.occupancy
            if not blocked:
                net.move_cell(cand.cell_id, target)
                moves += 1
            if events is not None:
                events.append(MovementEvent(
                    cell_id=cand.cell_id, origin=origin, target=target,
                    desire=cand.desire, direction=DIRECTION_NAMES[direction],
                    blocked=blocked,
                ))
    sl = net.processing_slice
    net.influx_acc[sl] = 0.0
    net.activation_acc[sl] = 0.0
    return moves
