"""Winner-takes-all signal propagation.

One wave runs per environment timestep. Seeds (input cells, or virtual
punishment epicenters) send first, together; afterwards the unactivated cell
with the largest absolute activation is activated and sends, one cell per
round, until every processing and output cell has been activated. Each sender
sends exactly once.

A contribution from sender s to receiver r at Manhattan distance d <= 2 is

    dV = tanh(V_s) * decay(d) * dot(strengths_s, angular_weights(theta))

with theta the s->r angle under the y-down convention. The receiver adds dV
to its total activation and dV * receiver_direction_weights(theta) to its
directional influx, which records the side the signal arrived from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .grid import Coord, NetworkState, UNIFORM_STRENGTHS

_DECAY_TABLE = (1.0, 0.75, 0.25)


def distance_decay(d: int) -> float:
    """Transmission factor at Manhattan distance d: 1.0, 0.75, 0.25, then 0."""
    if d < 0:
        raise ValueError("distance must be >= 0")
    return _DECAY_TABLE[d] if d < 3 else 0.0


def angular_weights(theta) -> np.ndarray:
    """Nonnegative [up, right, down, left] weights of the direction theta.

    theta is the sender->receiver angle, atan2(dy, dx) with y downward:
    [max(0, -sin), max(0, cos), max(0, sin), max(0, -cos)]. Accepts scalars
    or arrays; the direction axis is appended last.
    """
    theta = np.asarray(theta, dtype=np.float64)
    s = np.sin(theta)
    c = np.cos(theta)
    zero = np.zeros_like(s)
    return np.stack(
        [np.maximum(zero, -s), np.maximum(zero, c),
         np.maximum(zero, s), np.maximum(zero, -c)],
        axis=-1,
    )


def sender_gain(strengths: np.ndarray, theta: float) -> float:
    """Dot product of a sender's strengths with the angular weights."""
    return float(np.dot(np.asarray(strengths, dtype=np.float64), angular_weights(theta)))


_SWAP = (2, 3, 0, 1)  # up<->down, right<->left


def receiver_direction_weights(theta) -> np.ndarray:
    """Weights of the direction a signal arrived FROM, in the receiver frame.

    Equals angular_weights(theta + pi), computed as the exact up/down and
    left/right swap of angular_weights(theta) so axis cases stay exact.
    """
    return angular_weights(theta)[..., _SWAP]


@dataclass(frozen=True)
class WaveSeed:
    """One wave source: an input cell's drive, or a virtual epicenter.

    ``uses_cell_slot`` seeds write their value into the cell occupying
    ``position``; virtual seeds (punishment epicenters) sit at any coordinate,
    occupied or not, and send with the fixed uniform strengths.
    """

    position: Coord
    value: float
    uses_cell_slot: bool = True


class TraceStep(NamedTuple):
    """One sender->receiver contribution; sender -1-k means virtual seed k."""

    sender: int
    receiver: int
    delta: float
    theta: float
    distance: int


@dataclass
class WaveResult:
    """Final per-cell activations of one wave plus the chosen action."""

    activation: np.ndarray          # (n,) final V per cell id
    influx: np.ndarray              # (n, 4) final directional influx
    activation_order: list[int]     # receiver ids in activation order
    output_activation: np.ndarray   # (n_output,) V of the output cells
    action: int | None              # None for punishment waves
    trace: list[TraceStep] | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "activation": [float(x) for x in self.activation],
            "influx": [[float(x) for x in row] for row in self.influx],
            "activation_order": list(self.activation_order),
            "output_activation": [float(x) for x in self.output_activation],
            "action": self.action,
        }
        if self.trace is not None:
            doc["trace"] = [list(step) for step in self.trace]
        return doc


class _Geometry:
    """Pairwise wave geometry for the current cell positions.

    decay[s, r] is zero on the diagonal (a cell never sends to itself) and
    beyond Manhattan distance 2.
    """

    __slots__ = ("decay", "w_ang", "w_dir", "theta", "dist")

    def __init__(self, pos: np.ndarray):
        dx = pos[None, :, 0] - pos[:, None, 0]
        dy = pos[None, :, 1] - pos[:, None, 1]
        self.dist = np.abs(dx) + np.abs(dy)
        self.decay = np.zeros(self.dist.shape, dtype=np.float64)
        for d, f in enumerate(_DECAY_TABLE):
            self.decay[self.dist == d] = f
        np.fill_diagonal(self.decay, 0.0)
        self.theta = np.arctan2(dy, dx)
        self.w_ang = angular_weights(self.theta)
        self.w_dir = self.w_ang[..., _SWAP]


def _geometry(net: NetworkState) -> _Geometry:
    cached = net.geometry_cache
    if cached is not None and cached[0] == net.geometry_version:
        return cached[1]
    geo = _Geometry(net.pos)
    net.geometry_cache = (net.geometry_version, geo)
    return geo


def _virtual_sender(net: NetworkState, seed: WaveSeed):
    """Decay/gain/direction rows for an epicenter at an arbitrary coordinate."""
    dx = net.pos[:, 0] - seed.position[0]
    dy = net.pos[:, 1] - seed.position[1]
    dist = np.abs(dx) + np.abs(dy)
    decay = np.zeros(net.n_cells, dtype=np.float64)
    for d, f in enumerate(_DECAY_TABLE):
        decay[dist == d] = f
    theta = np.arctan2(dy, dx)
    w_ang = angular_weights(theta)
    gain = decay * (w_ang @ np.asarray(UNIFORM_STRENGTHS))
    return gain, w_ang[..., _SWAP], theta, dist


def input_wave_seeds(net: NetworkState, values: Sequence[float]) -> list[WaveSeed]:
    """Seeds for an action wave: one per input cell, in input order."""
    if len(values) != net.n_input:
        raise ValueError(f"expected {net.n_input} input values, got {len(values)}")
    return [
        WaveSeed(Coord(int(net.pos[cid, 0]), int(net.pos[cid, 1])), float(val))
        for cid, val in zip(net.input_ids, values)
    ]


def propagate_wave(net: NetworkState, seeds: Sequence[WaveSeed], *,
                   choose_action: bool = True,
                   record_trace: bool = False) -> WaveResult:
    """Run one full wave. Immediate state must already be reset.

    Cells with zero activation still take their turn in the winner-takes-all
    order (ties broken by lowest id) but send nothing.
    """
    if not seeds:
        raise ValueError("a wave needs at least one seed")
    geo = _geometry(net)
    gain = np.einsum("srk,sk->sr", geo.w_ang, net.strengths)
    gain *= geo.decay

    V = net.activation
    influx = net.influx
    unactivated = net.is_receiver.copy()
    order: list[int] = []
    trace: list[TraceStep] | None = [] if record_trace else None

    # (sender id or -1-k for virtual seed k, value, gain row, direction rows)
    pending = []
    for k, seed in enumerate(seeds):
        if seed.uses_cell_slot:
            cid = net.occupancy[Coord(int(seed.position[0]), int(seed.position[1]))]
            V[cid] = seed.value
            pending.append((cid, seed.value, gain[cid], geo.w_dir[cid],
                            geo.theta[cid], geo.dist[cid]))
        else:
            g_row, wdir, theta, dist = _virtual_sender(net, seed)
            pending.append((-1 - k, seed.value, g_row, wdir, theta, dist))

    n_rounds = int(unactivated.sum())
    for _ in range(n_rounds):
        for sid, value, g_row, wdir, theta, dist in pending:
            if value == 0.0:
                continue
            contrib = math.tanh(value) * g_row * unactivated
            V += contrib
            influx += contrib[:, None] * wdir
            if trace is not None:
                for rid in np.nonzero((dist <= 2) & unactivated)[0]:
                    trace.append(TraceStep(sid, int(rid), float(contrib[rid]),
                                           float(theta[rid]), int(dist[rid])))
        nxt = int(np.argmax(np.where(unactivated, np.abs(V), -1.0)))
        unactivated[nxt] = False
        order.append(nxt)
        pending = [(nxt, float(V[nxt]), gain[nxt], geo.w_dir[nxt],
                    geo.theta[nxt], geo.dist[nxt])]

    out_ids = net.output_ids
    result = WaveResult(
        activation=V.copy(),
        influx=influx.copy(),
        activation_order=order,
        output_activation=V[out_ids.start:out_ids.stop].copy(),
        action=None,
        trace=trace,
    )
    if choose_action and net.n_output == 2:
        result.action = select_action(result)
    return result


def select_action(wave: WaveResult) -> int:
    """0 if the first output's activation strictly exceeds the second's, else 1."""
    if len(wave.output_activation) != 2:
        raise ValueError("action selection needs exactly two output cells")
    return 0 if wave.output_activation[0] > wave.output_activation[1] else 1


def accumulate_stm(net: NetworkState, wave: WaveResult) -> None:
    """Add the wave's activations into the macro-episode accumulators.

    No-op while the network is locked. Only processing cells accumulate.
    """
    if net.locked:
        return
    sl = net.processing_slice
    net.influx_acc[sl] += wave.influx[sl]
    net.activation_acc[sl] += wave.activation[sl]
