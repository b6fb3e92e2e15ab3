"""Surprise injection: random epicenters that drive an extra wave and update.

Two triggers exist. Catastrophic punishment fires on episode failure and
places a fixed number of epicenters (default 10) at uniformly random grid
coordinates, occupied or not, each emitting a uniform value in [-1, 1].
Probabilistic punishment fires during non-terminal steps at high pole angles
with a chance that scales linearly from 1% at 4 degrees to 10% at 12 degrees,
placing a uniform 1-30% fraction of the epicenter budget (rounded up).

Either way the epicenters seed a normal wave (no action, no accumulation into
the movement-phase state) whose activations feed one plasticity update. A
locked network suppresses punishment entirely, before any random draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SimConfig
from .grid import Coord, NetworkState, reset_immediate_state
from .plasticity import ltm_update
from .propagation import WaveResult, WaveSeed, propagate_wave

CATASTROPHIC = "catastrophic"
PROBABILISTIC = "probabilistic"


@dataclass(frozen=True)
class PunishmentEvent:
    epicenters: tuple[tuple[Coord, float], ...]
    trigger: str  # CATASTROPHIC or PROBABILISTIC


def trigger_probability(pole_angle_deg: float, config: SimConfig) -> float:
    """Chance of a probabilistic event at the given pole angle (absolute).

    Zero outside the [min, max] degree window; linear between the endpoint
    probabilities inside it.
    """
    angle = abs(pole_angle_deg)
    lo, hi = config.punish_angle_min_deg, config.punish_angle_max_deg
    if angle < lo or angle > hi:
        return 0.0
    if hi == lo:
        return config.punish_prob_max
    frac = (angle - lo) / (hi - lo)
    return config.punish_prob_min + frac * (config.punish_prob_max - config.punish_prob_min)


def _draw_epicenters(net: NetworkState, rng: np.random.Generator,
                     count: int) -> tuple[tuple[Coord, float], ...]:
    # With replacement; landing on an occupied coordinate is fine (decay 1.0
    # covers distance zero). Draw order per epicenter: x, y, value.
    out = []
    for _ in range(count):
        x = int(rng.integers(0, net.width))
        y = int(rng.integers(0, net.height))
        value = float(rng.uniform(-1.0, 1.0))
        out.append((Coord(x, y), value))
    return tuple(out)


def punishment_wave(net: NetworkState, event: PunishmentEvent) -> WaveResult:
    """Propagate an event's epicenters as virtual seeds. No action, no STM."""
    if net.locked:
        raise RuntimeError("punishment wave on a locked network")
    reset_immediate_state(net)
    seeds = [WaveSeed(pos, value, uses_cell_slot=False)
             for pos, value in event.epicenters]
    return propagate_wave(net, seeds, choose_action=False)


def catastrophic_punishment(net: NetworkState, rng: np.random.Generator,
                            config: SimConfig) -> PunishmentEvent | None:
    """Full-strength punishment after an episode failure.

    Returns None (and consumes no randomness) when the network is locked.
    """
    if net.locked:
        return None
    event = PunishmentEvent(
        epicenters=_draw_epicenters(net, rng, config.catastrophic_epicenters),
        trigger=CATASTROPHIC,
    )
    punishment_wave(net, event)
    ltm_update(net, config.learning_rate)
    return event


def probabilistic_punishment(net: NetworkState, pole_angle_deg: float,
                             rng: np.random.Generator,
                             config: SimConfig) -> PunishmentEvent | None:
    """Maybe-punishment at high pole angles during non-terminal steps.

    Consumes one trigger draw only when the angle is inside the window, then
    (on trigger) one fraction draw and the epicenter draws. Returns the event,
    or None when nothing fired.
    """
    if net.locked:
        return None
    probability = trigger_probability(pole_angle_deg, config)
    if probability <= 0.0:
        return None
    if rng.random() >= probability:
        return None
    fraction = float(rng.uniform(config.epicenter_fraction_min,
                                 config.epicenter_fraction_max))
    count = math.ceil(config.catastrophic_epicenters * fraction)
    event = PunishmentEvent(
        epicenters=_draw_epicenters(net, rng, count),
        trigger=PROBABILISTIC,
    )
    punishment_wave(net, event)
    ltm_update(net, config.learning_rate)
    return event
