"""Local prediction-error update of the learned per-cell parameters.

After every wave each processing cell compares its total activation V to its
expectation E and nudges both E and its directional strengths toward the
observed pattern. The update reads only the cell's own state; no global error
signal exists. Strengths are clipped to [-1, 1]; the expectation is not
clipped (its boundedness is monitored by tests instead).
"""

from __future__ import annotations

import numpy as np

from .grid import NetworkState

# Below this total absolute influx the directional proportions are undefined
# and the strengths update is skipped (the expectation still moves).
INFLUX_GUARD = 1e-6


def ltm_update(net: NetworkState, learning_rate: float = 0.02) -> None:
    """One prediction-error step on all processing cells. No-op when locked.

    For each processing cell: error = V - E, then E += (lr/2) * error, then
    each strength component gains (lr/2) * error * its signed share of the
    absolute influx. Input and output cells are never touched.
    """
    if net.locked:
        return
    sl = net.processing_slice
    half = learning_rate / 2.0

    error = net.activation[sl] - net.expectation[sl]
    net.expectation[sl] += half * error

    influx = net.influx[sl]
    total = np.abs(influx).sum(axis=1)
    update = total > INFLUX_GUARD
    if not update.any():
        return
    proportions = influx[update] / total[update, None]
    strengths = net.strengths[sl]
    stepped = strengths[update] + half * error[update, None] * proportions
    np.clip(stepped, -1.0, 1.0, out=stepped)
    strengths[update] = stepped
