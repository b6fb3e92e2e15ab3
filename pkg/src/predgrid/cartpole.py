"""Self-contained cart-pole physics with the standard constants.

Matches the reference implementation of the classic benchmark: Euler
integration at 0.02 s, force +/-10 N, termination at |x| > 2.4 m or
|theta| > 12 degrees, success at 500 steps. States are pure values;
``step`` returns a new state and refuses to advance a terminated one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# Observation normalization bounds, in input-cell order:
# (position, velocity, angle, angular velocity).
POSITION_BOUND = 2.4
VELOCITY_BOUND = 4.0
ANGLE_BOUND = 0.209
ANGULAR_VELOCITY_BOUND = 4.0


@dataclass(frozen=True)
class EnvParams:
    """Physics constants; fixed for all experiments."""

    gravity: float = 9.8
    cart_mass: float = 1.0
    pole_mass: float = 0.1
    half_length: float = 0.5  # half the pole length
    force_mag: float = 10.0
    tau: float = 0.02  # integration timestep, Euler
    x_threshold: float = 2.4
    theta_threshold: float = 12 * 2 * math.pi / 360  # ~0.2095 rad
    max_steps: int = 500

    @property
    def total_mass(self) -> float:
        return self.cart_mass + self.pole_mass

    @property
    def polemass_length(self) -> float:
        return self.pole_mass * self.half_length


DEFAULT_PARAMS = EnvParams()


@dataclass(frozen=True)
class EnvState:
    x: float
    x_dot: float
    theta: float
    theta_dot: float
    steps: int = 0
    terminated: bool = False


def reset(rng: np.random.Generator, params: EnvParams = DEFAULT_PARAMS) -> EnvState:
    """Fresh episode: all four components uniform in [-0.05, 0.05]."""
    x, x_dot, theta, theta_dot = rng.uniform(-0.05, 0.05, size=4)
    return EnvState(float(x), float(x_dot), float(theta), float(theta_dot))


def out_of_bounds(state: EnvState, params: EnvParams = DEFAULT_PARAMS) -> bool:
    """True when the cart or pole violated its limits (episode failure)."""
    return abs(state.x) > params.x_threshold or abs(state.theta) > params.theta_threshold


def _accelerations(state: EnvState, force: float,
                   params: EnvParams) -> tuple[float, float]:
    cos_t = math.cos(state.theta)
    sin_t = math.sin(state.theta)
    temp = (force + params.polemass_length * state.theta_dot ** 2 * sin_t) / params.total_mass
    theta_acc = (params.gravity * sin_t - cos_t * temp) / (
        params.half_length * (4.0 / 3.0 - params.pole_mass * cos_t ** 2 / params.total_mass)
    )
    x_acc = temp - params.polemass_length * theta_acc * cos_t / params.total_mass
    return x_acc, theta_acc


def _advance(state: EnvState, force: float, params: EnvParams) -> EnvState:
    x_acc, theta_acc = _accelerations(state, force, params)
    tau = params.tau
    x = state.x + tau * state.x_dot
    x_dot = state.x_dot + tau * x_acc
    theta = state.theta + tau * state.theta_dot
    theta_dot = state.theta_dot + tau * theta_acc
    steps = state.steps + 1
    nxt = EnvState(x, x_dot, theta, theta_dot, steps=steps)
    terminated = out_of_bounds(nxt, params) or steps >= params.max_steps
    return replace(nxt, terminated=terminated)


def step(state: EnvState, action: int, params: EnvParams = DEFAULT_PARAMS) -> EnvState:
    """Advance one timestep. action 1 pushes right, 0 pushes left."""
    if state.terminated:
        raise RuntimeError("cannot step a terminated episode")
    if action not in (0, 1):
        raise ValueError(f"action must be 0 or 1, got {action!r}")
    force = params.force_mag if action == 1 else -params.force_mag
    return _advance(state, force, params)


def normalize(state: EnvState) -> np.ndarray:
    """Map the state onto [-1, 1]^4 using the standard bounds, clipped."""
    raw = np.array([
        state.x / POSITION_BOUND,
        state.x_dot / VELOCITY_BOUND,
        state.theta / ANGLE_BOUND,
        state.theta_dot / ANGULAR_VELOCITY_BOUND,
    ])
    return np.clip(raw, -1.0, 1.0)


def denormalize(values) -> EnvState:
    """Inverse of normalize for in-bound states (no clipping involved)."""
    x, x_dot, theta, theta_dot = values
    return EnvState(
        float(x) * POSITION_BOUND,
        float(x_dot) * VELOCITY_BOUND,
        float(theta) * ANGLE_BOUND,
        float(theta_dot) * ANGULAR_VELOCITY_BOUND,
    )
