"""Experiment orchestration: episodes, training, locking, and the ablation.

Per environment timestep the order is fixed: normalize the state, reset the
immediate state, run the action wave, accumulate the wave into the movement
accumulators, step the environment, apply the plasticity update, then check
probabilistic punishment on the new state; on a failure termination the
catastrophic punishment runs last. A movement phase runs after every 4th
episode. When lock-on-success is enabled, the first 500-step episode engages
the lock and ends training.

Randomness: each agent owns a single generator seeded with a 64-bit value
derived from the master seed via a spawn key (condition index, agent index),
so agents are independent of execution order. Within an agent the stream is
consumed in a fixed order: network initialization, then per episode the
environment reset, punishment draws as they occur, and movement-phase draws.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import cartpole
from .config import Condition, ExperimentConfig, SimConfig
from .grid import NetworkState, init_network, reset_immediate_state
from .movement import MovementEvent, execute_movement_phase
from .plasticity import ltm_update
from .propagation import accumulate_stm, input_wave_seeds, propagate_wave
from .punishment import catastrophic_punishment, probabilistic_punishment


@dataclass(frozen=True)
class RunRecord:
    """One episode's log row."""

    agent_seed: int
    episode: int
    steps: int
    locked: bool  # lock state at episode start
    punish_events: int
    moves: int  # movement-phase moves after this episode (0 off-cadence)


@dataclass
class AgentResult:
    condition: Condition
    agent_index: int
    agent_seed: int
    records: list[RunRecord]
    episodes_to_success: int | None
    locked: bool
    locked_success_rate: float | None
    network: NetworkState
    last_moves: list[MovementEvent] = field(default_factory=list)


def derive_agent_seed(master_seed: int, condition_index: int, agent_index: int) -> int:
    """64-bit per-agent seed; disjoint streams independent of run order."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(condition_index, agent_index))
    return int(seq.generate_state(1, np.uint64)[0])


def run_episode(net: NetworkState, rng: np.random.Generator,
                condition: Condition, sim: SimConfig,
                params: cartpole.EnvParams = cartpole.DEFAULT_PARAMS,
                ) -> tuple[int, int, bool]:
    """One environment episode; returns (steps survived, punish events, failed)."""
    state = cartpole.reset(rng, params)
    punish_events = 0
    while not state.terminated:
        observation = cartpole.normalize(state)
        reset_immediate_state(net)
        wave = propagate_wave(net, input_wave_seeds(net, observation))
        accumulate_stm(net, wave)
        state = cartpole.step(state, wave.action, params)
        ltm_update(net, sim.learning_rate)
        if (condition is Condition.FAILURE_PLUS_PROBABILISTIC
                and not state.terminated):
            event = probabilistic_punishment(
                net, math.degrees(state.theta), rng, sim)
            if event is not None:
                punish_events += 1
    failed = cartpole.out_of_bounds(state, params)
    if failed and condition is not Condition.NO_PUNISHMENT:
        event = catastrophic_punishment(net, rng, sim)
        if event is not None:
            punish_events += 1
    return state.steps, punish_events, failed


def run_training(cfg: ExperimentConfig, agent_seed: int,
                 condition: Condition | None = None,
                 move_events: list[MovementEvent] | None = None,
                 rng: np.random.Generator | None = None,
                 ) -> tuple[NetworkState, list[RunRecord]]:
    """Train one agent; returns its network and per-episode records.

    Episodes run until the budget is exhausted or, with lock-on-success, until
    the first 500-step episode (which engages the lock). The movement phase
    runs after every macro-episode, including a locked no-op on the final one.
    """
    condition = cfg.condition if condition is None else condition
    params = replace(cartpole.DEFAULT_PARAMS, max_steps=cfg.max_steps)
    if rng is None:
        rng = np.random.default_rng(agent_seed)
    net = init_network(cfg.sim, rng)
    records: list[RunRecord] = []
    macro_steps = 0
    for episode in range(1, cfg.episodes + 1):
        locked_at_start = net.locked
        steps, punish_events, failed = run_episode(net, rng, condition, cfg.sim, params)
        macro_steps += steps
        success = steps >= cfg.max_steps and not failed
        if success and cfg.lock_on_success:
            net.engage_lock()
        moves = 0
        if episode % cfg.sim.macro_episode_len == 0:
            if move_events is not None:
                move_events.clear()
            moves = execute_movement_phase(
                net, macro_steps, rng,
                desire_threshold=cfg.sim.desire_threshold,
                random_move_prob=cfg.sim.random_move_prob,
                explore_prob=cfg.sim.explore_prob,
                events=move_events,
            )
            macro_steps = 0
        records.append(RunRecord(agent_seed, episode, steps,
                                 locked_at_start, punish_events, moves))
        if net.locked:
            break
    return net, records


def evaluate_locked(net: NetworkState, cfg: ExperimentConfig,
                    rng: np.random.Generator,
                    records: list[RunRecord] | None = None,
                    first_episode: int = 1, agent_seed: int = 0) -> float:
    """Post-lock evaluation: fraction of full-length episodes.

    The lock makes every episode side-effect free on the network; punishment
    is additionally disabled outright. Appends one record per episode when a
    list is given.
    """
    if not net.locked:
        raise RuntimeError("evaluation requires a locked network")
    if cfg.eval_episodes <= 0:
        return float("nan")
    params = replace(cartpole.DEFAULT_PARAMS, max_steps=cfg.max_steps)
    wins = 0
    for i in range(cfg.eval_episodes):
        steps, _, failed = run_episode(net, rng, Condition.NO_PUNISHMENT,
                                       cfg.sim, params)
        success = steps >= cfg.max_steps and not failed
        wins += int(success)
        if records is not None:
            records.append(RunRecord(agent_seed, first_episode + i, steps,
                                     True, 0, 0))
    return wins / cfg.eval_episodes


def run_single_agent(cfg: ExperimentConfig, condition: Condition,
                     condition_index: int, agent_index: int,
                     evaluate: bool = True) -> AgentResult:
    """Full per-agent pipeline: train, optionally lock-evaluate.

    The agent's single stream continues from training into evaluation.
    """
    agent_seed = derive_agent_seed(cfg.seed, condition_index, agent_index)
    rng = np.random.default_rng(agent_seed)
    move_events: list[MovementEvent] = []
    net, records = run_training(cfg, agent_seed, condition, move_events, rng=rng)
    episodes_to_success = None
    for rec in records:
        if rec.steps >= cfg.max_steps:
            episodes_to_success = rec.episode
            break
    rate = None
    if evaluate and net.locked and cfg.eval_episodes > 0:
        rate = evaluate_locked(net, cfg, rng, records,
                               first_episode=len(records) + 1,
                               agent_seed=agent_seed)
    return AgentResult(
        condition=condition,
        agent_index=agent_index,
        agent_seed=agent_seed,
        records=records,
        episodes_to_success=episodes_to_success,
        locked=net.locked,
        locked_success_rate=rate,
        network=net,
        last_moves=move_events,
    )


def _agent_task(args) -> AgentResult:
    return run_single_agent(*args)


def run_agents(cfg: ExperimentConfig, condition: Condition,
               condition_index: int, n_agents: int,
               evaluate: bool = True) -> list[AgentResult]:
    """Run a batch of agents, optionally across worker processes.

    Results are assembled in agent-index order regardless of scheduling, so
    output artifacts do not depend on the worker count.
    """
    tasks = [(cfg, condition, condition_index, idx, evaluate)
             for idx in range(n_agents)]
    if cfg.workers <= 1 or n_agents <= 1:
        return [_agent_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_agent_task, tasks))


def condition_summary(results: list[AgentResult]) -> dict:
    solved = [r for r in results if r.episodes_to_success is not None]
    rates = [r.locked_success_rate for r in results
             if r.locked_success_rate is not None]
    return {
        "agents": len(results),
        "solved": len(solved),
        "solve_rate": len(solved) / len(results) if results else None,
        "median_episodes_to_success": (
            float(np.median([r.episodes_to_success for r in solved]))
            if solved else None),
        "mean_locked_success_rate": (
            float(np.mean(rates)) if rates else None),
    }


def run_ablation(cfg: ExperimentConfig,
                 progress: Callable[[str], None] | None = None,
                 ) -> tuple[list[AgentResult], dict]:
    """All three punishment arms with disjoint per-agent seeds."""
    all_results: list[AgentResult] = []
    conditions = {}
    for cond_index, condition in enumerate(Condition):
        results = run_agents(cfg, condition, cond_index, cfg.agents)
        all_results.extend(results)
        conditions[condition.value] = condition_summary(results)
        if progress is not None:
            progress(f"{condition.value}: {conditions[condition.value]}")
    summary = {
        "master_seed": cfg.seed,
        "conditions": conditions,
    }
    return all_results, summary
