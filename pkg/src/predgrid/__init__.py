"""Grid network with prediction-error plasticity and cell migration.

Processing cells on a 2D grid learn two things at once: directional sending
strengths and a homeostatic activation expectation (local, error-driven
updates after every wave), and where to sit (desire-driven one-step migration
after every macro-episode). A self-contained cart-pole environment and a
deterministic experiment harness drive and evaluate the network.
"""

from .config import Condition, ExperimentConfig, SimConfig, load_config
from .grid import (Cell, CellKind, Coord, NetworkState, init_network,
                   reset_immediate_state)
from .propagation import (WaveResult, WaveSeed, accumulate_stm,
                          propagate_wave, select_action)
from .plasticity import ltm_update
from .movement import execute_movement_phase
from .punishment import (PunishmentEvent, catastrophic_punishment,
                         probabilistic_punishment, punishment_wave)
from .experiment import (RunRecord, evaluate_locked, run_ablation,
                         run_episode, run_training)

__version__ = "0.1.0"

__all__ = [
    "Cell", "CellKind", "Condition", "Coord", "ExperimentConfig",
    "NetworkState", "PunishmentEvent", "RunRecord", "SimConfig",
    "WaveResult", "WaveSeed", "accumulate_stm", "catastrophic_punishment",
    "evaluate_locked", "execute_movement_phase", "init_network",
    "load_config", "ltm_update", "probabilistic_punishment",
    "propagate_wave", "punishment_wave", "reset_immediate_state",
    "run_ablation", "run_episode", "run_training", "select_action",
]
