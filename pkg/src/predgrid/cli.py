"""Command-line entry point.

Subcommands:

- ``train``      run agents under one punishment condition
- ``lock-eval``  train to first success, lock, evaluate the frozen policy
- ``ablation``   all three punishment conditions side by side
- ``replay``     re-run a finished run directory and verify byte equality
- ``render``     draw a saved network snapshot to a figure file

Every run directory is self-describing: ``config.txt`` plus the seed
reproduce all artifacts byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from .config import Condition, ConfigError, ExperimentConfig, config_echo, load_config, read_echo
from .experiment import AgentResult, condition_summary, run_agents, run_ablation
from .grid import NetworkState
from .report import (REFERENCE_LOCKED_SUCCESS_RATE, render_grid_snapshot,
                     write_outputs)

_OVERRIDE_FLAGS = ("seed", "agents", "episodes", "eval_episodes", "condition",
                   "workers", "snapshots", "lock_on_success")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="flat key=value config file")
    parser.add_argument("--out", metavar="DIR", required=True, help="output directory")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--agents", type=int)
    parser.add_argument("--episodes", type=int, help="training episode budget per agent")
    parser.add_argument("--eval-episodes", dest="eval_episodes", type=int)
    parser.add_argument("--condition", choices=[c.value for c in Condition])
    parser.add_argument("--workers", type=int)
    parser.add_argument("--snapshots", type=int,
                        help="how many agents get a final state snapshot")
    parser.add_argument("--lock-on-success", dest="lock_on_success",
                        choices=["true", "false"])


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    fixed = getattr(args, "_fixed_cfg", None)
    if fixed is not None:
        return fixed
    overrides = {}
    for key in _OVERRIDE_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = str(value)
    return load_config(args.config, overrides)


def _write_run(cfg: ExperimentConfig, command: str, out_dir: str,
               results: list[AgentResult], summary: dict) -> Path:
    records = [rec for res in results for rec in res.records]
    summary = dict(summary)
    summary["command"] = command
    summary["reference_locked_success_rate"] = REFERENCE_LOCKED_SUCCESS_RATE
    out = write_outputs(records, summary, out_dir, config_echo(cfg, command))
    for res in results[:cfg.snapshots]:
        stem = f"network_agent{res.agent_index:03d}"
        (out / f"{stem}.json").write_text(res.network.to_json() + "\n")
        render_grid_snapshot(res.network, None, out / f"{stem}.svg",
                             moves=res.last_moves or None)
    return out


def _agents_summary(results: list[AgentResult]) -> list[dict]:
    return [
        {
            "agent_index": r.agent_index,
            "agent_seed": r.agent_seed,
            "condition": r.condition.value,
            "episodes_to_success": r.episodes_to_success,
            "locked": r.locked,
            "locked_success_rate": r.locked_success_rate,
        }
        for r in results
    ]


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    results = run_agents(cfg, cfg.condition, 0, cfg.agents, evaluate=False)
    summary = {
        "master_seed": cfg.seed,
        "condition": cfg.condition.value,
        "agents": _agents_summary(results),
        "aggregate": condition_summary(results),
    }
    out = _write_run(cfg, "train", args.out, results, summary)
    agg = summary["aggregate"]
    print(f"trained {cfg.agents} agents ({cfg.condition.value}); "
          f"solve rate {agg['solve_rate']:.2f}, outputs in {out}")
    return 0


def cmd_lock_eval(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if not cfg.lock_on_success:
        # The protocol is train-until-success then freeze; honor it.
        cfg = replace(cfg, lock_on_success=True)
    results = run_agents(cfg, cfg.condition, 0, cfg.agents, evaluate=True)
    rates = [r.locked_success_rate for r in results
             if r.locked_success_rate is not None]
    mean_rate = sum(rates) / len(rates) if rates else None
    summary = {
        "master_seed": cfg.seed,
        "condition": cfg.condition.value,
        "agents": _agents_summary(results),
        "aggregate": condition_summary(results),
        "mean_locked_success_rate": mean_rate,
    }
    out = _write_run(cfg, "lock-eval", args.out, results, summary)
    if mean_rate is None:
        print(f"no agent reached a full-length episode within "
              f"{cfg.episodes} episodes; outputs in {out}")
    else:
        print(f"mean locked success rate {mean_rate:.3f} over {len(rates)} "
              f"agents (reference: {REFERENCE_LOCKED_SUCCESS_RATE:.2f}); "
              f"outputs in {out}")
    return 0


def cmd_ablation(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    results, summary = run_ablation(cfg)
    summary["agents"] = _agents_summary(results)
    out = _write_run(cfg, "ablation", args.out, results, summary)
    for name, row in summary["conditions"].items():
        rate = row["solve_rate"]
        median = row["median_episodes_to_success"]
        print(f"{name:>28}: solve rate {rate:.2f}, "
              f"median episodes to success {median}")
    print(f"outputs in {out}")
    return 0


_COMMANDS = {"train": cmd_train, "lock-eval": cmd_lock_eval, "ablation": cmd_ablation}


def cmd_replay(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    echo = run_dir / "config.txt"
    if not echo.exists():
        print(f"no config echo at {echo}", file=sys.stderr)
        return 2
    command, cfg = read_echo(echo)
    if command not in _COMMANDS:
        print(f"cannot replay command {command!r}", file=sys.stderr)
        return 2
    with tempfile.TemporaryDirectory(prefix="predgrid-replay-") as tmp:
        _COMMANDS[command](_ReplayArgs(cfg, tmp))
        mismatches = []
        for name in ("runs.csv", "summary.json"):
            original = (run_dir / name).read_bytes()
            fresh = (Path(tmp) / name).read_bytes()
            if original != fresh:
                mismatches.append(name)
    if mismatches:
        print(f"REPLAY MISMATCH: {', '.join(mismatches)} differ from {run_dir}")
        return 1
    print(f"REPLAY OK: {run_dir} reproduces byte-identically")
    return 0


class _ReplayArgs(argparse.Namespace):
    """Namespace that short-circuits config resolution to a fixed config."""

    def __init__(self, cfg: ExperimentConfig, out: str):
        super().__init__(config=None, out=out, _fixed_cfg=cfg)
        for key in _OVERRIDE_FLAGS:
            setattr(self, key, None)


def cmd_render(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.state_file).read_text())
    net = NetworkState.from_json_dict(doc)
    out = Path(args.out or (Path(args.state_file).with_suffix(".svg")))
    render_grid_snapshot(net, None, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predgrid",
        description="Grid network with prediction-error plasticity on cart-pole.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("train", "train agents under one punishment condition"),
        ("lock-eval", "train to first success, lock, evaluate the policy"),
        ("ablation", "compare all three punishment conditions"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_run_flags(p)

    p = sub.add_parser("replay", help="re-run a run directory and verify bytes")
    p.add_argument("run_dir", help="directory containing config.txt")

    p = sub.add_parser("render", help="draw a saved network snapshot")
    p.add_argument("state_file", help="network JSON written by a run")
    p.add_argument("-o", "--out", help="output figure path (default: .svg sibling)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = dict(_COMMANDS)
    handlers["replay"] = cmd_replay
    handlers["render"] = cmd_render
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
