"""Run artifacts: delimited episode logs, JSON summaries, grid snapshots.

Every writer here is byte-stable: rerunning with the same seed reproduces
identical files. Snapshots are static vector graphics of the grid (cell kinds
by color, activations when a wave is supplied, movement arrows when known).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Patch, Rectangle

from .grid import CellKind, NetworkState
from .movement import MovementEvent
from .propagation import WaveResult

RUNS_HEADER = ("agent_seed", "episode", "steps", "locked", "punish_events", "moves")

# Mean post-lock success rate reported for this architecture; summaries carry
# it so runs can be compared against the benchmark at a glance.
REFERENCE_LOCKED_SUCCESS_RATE = 0.82

_KIND_COLORS = {
    CellKind.INPUT: "#4878cf",
    CellKind.PROCESSING: "#b0b0b0",
    CellKind.OUTPUT: "#ee854a",
}


def write_outputs(records, summary: dict, out_dir: str | Path,
                  config_text: str | None = None) -> Path:
    """Write runs.csv, summary.json, and the config echo into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "runs.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_HEADER)
        for rec in records:
            writer.writerow([rec.agent_seed, rec.episode, rec.steps,
                             int(rec.locked), rec.punish_events, rec.moves])
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if config_text is not None:
        (out / "config.txt").write_text(config_text)
    return out


def render_grid_snapshot(net: NetworkState, wave: WaveResult | None,
                         path: str | Path,
                         moves: list[MovementEvent] | None = None) -> Path:
    """Draw the grid to a static figure file (SVG recommended).

    Inputs are blue, outputs orange, processing cells grey. With a wave, each
    cell is annotated with its final activation; with movement events, blue
    arrows mark executed moves and red ones blocked attempts. Never mutates
    the network; output bytes depend only on the arguments.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 6.4))
    ax.set_xlim(-0.5, net.width - 0.5)
    ax.set_ylim(-0.5, net.height - 0.5)
    ax.set_xticks(range(net.width))
    ax.set_yticks(range(net.height))
    ax.set_aspect("equal")
    ax.invert_yaxis()  # y grows downward
    ax.grid(True, color="#dddddd", linewidth=0.6)
    ax.set_axisbelow(True)
    ax.set_xlabel("x")
    ax.set_ylabel("y")

    for cell in net.cells():
        color = _KIND_COLORS[cell.kind]
        ax.add_patch(Rectangle((cell.pos.x - 0.42, cell.pos.y - 0.42),
                               0.84, 0.84, facecolor=color,
                               edgecolor="#444444", linewidth=0.7))
        label = str(cell.id)
        if wave is not None:
            label += f"\n{wave.activation[cell.id]:+.2f}"
        ax.text(cell.pos.x, cell.pos.y, label, ha="center", va="center",
                fontsize=6.5, color="black")

    for event in moves or []:
        color = "#d62728" if event.blocked else "#1f77b4"
        ax.annotate("", xy=(event.target.x, event.target.y),
                    xytext=(event.origin.x, event.origin.y),
                    arrowprops=dict(arrowstyle="->", color=color, linewidth=1.4))

    handles = [Patch(facecolor=c, edgecolor="#444444", label=k.value)
               for k, c in _KIND_COLORS.items()]
    ax.legend(handles=handles, loc="upper center",
              bbox_to_anchor=(0.5, -0.06), ncol=3, fontsize=8, frameon=False)
    title = "grid state" + ("" if wave is None else " (wave activations)")
    if net.locked:
        title += " [locked]"
    ax.set_title(title)

    with plt.rc_context({"svg.hashsalt": "predgrid"}):
        if path.suffix.lower() == ".svg":
            # Dropping the date keeps snapshot bytes reproducible.
            fig.savefig(path, metadata={"Date": None}, bbox_inches="tight")
        else:
            fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path
