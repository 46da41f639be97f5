"""Static SVG charts from the CSV outputs (matplotlib, Agg backend)."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import FsfmasError  # noqa: E402


class PlotError(FsfmasError):
    pass


def _read(path) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        raise PlotError(f"missing {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise PlotError(f"{path} has no data rows")
    return rows


def agent_series(agents_csv, agent_id: int) -> dict[str, list]:
    rows = [r for r in _read(agents_csv) if int(r["agent_id"]) == agent_id]
    if not rows:
        raise PlotError(f"agent {agent_id} not found in {agents_csv}")
    return {
        "cycle": [int(r["cycle"]) for r in rows],
        "ai": [float(r["ai"]) for r in rows],
        "pi": [float(r["pi"]) for r in rows],
        "state": [int(r["state"]) for r in rows],
        "class": rows[0]["class"],
    }


def plot_agent(in_dir, agent_id: int, out_dir=None) -> list[Path]:
    in_dir = Path(in_dir)
    out_dir = Path(out_dir or in_dir)
    s = agent_series(in_dir / "agents.csv", agent_id)

    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(s["cycle"], s["ai"], label="AI")
    ax.plot(s["cycle"], s["pi"], label="PI")
    ax.set_xlabel("cycle")
    ax.set_ylabel("indicator")
    ax.set_title(f"agent {agent_id} ({s['class']}) indicators")
    ax.legend()
    fig.tight_layout()
    ind = out_dir / f"agent_{agent_id}_indicators.svg"
    fig.savefig(ind)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 2.5))
    ax.step(s["cycle"], s["state"], where="post")
    ax.set_yticks(sorted(set(s["state"]) | {1, 2, 3, 4}))
    ax.set_xlabel("cycle")
    ax.set_ylabel("ATN state")
    ax.set_title(f"agent {agent_id} ({s['class']}) state")
    fig.tight_layout()
    st = out_dir / f"agent_{agent_id}_states.svg"
    fig.savefig(st)
    plt.close(fig)
    return [ind, st]


def plot_activities(in_dir, out_dir=None) -> Path:
    in_dir = Path(in_dir)
    out_dir = Path(out_dir or in_dir)
    rows = _read(in_dir / "activities.csv")
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot([int(r["cycle"]) for r in rows], [int(r["total"]) for r in rows])
    ax.set_xlabel("cycle")
    ax.set_ylabel("activities")
    ax.set_title("factual agent activities per cycle")
    fig.tight_layout()
    path = out_dir / "activities.svg"
    fig.savefig(path)
    plt.close(fig)
    return path
