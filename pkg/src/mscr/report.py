"""Report files: delimited text plus a PNG figure written next to it."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

REPAIR_COLOR = "#1f77b4"
NAIVE_COLOR = "#bbbbbb"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def bandwidth_figure(rows: Sequence[tuple[str, int, int]], path) -> Path:
    """Grouped bars of coordinated repair vs naive transfers per failure pattern."""
    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(rows) + 2), 3.2))
    xs = range(len(rows))
    width = 0.4
    ax.bar([x - width / 2 for x in xs], [r[1] for r in rows], width, label="repair", color=REPAIR_COLOR)
    ax.bar([x + width / 2 for x in xs], [r[2] for r in rows], width, label="naive", color=NAIVE_COLOR)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r[0] for r in rows], rotation=45 if len(rows) > 6 else 0)
    ax.set_ylabel("symbols transferred")
    ax.legend(frameon=False)
    return _save(fig, path)


def flowcut_figure(cuts: Mapping[str, Mapping[tuple, int]], file_size: int, path) -> Path:
    """Sorted per-collector max-flow values for each graph, against the file size."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for label, per in cuts.items():
        vals = sorted(per.values())
        ax.step(range(len(vals)), vals, where="post", label=label)
    ax.axhline(file_size, color="k", ls="--", lw=0.8, label=f"M = {file_size}")
    ax.set_xlabel("data collectors (sorted)")
    ax.set_ylabel("max flow")
    ax.legend(frameon=False)
    return _save(fig, path)


def churn_figure(per_round: Sequence[tuple[int, tuple, int, int]], path) -> Path:
    """Cumulative transfers of coordinated repair vs the naive baseline."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    rep, naive = [0], [0]
    for _, _, t, n in per_round:
        rep.append(rep[-1] + t)
        naive.append(naive[-1] + n)
    ax.plot(rep, label="repair", color=REPAIR_COLOR)
    ax.plot(naive, label="naive", color=NAIVE_COLOR)
    ax.set_xlabel("round")
    ax.set_ylabel("cumulative symbols")
    ax.legend(frameon=False)
    return _save(fig, path)


def certificate_figure(counts: Sequence[tuple[str, int, int]], path) -> Path:
    """Stacked feasible/infeasible candidate counts per searched instance."""
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(counts) + 2), 3.2))
    xs = list(range(len(counts)))
    infeasible = [c[1] - c[2] for c in counts]
    feasible = [c[2] for c in counts]
    ax.bar(xs, infeasible, color=NAIVE_COLOR, label="infeasible")
    ax.bar(xs, feasible, bottom=infeasible, color=REPAIR_COLOR, label="feasible")
    ax.set_xticks(xs)
    ax.set_xticklabels([c[0] for c in counts], rotation=45 if len(counts) > 5 else 0, ha="right" if len(counts) > 5 else "center")
    ax.set_ylabel("candidate directions")
    ax.legend(frameon=False)
    return _save(fig, path)
