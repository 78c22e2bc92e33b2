"""Figures written next to benchmark and ablation reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import OVERALL, BenchRecord  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
}


def plot_benchmark(records: Sequence[BenchRecord], path: Union[str, Path]) -> Path:
    """Repair rate per assignment, annotated with mean TED."""
    path = Path(path)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * len(records) + 1.5), 3.2))
        names = [r.assignment_id for r in records]
        rates = [r.repair_rate for r in records]
        colors = ["0.35" if n == OVERALL else "C0" for n in names]
        bars = ax.bar(range(len(records)), rates, color=colors)
        for bar, r in zip(bars, records):
            label = "N/A" if r.mean_ted is None else f"TED {r.mean_ted:.1f}"
            ax.annotate(label, (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                        ha="center", va="bottom", fontsize=7, xytext=(0, 2), textcoords="offset points")
        ax.set_xticks(range(len(records)))
        ax.set_xticklabels(names, rotation=30, ha="right")
        ax.set_ylim(0, 110)
        ax.set_ylabel("Repair rate (%)")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path


def plot_ablation(table: dict[str, list[BenchRecord]], path: Union[str, Path]) -> Path:
    """Overall repair rate and mean TED per variant, side by side."""
    path = Path(path)
    names = list(table)
    overall = [table[n][-1] for n in names]
    with plt.rc_context(_STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(max(6.0, 1.1 * len(names) + 3), 3.4))
        xs = range(len(names))
        left.bar(xs, [r.repair_rate for r in overall], color=[f"C{i % 10}" for i in xs])
        left.set_ylabel("Overall repair rate (%)")
        left.set_ylim(0, 110)
        right.bar(xs, [r.mean_ted or 0.0 for r in overall], color=[f"C{i % 10}" for i in xs])
        right.set_ylabel("Overall mean TED")
        for ax in (left, right):
            ax.set_xticks(list(xs))
            ax.set_xticklabels(names, rotation=35, ha="right")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path
