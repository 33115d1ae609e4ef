"""Learning-curve plots from per-episode CSVs, written as SVG."""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

REQUIRED = ("seed", "episode", "eval_return")


class SchemaError(ValueError):
    pass


def read_curves(path: str | Path) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Per-series (episodes, mean, stderr) from one per-episode CSV.

    Rows are grouped by the ``method`` column when present, otherwise the file
    stem labels the single series.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in REQUIRED if c not in fields]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        table: dict[str, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
        for row in reader:
            label = row.get("method") or path.stem
            table[label][int(row["episode"])].append(float(row["eval_return"]))
    if not table:
        raise SchemaError(f"{path}: no data rows")
    curves = {}
    for label, by_episode in table.items():
        episodes = np.array(sorted(by_episode))
        mean = np.array([np.mean(by_episode[e]) for e in episodes])
        stderr = np.array([np.std(by_episode[e], ddof=1) / math.sqrt(len(by_episode[e]))
                           if len(by_episode[e]) > 1 else 0.0 for e in episodes])
        curves[label] = (episodes, mean, stderr)
    return curves


def plot_curves(csv_paths: Iterable[str | Path], output: str | Path, title: str | None = None,
                smooth: int = 1) -> Path:
    """Mean curve with a shaded standard-error band per series; ``smooth`` is a moving-average width."""
    series: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    for path in csv_paths:
        for label, curve in read_curves(path).items():
            key = label
            k = 2
            while key in series:
                key = f"{label} ({k})"
                k += 1
            series[key] = curve
    if not series:
        raise SchemaError("nothing to plot")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, (x, mean, err) in series.items():
        if smooth > 1 and len(mean) >= smooth:
            kernel = np.ones(smooth) / smooth
            mean = np.convolve(mean, kernel, mode="valid")
            err = np.convolve(err, kernel, mode="valid")
            x = x[smooth - 1:]
        (line,) = ax.plot(x, mean, label=label, linewidth=1.2)
        ax.fill_between(x, mean - err, mean + err, color=line.get_color(), alpha=0.2, linewidth=0)
    ax.set_xlabel("episode")
    ax.set_ylabel("average secondary return")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, format="svg")
    plt.close(fig)
    return output
