"""Render simulator result CSVs into figures.

Input files come from the simulator CLI and follow one of two schemas:

  reward files:  seed,step,instant_reward,average_reward
  sweep files:   seed,sweep_param,sweep_value,scheme,best_ssr

Three figure kinds are supported: ``convergence`` (instant + smoothed
reward versus step, seeds averaged), ``sweep`` (seed-mean best rate per
scheme versus the swept parameter) and ``cdf`` (empirical distribution
of the best-so-far reward across steps). Inputs are never modified.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("convergence", "sweep", "cdf")

_REWARD_HEADER = ["seed", "step", "instant_reward", "average_reward"]
_SWEEP_HEADER = ["seed", "sweep_param", "sweep_value", "scheme", "best_ssr"]


class SchemaError(Exception):
    """Input CSV does not match the expected column layout."""


@dataclass(frozen=True)
class FigureSpec:
    input_csvs: tuple[str, ...]
    kind: str
    output_path: str
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r} "
                              f"(expected one of {', '.join(KINDS)})")
        if not self.input_csvs:
            raise SchemaError("at least one input CSV is required")


def _read_rows(path: str, expected_header: list[str]):
    if not os.path.exists(path):
        raise SchemaError(f"no such file: {path}")
    header = None
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                for want, got in zip(expected_header, header + [""] * 9):
                    if want != got:
                        raise SchemaError(
                            f"{path}: expected column {want!r}, found {got!r}")
                if len(header) != len(expected_header):
                    raise SchemaError(f"{path}: expected columns "
                                      f"{expected_header}, found {header}")
                continue
            rows.append(line.split(","))
    if header is None:
        raise SchemaError(f"{path}: empty CSV")
    return rows


def read_reward_csv(path: str):
    """Per-seed (steps, instant, average) arrays, keyed by seed."""
    by_seed: dict[str, list] = {}
    for parts in _read_rows(path, _REWARD_HEADER):
        by_seed.setdefault(parts[0], []).append(
            (int(parts[1]), float(parts[2]), float(parts[3])))
    out = {}
    for seed, entries in by_seed.items():
        entries.sort()
        arr = np.array(entries, dtype=float)
        out[seed] = (arr[:, 0].astype(int), arr[:, 1], arr[:, 2])
    return out


def read_sweep_csv(path: str):
    """Rows (scheme, sweep_value, best_ssr) plus the sweep parameter name."""
    rows = _read_rows(path, _SWEEP_HEADER)
    param = rows[0][1] if rows else ""
    data = [(parts[3], float(parts[2]), float(parts[4])) for parts in rows]
    return param, data


def empirical_cdf(samples: np.ndarray):
    """Sorted sample values with cumulative probabilities (1..n)/n."""
    x = np.sort(np.asarray(samples, dtype=float))
    y = np.arange(1, x.size + 1) / x.size
    return x, y


def best_so_far(instant: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(instant)


def _label(path: str) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    return stem.removeprefix("rewards_").removeprefix("sweep_")


def build_figure(spec: FigureSpec):
    """Create (but do not save) the matplotlib figure for a spec."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if spec.kind == "convergence":
        for path in spec.input_csvs:
            per_seed = read_reward_csv(path)
            stacked_i = np.mean([v[1] for v in per_seed.values()], axis=0)
            stacked_a = np.mean([v[2] for v in per_seed.values()], axis=0)
            steps = next(iter(per_seed.values()))[0]
            name = _label(path)
            ax.plot(steps, stacked_i, alpha=0.45, linewidth=0.7,
                    label=f"{name} instant")
            ax.plot(steps, stacked_a, linewidth=1.8, label=f"{name} average")
        ax.set_xlabel(spec.xlabel or "time step")
        ax.set_ylabel(spec.ylabel or "reward (bits/s/Hz)")
    elif spec.kind == "sweep":
        for path in spec.input_csvs:
            param, data = read_sweep_csv(path)
            schemes = sorted({scheme for scheme, _, _ in data})
            for scheme in schemes:
                pts: dict[float, list[float]] = {}
                for s, value, best in data:
                    if s == scheme:
                        pts.setdefault(value, []).append(best)
                xs = sorted(pts)
                ys = [float(np.mean(pts[x])) for x in xs]
                ax.plot(xs, ys, marker="o", label=scheme)
            ax.set_xlabel(spec.xlabel or param)
        ax.set_ylabel(spec.ylabel or "best sum secrecy rate (bits/s/Hz)")
    else:  # cdf
        for path in spec.input_csvs:
            per_seed = read_reward_csv(path)
            samples = np.concatenate([best_so_far(v[1])
                                      for v in per_seed.values()])
            x, y = empirical_cdf(samples)
            ax.step(x, y, where="post", label=_label(path))
        ax.set_xlabel(spec.xlabel or "sum secrecy rate (bits/s/Hz)")
        ax.set_ylabel(spec.ylabel or "empirical CDF")
        ax.set_ylim(0.0, 1.02)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    """Write the figure image and return its path."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.output_path, dpi=130)
    finally:
        plt.close(fig)
    return spec.output_path
