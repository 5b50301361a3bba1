"""Time-series containers and their CSV/JSON serialization.

CSV files carry a header row, a fixed column order, and reals formatted with
17 significant digits so that values round-trip losslessly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def format_real(value: float) -> str:
    return f"{value:.17g}"


def write_csv(path: str | Path, columns: dict[str, np.ndarray]) -> None:
    """Write named columns (equal length) as CSV with 17-digit reals."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    length = arrays[0].shape[0]
    if any(a.shape[0] != length for a in arrays):
        raise ValueError("all columns must have the same length")
    lines = [",".join(names)]
    for i in range(length):
        lines.append(",".join(format_real(float(a[i])) for a in arrays))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().strip().splitlines()
    names = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return {n: data[:, i] for i, n in enumerate(names)}


@dataclass
class ObservableSeries:
    """Aligned samples of position observables on a time grid.

    ``p_region`` is the probability of the scenario's target region (the last
    site for plain chains, the sites beyond the gate for switch circuits).
    ``site_probabilities`` optionally holds the full site distribution, one
    row per sample.
    """

    times: np.ndarray
    mean_q: np.ndarray
    var_q: np.ndarray
    p_region: np.ndarray | None = None
    site_probabilities: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.mean_q = np.asarray(self.mean_q, dtype=float)
        self.var_q = np.asarray(self.var_q, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        n = self.times.size
        if self.mean_q.shape != (n,) or self.var_q.shape != (n,):
            raise ValueError("mean_q and var_q must align with times")
        if np.any(self.var_q < -1e-9):
            raise ValueError("variance must be nonnegative")
        self.var_q = np.maximum(self.var_q, 0.0)
        if self.p_region is not None:
            self.p_region = np.asarray(self.p_region, dtype=float)
            if self.p_region.shape != (n,):
                raise ValueError("p_region must align with times")

    def columns(self, p_label: str = "p_region") -> dict[str, np.ndarray]:
        cols = {"t": self.times, "mean_Q": self.mean_q, "var_Q": self.var_q}
        if self.p_region is not None:
            cols[p_label] = self.p_region
        return cols

    def to_csv(self, path: str | Path, p_label: str = "p_region") -> None:
        write_csv(path, self.columns(p_label))

    def to_json(self, p_label: str = "p_region") -> str:
        payload = {k: [float(v) for v in arr] for k, arr in self.columns(p_label).items()}
        if self.site_probabilities is not None:
            payload["site_probabilities"] = self.site_probabilities.tolist()
        return json.dumps(payload)
