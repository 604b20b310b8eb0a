"""Zeta cyclical correction of a baseline forecast, alpha calibration, accuracy metrics."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .zeta import ZetaSignal

DEFAULT_ALPHA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 11))
TABLE_ZETA_MEAN = 0.73


@dataclass(frozen=True)
class ForecastSeries:
    t: tuple[float, ...]
    baseline: tuple[float, ...]
    corrected: tuple[float, ...]
    delta: tuple[float, ...]
    alpha: float
    zeta_mean: float
    signal: tuple[float, ...] = ()

    def __len__(self) -> int:
        return len(self.t)

    def to_dict(self) -> dict:
        return {
            "t": list(self.t),
            "signal": list(self.signal),
            "baseline": list(self.baseline),
            "corrected": list(self.corrected),
            "delta": list(self.delta),
            "alpha": self.alpha,
            "zeta_mean": self.zeta_mean,
        }

    def write_csv(self, path: str | Path) -> None:
        """Table-2 style export: t, signal, baseline, corrected, delta, direction."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "zeta", "baseline", "corrected", "delta", "correction"])
            sig = self.signal or (math.nan,) * len(self)
            for row in zip(self.t, sig, self.baseline, self.corrected, self.delta):
                d = row[-1]
                kind = "positive" if d > 0 else "negative" if d < 0 else "neutral"
                w.writerow([*(repr(float(v)) for v in row), kind])


@dataclass(frozen=True)
class AccuracyReport:
    rmse: float
    mape: float


def _as_pair(pred: Sequence[float], actual: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=float)
    a = np.asarray(actual, dtype=float)
    if p.shape != a.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {a.shape}")
    if p.size == 0:
        raise ValueError("empty input")
    return p, a


def rmse(pred: Sequence[float], actual: Sequence[float]) -> float:
    p, a = _as_pair(pred, actual)
    return float(np.sqrt(np.mean((p - a) ** 2)))


def mape(pred: Sequence[float], actual: Sequence[float]) -> float:
    """Mean absolute percentage error, in percent."""
    p, a = _as_pair(pred, actual)
    if np.any(a == 0):
        raise ValueError("MAPE undefined: actual contains zero")
    return float(100.0 * np.mean(np.abs(p - a) / np.abs(a)))


def accuracy(pred: Sequence[float], actual: Sequence[float]) -> AccuracyReport:
    return AccuracyReport(rmse(pred, actual), mape(pred, actual))


def correct(
    baseline: Sequence[float],
    signal: ZetaSignal,
    alpha: float,
    zeta_mean: float | None = None,
) -> ForecastSeries:
    """Shift each baseline value by ``alpha * (signal_i - zeta_mean)``.

    ``zeta_mean`` defaults to the mean of the supplied signal window.
    """
    if len(baseline) != len(signal):
        raise ValueError(f"length mismatch: {len(baseline)} baseline vs {len(signal)} signal")
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    zbar = signal.mean if zeta_mean is None else float(zeta_mean)
    delta = [alpha * (s - zbar) for s in signal.values.tolist()]
    base = [float(b) for b in baseline]
    return ForecastSeries(
        t=tuple(signal.t.tolist()),
        baseline=tuple(base),
        corrected=tuple(b + d for b, d in zip(base, delta)),
        delta=tuple(delta),
        alpha=float(alpha),
        zeta_mean=zbar,
        signal=tuple(signal.values.tolist()),
    )


@dataclass(frozen=True)
class Calibration:
    alpha_star: float
    rmse_curve: tuple[tuple[float, float], ...]
    forecast: ForecastSeries

    @property
    def rmse(self) -> float:
        return dict(self.rmse_curve)[self.alpha_star]

    def to_dict(self) -> dict:
        return {
            "alpha_star": self.alpha_star,
            "rmse_curve": [{"alpha": a, "rmse": r} for a, r in self.rmse_curve],
            "forecast_series": self.forecast.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def calibrate_alpha(
    baseline: Sequence[float],
    signal: ZetaSignal,
    actual: Sequence[float],
    grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    zeta_mean: float | None = None,
) -> Calibration:
    """Grid search for the alpha minimising RMSE against ``actual``.

    Ties go to the smallest alpha; the grid must be sorted ascending.
    """
    if len(grid) == 0:
        raise ValueError("empty alpha grid")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha grid must be sorted ascending")
    if len(actual) != len(baseline):
        raise ValueError(f"length mismatch: {len(actual)} actual vs {len(baseline)} baseline")

    curve = []
    best = None
    for a in grid:
        fc = correct(baseline, signal, a, zeta_mean)
        err = rmse(fc.corrected, actual)
        curve.append((float(a), err))
        if best is None or err < best[1]:
            best = (fc, err)
    return Calibration(best[0].alpha, tuple(curve), best[0])
