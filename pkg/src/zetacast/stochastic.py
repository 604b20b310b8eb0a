"""Monte Carlo shock bands around a corrected forecast.

Random numbers come from numpy's PCG64 bit generator and its ziggurat
standard-normal transform.  Iteration ``i`` of a run seeded with ``seed``
draws from ``SeedSequence(seed, spawn_key=(i,))``, so results do not depend
on how iterations are split across workers.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .forecast import ForecastSeries

QUANTILES = (0.05, 0.50, 0.95)


@dataclass(frozen=True)
class ShockSpec:
    std: float = 0.8
    iterations: int = 5000
    seed: int = 0
    mean: float = 0.0

    def __post_init__(self) -> None:
        if self.mean != 0.0:
            raise ValueError("shocks are zero-mean")
        if not self.std > 0:
            raise ValueError(f"std must be positive, got {self.std}")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class ForecastBands:
    t: np.ndarray
    center: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    q05: np.ndarray
    q50: np.ndarray
    q95: np.ndarray

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["period", "forecast", "mean", "std", "q05", "q50", "q95"])
            for row in zip(self.t, self.center, self.mean, self.std, self.q05, self.q50, self.q95):
                w.writerow([repr(float(v)) for v in row])

    def equals(self, other: ForecastBands) -> bool:
        names = ("t", "center", "mean", "std", "q05", "q50", "q95")
        return all(np.array_equal(getattr(self, n), getattr(other, n)) for n in names)


def _generator(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def gaussian_draws(n: int, seed: int, stream: int = 0) -> np.ndarray:
    """``n`` standard-normal variates from substream ``stream`` of ``seed``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _generator(seed, stream).standard_normal(n)


def shock_paths(n_periods: int, spec: ShockSpec, workers: int = 1) -> np.ndarray:
    """(iterations, n_periods) array of N(0, std^2) shocks."""
    def block(lo: int, hi: int) -> np.ndarray:
        return np.stack([gaussian_draws(n_periods, spec.seed, i) for i in range(lo, hi)])

    if workers <= 1:
        return spec.std * block(0, spec.iterations)
    edges = np.linspace(0, spec.iterations, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(block, edges[:-1], edges[1:])
        return spec.std * np.concatenate([p for p in parts if p.size])


def simulate(series: ForecastSeries, spec: ShockSpec = ShockSpec(), workers: int = 1) -> ForecastBands:
    """Add i.i.d. shocks to each corrected value and summarise the simulated paths.

    Quantiles use linear interpolation between order statistics (type 7).
    """
    center = np.asarray(series.corrected, dtype=float)
    sims = center + shock_paths(len(center), spec, workers)
    q = np.quantile(sims, QUANTILES, axis=0, method="linear")
    std = sims.std(axis=0, ddof=1) if spec.iterations > 1 else np.zeros_like(center)
    return ForecastBands(
        t=np.asarray(series.t, dtype=float),
        center=center,
        mean=sims.mean(axis=0),
        std=std,
        q05=q[0],
        q50=q[1],
        q95=q[2],
    )
