"""Data files reproducing the published tables, plus an illustrative macro panel."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from ..data import ForecastTable, load_table

TABLE1_ZETA = (0.650, 0.740, 0.810, 0.710, 0.620, 0.830, 0.790, 0.670, 0.720, 0.760)
TABLE2_PERIODS = (1, 3, 5, 6)
PHASES = ("Stable", "Growth", "Volatile", "Crash")


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def table1() -> ForecastTable:
    return load_table(path("table1.csv"))


def table2() -> ForecastTable:
    return load_table(path("table2.csv"))


def table4_transition() -> np.ndarray:
    t = load_table(path("table4_transition.csv"))
    return np.array([t[p] for p in PHASES]).T


def table5():
    from ..mcdm import DecisionMatrix

    return DecisionMatrix.from_csv(path("table5.csv"))
