"""Riemann zeta evaluation on and near the critical line.

The evaluator sums the alternating Dirichlet eta series with the
Cohen-Villegas-Zagier weights (Borwein's second algorithm) and converts
back through ``zeta(s) = eta(s) / (1 - 2**(1 - s))``.  The number of terms
is chosen from the a-priori error bound

    |err| <= 3 (1 + 2|t|) exp(pi |t| / 2) / (3 + sqrt(8))**n / |1 - 2**(1 - s)|

so the requested absolute tolerance holds without trial evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

SignalMode = Literal["real", "modulus"]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_TERMS = 10**6
ZERO_REFINE_XTOL = 1e-6

_LOG_RATE = math.log(3.0 + math.sqrt(8.0))
_EPS = np.finfo(float).eps


class ZetaDomainError(ValueError):
    """Argument outside the region covered by the eta-series method."""


class ZetaConvergenceError(ArithmeticError):
    """Requested tolerance cannot be met within the term budget."""


@dataclass(frozen=True)
class ComplexArg:
    sigma: float
    t: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise ZetaDomainError(f"non-finite argument {self.sigma}+{self.t}i")
        if self.sigma < 0:
            raise ZetaDomainError(f"Re(s) = {self.sigma} < 0 is outside the eta-series domain")
        if self.sigma == 1.0 and self.t == 0.0:
            raise ZetaDomainError("s = 1 is the pole of zeta")

    @classmethod
    def of(cls, s: complex | ComplexArg) -> ComplexArg:
        if isinstance(s, ComplexArg):
            return s
        s = complex(s)
        return cls(s.real, s.imag)

    @property
    def value(self) -> complex:
        return complex(self.sigma, self.t)


@dataclass(frozen=True)
class ZetaSample:
    t: float
    value: complex
    signal: float


@dataclass(frozen=True)
class ZetaSignal:
    samples: tuple[ZetaSample, ...]
    mean: float

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("a zeta signal needs at least one sample")
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample heights must be strictly increasing")

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.signal for s in self.samples])

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def from_values(
        cls, values: Sequence[float], t: Sequence[float] | None = None
    ) -> ZetaSignal:
        """Wrap a tabulated signal (e.g. a fixture column) without evaluating zeta."""
        if t is None:
            t = range(1, len(values) + 1)
        samples = tuple(
            ZetaSample(float(ti), complex(float(v), 0.0), float(v)) for ti, v in zip(t, values)
        )
        if len(samples) != len(values):
            raise ValueError("t and values differ in length")
        return cls(samples, math.fsum(s.signal for s in samples) / len(samples))


@lru_cache(maxsize=64)
def _cvz_weights(n: int) -> np.ndarray:
    # w_k = (d_n - d_k) / d_n with d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!),
    # built in log space so large n does not overflow.
    i = np.arange(n)
    log_ratio = np.log(4.0 * (n + i) * (n - i)) - np.log((2.0 * i + 1.0) * (2.0 * i + 2.0))
    log_terms = np.concatenate(([0.0], np.cumsum(log_ratio)))
    terms = np.exp(log_terms - log_terms.max())
    tail = np.cumsum(terms[::-1])[::-1]  # tail[k] = sum_{i>=k} terms[i]
    return tail[1:] / tail[0]


def terms_needed(s: complex, tol: float) -> int:
    """Smallest n for which the CVZ error bound at ``s`` is below ``tol``.

    Uses the Gamma-free form ``3 (1 + 2|t|) exp(pi |t| / 2) / (3 + sqrt 8)^n``
    of the bound, which stays valid down to Re(s) = 0.
    """
    s = complex(s)
    t = abs(s.imag)
    denom = abs(1.0 - 2.0 ** (1.0 - s))
    log_bound = (
        math.log(3.0 * (1.0 + 2.0 * t)) + 0.5 * math.pi * t - math.log(denom) - math.log(tol)
    )
    return max(8, math.ceil(log_bound / _LOG_RATE) + 1)


def evaluate(
    s: complex | ComplexArg, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> complex:
    """Return zeta(s) to absolute error ``tol`` for Re(s) >= 0, s != 1."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    arg = ComplexArg.of(s)
    s = arg.value
    denom = 1.0 - 2.0 ** (1.0 - s)
    if abs(denom) < 1e-14:
        # 1 - 2^(1-s) vanishes on Re(s) = 1; only s = 1 itself is a true pole
        raise ZetaDomainError(f"1 - 2^(1-s) vanishes at s = {s}; eta relation is singular")

    n = terms_needed(s, tol)
    if n > max_terms:
        raise ZetaConvergenceError(
            f"{n} terms needed for tol={tol} at s={s}, budget is {max_terms}"
        )
    k = np.arange(1, n + 1, dtype=float)
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    terms = signs * _cvz_weights(n) * np.exp(-s * np.log(k))
    eta = complex(terms.sum())

    rounding = 4.0 * n * _EPS * float(np.abs(terms).sum()) / abs(denom)
    if rounding > tol:
        raise ZetaConvergenceError(
            f"rounding error estimate {rounding:.2e} exceeds tol={tol} at s={s}"
        )
    return eta / denom


def _signal_of(value: complex, mode: SignalMode) -> float:
    if mode == "real":
        return value.real
    if mode == "modulus":
        return abs(value)
    raise ValueError(f"unknown signal mode {mode!r}")


def sample_signal(
    t_values: Iterable[float], mode: SignalMode = "real", tol: float = DEFAULT_TOL
) -> ZetaSignal:
    """Sample zeta(0.5 + i t) over ``t_values`` and reduce each value to a scalar."""
    ts = [float(t) for t in t_values]
    if not ts:
        raise ValueError("t_values is empty")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_values must be strictly increasing")
    samples = []
    for t in ts:
        z = evaluate(complex(0.5, t), tol)
        samples.append(ZetaSample(t, z, _signal_of(z, mode)))
    mean = math.fsum(s.signal for s in samples) / len(samples)
    return ZetaSignal(tuple(samples), mean)


def critical_modulus(t: float, tol: float = DEFAULT_TOL) -> float:
    return abs(evaluate(complex(0.5, t), tol))


def locate_zero_candidates(
    t_lo: float,
    t_hi: float,
    step: float,
    threshold: float,
    tol: float = DEFAULT_TOL,
) -> list[tuple[float, float]]:
    """Find heights where |zeta(0.5 + i t)| dips below ``threshold``.

    Local minima of |zeta| on the grid ``t_lo, t_lo + step, ...`` are refined
    by golden-section search to ``1e-6`` in t; the refined minima under
    ``threshold`` are returned as ``(t, |zeta|)`` sorted by t.
    """
    if not 0 < t_lo < t_hi:
        raise ValueError(f"need 0 < t_lo < t_hi, got {t_lo}, {t_hi}")
    if not step > 0 or not threshold > 0:
        raise ValueError("step and threshold must be positive")

    n = int(math.floor((t_hi - t_lo) / step + 1e-9))
    grid = t_lo + step * np.arange(n + 1)
    mod = np.array([critical_modulus(t, tol) for t in grid])

    found = []
    for i in range(1, len(grid) - 1):
        if not (mod[i] <= mod[i - 1] and mod[i] < mod[i + 1]):
            continue
        a, b, c = grid[i - 1], grid[i], grid[i + 1]
        res = minimize_scalar(
            critical_modulus,
            bracket=(a, b, c),
            args=(tol,),
            method="golden",
            options={"xtol": ZERO_REFINE_XTOL / (2.0 * abs(b))},
        )
        if res.fun < threshold:
            found.append((float(res.x), float(res.fun)))
    return sorted(found)


def zero_density(
    candidates: Sequence[tuple[float, float]] | Sequence[float],
    window: float,
    t_lo: float,
    t_hi: float,
    step: float | None = None,
) -> list[tuple[float, float]]:
    """Count zero candidates per unit t in windows sliding over ``[t_lo, t_hi]``.

    Windows are ``[a, a + window)`` for ``a = t_lo, t_lo + step, ...`` while the
    window fits inside the range (the last window is closed on the right).
    ``step`` defaults to ``window``, i.e. non-overlapping tiles.
    """
    if not window > 0:
        raise ValueError("window must be positive")
    if step is None:
        step = window
    if not step > 0:
        raise ValueError("step must be positive")
    heights = np.array([c[0] if isinstance(c, tuple) else c for c in candidates], dtype=float)

    out = []
    n_windows = int(math.floor((t_hi - t_lo - window) / step + 1e-9)) + 1
    for j in range(max(n_windows, 0)):
        a = t_lo + j * step
        b = a + window
        last = a + step + window > t_hi + 1e-9
        inside = (heights >= a) & ((heights <= b) if last else (heights < b))
        out.append((a + window / 2.0, int(inside.sum()) / window))
    return out
