"""ARIMA(p, d, q) comparison baseline fitted by conditional sum of squares.

The model for the d-times differenced series w is written in mean-deviation
form,

    (w_t - mu) = sum_i phi_i (w_{t-i} - mu) + e_t + sum_j theta_j e_{t-j},

so ``intercept`` is the process mean mu of w.  Pre-sample innovations are
taken as zero and the CSS objective runs over t >= p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter


class ArimaError(ValueError):
    pass


class ArimaConvergenceError(ArimaError):
    pass


class UnstableRootsError(ArimaError):
    pass


@dataclass(frozen=True)
class ArimaSpec:
    p: int = 1
    d: int = 1
    q: int = 1

    def __post_init__(self) -> None:
        if min(self.p, self.d, self.q) < 0:
            raise ArimaError(f"orders must be nonnegative: {self}")
        if self.p + self.q < 1:
            raise ArimaError("need p + q >= 1")
        if self.d > 2:
            raise ArimaError("differencing order above 2 is not supported")

    @classmethod
    def parse(cls, text: str) -> ArimaSpec:
        """Parse ``"p,d,q"``."""
        try:
            p, d, q = (int(x) for x in text.split(","))
        except ValueError:
            raise ArimaError(f"expected 'p,d,q', got {text!r}") from None
        return cls(p, d, q)


@dataclass(frozen=True)
class ArimaFit:
    spec: ArimaSpec
    ar_coeffs: tuple[float, ...]
    ma_coeffs: tuple[float, ...]
    intercept: float
    sigma2: float
    css: float = 0.0
    css_initial: float = 0.0
    iterations: int = 0

    @property
    def mean(self) -> float:
        return self.intercept


def _roots_ok(coeffs: Sequence[float], sign: float) -> bool:
    # 1 - phi_1 z - ... (AR, sign=-1) or 1 + theta_1 z + ... (MA, sign=+1), roots outside unit circle
    if len(coeffs) == 0 or not np.any(coeffs):
        return True
    poly = np.concatenate(([1.0], sign * np.asarray(coeffs)))
    roots = np.roots(poly[::-1])
    return bool(np.all(np.abs(roots) > 1.0 + 1e-9))


def _residuals(w: np.ndarray, phi: np.ndarray, theta: np.ndarray, mu: float) -> np.ndarray:
    p = len(phi)
    x = w - mu
    u = x[p:].copy()
    for i in range(p):
        u -= phi[i] * x[p - 1 - i : len(x) - 1 - i]
    if u.size == 0:
        return u
    # e_t = u_t - sum_j theta_j e_{t-j}
    return lfilter([1.0], np.concatenate(([1.0], theta)), u)


def _difference(series: np.ndarray, d: int) -> np.ndarray:
    return np.diff(series, n=d) if d else series


def conditional_sum_of_squares(
    series: Sequence[float],
    spec: ArimaSpec,
    ar: Sequence[float],
    ma: Sequence[float],
    intercept: float,
) -> float:
    w = _difference(np.asarray(series, dtype=float), spec.d)
    e = _residuals(w, np.asarray(ar, dtype=float), np.asarray(ma, dtype=float), intercept)
    return float(e @ e)


def fit(series: Sequence[float], spec: ArimaSpec = ArimaSpec(), max_iter: int = 20000) -> ArimaFit:
    """Estimate ARIMA coefficients by Nelder-Mead minimisation of the CSS.

    AR and MA coefficients start at zero and the intercept at the sample mean
    of the differenced series; parameter points with nonstationary AR or
    noninvertible MA polynomials are rejected during the search.
    """
    y = np.asarray(series, dtype=float)
    p, d, q = spec.p, spec.d, spec.q
    if len(y) < 3 * (p + q + 1) + d:
        raise ArimaError(f"series of length {len(y)} too short for {spec}")
    w = _difference(y, d)

    def objective(theta: np.ndarray) -> float:
        phi, ma, mu = theta[:p], theta[p : p + q], theta[-1]
        if not (_roots_ok(phi, -1.0) and _roots_ok(ma, 1.0)):
            return np.inf
        e = _residuals(w, phi, ma, mu)
        return float(e @ e)

    x0 = np.zeros(p + q + 1)
    x0[-1] = w.mean()
    css0 = objective(x0)
    scale = max(float(np.abs(w).max()), 1e-12)
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": max_iter,
            "maxfev": 4 * max_iter,
            "xatol": 1e-8,
            "fatol": 1e-12 * scale**2 * len(w),
        },
    )
    if not res.success:
        raise ArimaConvergenceError(f"CSS minimisation did not converge: {res.message}")
    theta = res.x if res.fun <= css0 else x0
    css = min(float(res.fun), css0)
    phi, ma, mu = theta[:p], theta[p : p + q], float(theta[-1])
    if not (_roots_ok(phi, -1.0) and _roots_ok(ma, 1.0)):
        raise UnstableRootsError(f"fitted roots lie on or inside the unit circle: {theta}")
    n_eff = len(w) - p
    return ArimaFit(
        spec=spec,
        ar_coeffs=tuple(float(v) for v in phi),
        ma_coeffs=tuple(float(v) for v in ma),
        intercept=mu,
        sigma2=css / n_eff,
        css=css,
        css_initial=css0,
        iterations=int(res.nit),
    )


def forecast(model: ArimaFit, history: Sequence[float], horizon: int) -> list[float]:
    """Iterate ``horizon`` one-step forecasts from ``history`` and integrate back to levels."""
    if horizon < 0:
        raise ArimaError("horizon must be nonnegative")
    spec = model.spec
    y = np.asarray(history, dtype=float)
    if len(y) < max(spec.p, spec.q) + spec.d:
        raise ArimaError(f"history of length {len(y)} too short for {spec}")
    if horizon == 0:
        return []

    phi = np.asarray(model.ar_coeffs)
    theta = np.asarray(model.ma_coeffs)
    mu = model.intercept
    w = _difference(y, spec.d)
    e = np.concatenate((np.zeros(min(spec.p, len(w))), _residuals(w, phi, theta, mu)))

    x = list(w - mu)
    errs = list(e)
    for _ in range(horizon):
        ar = sum(phi[i] * x[-1 - i] for i in range(spec.p) if i < len(x))
        ma = sum(theta[j] * errs[-1 - j] for j in range(spec.q) if j < len(errs))
        x.append(ar + ma)
        errs.append(0.0)
    w_future = np.asarray(x[len(w):]) + mu

    # undo differencing from the last observed levels
    levels = w_future
    for k in range(spec.d, 0, -1):
        anchor = np.diff(y, n=k - 1)[-1] if k - 1 else y[-1]
        levels = anchor + np.cumsum(levels)
    return [float(v) for v in levels]
