"""Four-phase Gaussian hidden Markov model over inflation observations.

Forward/backward passes use per-step scaling (the log-likelihood is the sum
of log normalisers); Viterbi runs in log space.  States default to the phase labels
Stable, Growth, Volatile, Crash with the published transition matrix.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

PHASES = ("Stable", "Growth", "Volatile", "Crash")
STD_FLOOR = 1e-4

TABLE4_TRANSITION = np.array(
    [
        [0.78, 0.15, 0.05, 0.02],
        [0.20, 0.65, 0.10, 0.05],
        [0.10, 0.25, 0.50, 0.15],
        [0.05, 0.20, 0.30, 0.45],
    ]
)
# Illustrative phase emissions (inflation, percent YoY); no values are published.
DEFAULT_MEANS = (3.0, 5.0, 8.0, 12.0)
DEFAULT_STDS = (0.5, 1.0, 2.0, 3.0)

_LOG_2PI = math.log(2.0 * math.pi)


class HmmError(ValueError):
    pass


class ZeroLikelihoodError(HmmError):
    """The observation sequence has zero probability under the model."""


class StateCollapseError(HmmError):
    """A state's emission spread fell below the floor during re-estimation."""


def stationary_distribution(transition: np.ndarray, tol: float = 1e-14, max_iter: int = 100_000) -> np.ndarray:
    """Left Perron vector of a row-stochastic matrix by power iteration."""
    a = np.asarray(transition, dtype=float)
    pi = np.full(a.shape[0], 1.0 / a.shape[0])
    for _ in range(max_iter):
        nxt = pi @ a
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < tol:
            return nxt
        pi = nxt
    raise HmmError("power iteration for the stationary distribution did not converge")


@dataclass(frozen=True, eq=False)
class HmmModel:
    initial: np.ndarray
    transition: np.ndarray
    means: np.ndarray
    stds: np.ndarray
    states: tuple[str, ...] = PHASES

    def __post_init__(self) -> None:
        for name in ("initial", "transition", "means", "stds"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.states)
        if self.initial.shape != (n,) or self.transition.shape != (n, n):
            raise HmmError(f"shapes do not match {n} states")
        if self.means.shape != (n,) or self.stds.shape != (n,):
            raise HmmError("need one emission mean and std per state")
        for probs, what in ((self.initial, "initial"), (self.transition, "transition")):
            if np.any(probs < 0) or np.any(probs > 1):
                raise HmmError(f"{what} probabilities outside [0, 1]")
        if abs(self.initial.sum() - 1) > 1e-9:
            raise HmmError("initial distribution does not sum to 1")
        if np.any(np.abs(self.transition.sum(axis=1) - 1) > 1e-9):
            raise HmmError("transition rows do not sum to 1")
        if np.any(self.stds <= 0) or not np.all(np.isfinite(self.means)):
            raise HmmError("emission stds must be positive and means finite")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @classmethod
    def table4(
        cls,
        means: Sequence[float] = DEFAULT_MEANS,
        stds: Sequence[float] = DEFAULT_STDS,
        initial: Sequence[float] | None = None,
    ) -> HmmModel:
        """Published four-phase transition matrix; initial defaults to its stationary law."""
        init = stationary_distribution(TABLE4_TRANSITION) if initial is None else initial
        return cls(init, TABLE4_TRANSITION, means, stds)

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "initial": self.initial.tolist(),
            "transition": self.transition.tolist(),
            "emissions": [
                {"mean": float(m), "std": float(s)} for m, s in zip(self.means, self.stds)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> HmmModel:
        em = d["emissions"]
        return cls(
            d["initial"],
            d["transition"],
            [e["mean"] for e in em],
            [e["std"] for e in em],
            tuple(d["states"]),
        )

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text

    @classmethod
    def load_json(cls, path: str | Path) -> HmmModel:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def sample(self, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw (state indices, observations) of length ``n``."""
        rng = np.random.default_rng(seed)
        states = np.empty(n, dtype=int)
        states[0] = rng.choice(self.n_states, p=self.initial)
        for t in range(1, n):
            states[t] = rng.choice(self.n_states, p=self.transition[states[t - 1]])
        obs = rng.normal(self.means[states], self.stds[states])
        return states, obs


def log_emissions(model: HmmModel, obs: Sequence[float]) -> np.ndarray:
    x = np.asarray(obs, dtype=float)[:, None]
    z = (x - model.means) / model.stds
    with np.errstate(over="ignore"):
        return -0.5 * z**2 - np.log(model.stds) - 0.5 * _LOG_2PI


def _log(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


def _check_obs(obs: Sequence[float]) -> np.ndarray:
    x = np.asarray(obs, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise HmmError("observation sequence is empty")
    if not np.all(np.isfinite(x)):
        raise HmmError("observations must be finite")
    return x


@dataclass(frozen=True, eq=False)
class PhasePosterior:
    probs: np.ndarray
    loglik: float
    states: tuple[str, ...] = PHASES

    def __post_init__(self) -> None:
        if np.any(np.abs(self.probs.sum(axis=1) - 1) > 1e-9):
            raise HmmError("posterior rows do not sum to 1")


class _Scaled(NamedTuple):
    alpha: np.ndarray  # filtered probabilities, rows sum to 1
    scale: np.ndarray  # per-step normalisers of the shifted emissions
    b: np.ndarray  # emission likelihoods shifted by their per-step maximum
    loglik: float


def _forward(model: HmmModel, x: np.ndarray) -> _Scaled:
    # Scaled forward pass; equivalent to the log-space recursion but with one
    # normaliser per step, and emissions shifted by their row maximum first.
    log_b = log_emissions(model, x)
    shift = log_b.max(axis=1, keepdims=True)
    if not np.all(np.isfinite(shift)):
        raise ZeroLikelihoodError("observation sequence has zero probability under the model")
    b = np.exp(log_b - shift)
    a = model.transition
    T, n = b.shape
    alpha = np.empty((T, n))
    scale = np.empty(T)
    cur = model.initial * b[0]
    for t in range(T):
        if t:
            cur = (alpha[t - 1] @ a) * b[t]
        c = cur.sum()
        if not c > 0:
            raise ZeroLikelihoodError(f"observation sequence has zero probability (step {t})")
        scale[t] = c
        alpha[t] = cur / c
    loglik = float(np.log(scale).sum() + shift.sum())
    return _Scaled(alpha, scale, b, loglik)


def _backward(model: HmmModel, fw: _Scaled) -> np.ndarray:
    a = model.transition
    beta = np.ones_like(fw.alpha)
    for t in range(len(beta) - 2, -1, -1):
        beta[t] = a @ (fw.b[t + 1] * beta[t + 1]) / fw.scale[t + 1]
    return beta


def forward_filter(model: HmmModel, obs: Sequence[float]) -> PhasePosterior:
    """Filtered phase probabilities P(s_t | O_1..O_t) and the sequence log-likelihood."""
    fw = _forward(model, _check_obs(obs))
    return PhasePosterior(fw.alpha, fw.loglik, model.states)


def smooth(model: HmmModel, obs: Sequence[float]) -> PhasePosterior:
    """Smoothed phase probabilities P(s_t | O_1..O_T)."""
    fw = _forward(model, _check_obs(obs))
    gamma = fw.alpha * _backward(model, fw)
    return PhasePosterior(gamma / gamma.sum(axis=1, keepdims=True), fw.loglik, model.states)


def viterbi(model: HmmModel, obs: Sequence[float]) -> tuple[list[str], float]:
    """Most probable state path and its joint log-probability.

    Ties are resolved toward the lowest state index at every step.
    """
    x = _check_obs(obs)
    log_b = log_emissions(model, x)
    log_a = _log(model.transition)
    T, n = log_b.shape
    delta = _log(model.initial) + log_b[0]
    back = np.zeros((T, n), dtype=int)
    for t in range(1, T):
        cand = delta[:, None] + log_a
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(n)] + log_b[t]
    last = int(np.argmax(delta))
    log_prob = float(delta[last])
    if not math.isfinite(log_prob):
        raise ZeroLikelihoodError("every state path has zero probability")
    path = [last]
    for t in range(T - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return [model.states[i] for i in path], log_prob


def path_log_prob(model: HmmModel, obs: Sequence[float], path: Sequence[int]) -> float:
    """Joint log-probability of one state path (indices) and the observations."""
    log_b = log_emissions(model, _check_obs(obs))
    log_a = _log(model.transition)
    lp = _log(model.initial)[path[0]] + log_b[0, path[0]]
    for t in range(1, len(path)):
        lp += log_a[path[t - 1], path[t]] + log_b[t, path[t]]
    return float(lp)


class EStep(NamedTuple):
    gamma: np.ndarray  # (T, n) state posteriors
    xi: np.ndarray  # (T-1, n, n) transition posteriors
    loglik: float


def expectation(model: HmmModel, obs: Sequence[float]) -> EStep:
    fw = _forward(model, _check_obs(obs))
    beta = _backward(model, fw)
    gamma = fw.alpha * beta
    gamma /= gamma.sum(axis=1, keepdims=True)
    xi = (
        fw.alpha[:-1, :, None]
        * model.transition[None]
        * ((fw.b[1:] * beta[1:]) / fw.scale[1:, None])[:, None, :]
    )
    return EStep(gamma, xi, fw.loglik)


def maximization(model: HmmModel, obs: Sequence[float], e: EStep, std_floor: float = STD_FLOOR) -> HmmModel:
    x = np.asarray(obs, dtype=float)
    occupancy = e.gamma.sum(axis=0)
    if np.any(occupancy <= 0):
        raise StateCollapseError(f"state(s) {np.flatnonzero(occupancy <= 0).tolist()} lost all mass")
    initial = e.gamma[0] / e.gamma[0].sum()
    trans = e.xi.sum(axis=0)
    row = trans.sum(axis=1, keepdims=True)
    # a state only seen at the last step keeps its previous transition row
    trans = np.where(row > 0, trans / np.where(row > 0, row, 1.0), model.transition)
    means = (e.gamma * x[:, None]).sum(axis=0) / occupancy
    var = (e.gamma * (x[:, None] - means) ** 2).sum(axis=0) / occupancy
    stds = np.sqrt(var)
    if np.any(stds < std_floor):
        bad = [model.states[i] for i in np.flatnonzero(stds < std_floor)]
        raise StateCollapseError(f"emission std of {bad} fell below {std_floor}")
    return HmmModel(initial, trans, means, stds, model.states)


class BaumWelchResult(NamedTuple):
    model: HmmModel
    loglik_trace: list[float]
    status: str  # "converged" or "max_iter"


def baum_welch(
    init: HmmModel,
    obs: Sequence[float],
    max_iter: int = 100,
    tol: float = 1e-6,
    std_floor: float = STD_FLOOR,
) -> BaumWelchResult:
    """EM re-estimation of initial, transition and Gaussian emission parameters.

    ``loglik_trace[k]`` is the log-likelihood of the model after k updates.
    Stops once an update improves the log-likelihood by less than ``tol``.
    """
    if max_iter < 1:
        raise HmmError("max_iter must be at least 1")
    if not tol > 0:
        raise HmmError("tol must be positive")
    x = _check_obs(obs)
    model = init
    e = expectation(model, x)
    trace = [e.loglik]
    for _ in range(max_iter):
        model = maximization(model, x, e, std_floor)
        e = expectation(model, x)
        trace.append(e.loglik)
        if trace[-1] - trace[-2] < tol:
            return BaumWelchResult(model, trace, "converged")
    return BaumWelchResult(model, trace, "max_iter")


def phase_distribution(posterior: PhasePosterior) -> np.ndarray:
    """Per-period phase shares in percent (rows sum to 100)."""
    p = np.asarray(posterior.probs, dtype=float)
    return 100.0 * p / p.sum(axis=1, keepdims=True)


def write_phase_csv(posterior: PhasePosterior, path: str | Path, periods: Sequence | None = None) -> None:
    shares = phase_distribution(posterior)
    periods = range(1, len(shares) + 1) if periods is None else periods
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["period", *posterior.states])
        for per, row in zip(periods, shares):
            w.writerow([per, *(repr(float(v)) for v in row)])
