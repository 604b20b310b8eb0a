"""Synthetic end-to-end run touching every stage of the pipeline.

No published actual-inflation series exists for the fixtures, so the run
builds one: a known alpha (0.5) applied to the zeta deviation of the macro
example's t-transform, plus small Gaussian noise.  Everything downstream
(calibration, bands, phases, spectrum, ARIMA baseline, ranking) consumes
these synthetic data and writes its outputs to one directory.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import arima, fixtures, hmm, mcdm, spectral, stochastic, zeta
from .data import index_map, ingest_csv, t_transform
from .forecast import accuracy, calibrate_alpha, correct

TRUE_ALPHA = 0.5
NOISE_STD = 0.01


def run_synthetic(out: str | Path, seed: int = 0) -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(seed))
    written: list[Path] = []
    summary: dict = {"seed": seed, "true_alpha": TRUE_ALPHA}

    # ingest -> t-transform -> zeta signal
    series = ingest_csv(fixtures.path("macro_example.csv"))
    t = index_map(t_transform(series), "rank")
    signal = zeta.sample_signal(t, "real")
    summary["zeta_mean"] = signal.mean

    # baseline: published FPAS column; actual: known alpha plus noise
    baseline = fixtures.table1()["fpas"]
    truth = correct(baseline, signal, TRUE_ALPHA)
    actual = (np.asarray(truth.corrected) + rng.normal(0.0, NOISE_STD, len(baseline))).tolist()

    cal = calibrate_alpha(baseline, signal, actual)
    summary["alpha_star"] = cal.alpha_star
    summary["rmse_baseline"] = accuracy(baseline, actual).rmse
    summary["rmse_corrected"] = cal.rmse
    cal.forecast.write_csv(out / "forecast.csv")
    written.append(out / "forecast.csv")

    bands = stochastic.simulate(cal.forecast, stochastic.ShockSpec(std=0.8, iterations=5000, seed=seed))
    bands.write_csv(out / "bands.csv")
    written.append(out / "bands.csv")

    # ARIMA baseline on a longer synthetic path, scored on a holdout
    model = hmm.HmmModel.table4()
    states, obs = model.sample(60, seed)
    train, test = obs[:52], obs[52:]
    fit = arima.fit(train.tolist(), arima.ArimaSpec(1, 1, 1))
    arima_path = arima.forecast(fit, train.tolist(), len(test))
    acc = accuracy(arima_path, test.tolist())
    summary["arima"] = {"rmse": acc.rmse, "mape": acc.mape, "ar": list(fit.ar_coeffs), "ma": list(fit.ma_coeffs)}

    # phases: re-estimate from a perturbed start, then filter and decode
    start = hmm.HmmModel(model.initial, model.transition, model.means * 1.1, model.stds, model.states)
    bw = hmm.baum_welch(start, obs, max_iter=50)
    post = hmm.forward_filter(bw.model, obs)
    decoded, _ = hmm.viterbi(bw.model, obs)
    truth_labels = [model.states[i] for i in states]
    summary["phases"] = {
        "baum_welch_status": bw.status,
        "loglik": post.loglik,
        "viterbi_agreement": sum(a == b for a, b in zip(decoded, truth_labels)) / len(obs),
    }
    hmm.write_phase_csv(post, out / "phases.csv")
    written.append(out / "phases.csv")

    # spectrum of Re zeta(0.5 + i t) over a uniform grid
    step = math.pi / 16
    grid = step * np.arange(256)
    spec = spectral.decompose(zeta.sample_signal(grid, "real").values, step)
    spec.write_csv(out / "spectrum.csv")
    written.append(out / "spectrum.csv")
    summary["spectral_peaks"] = [list(p) for p in spectral.top_peaks(spec, 3)]

    # zero candidates and their density
    cands = zeta.locate_zero_candidates(10.0, 50.0, 0.1, 1e-3)
    summary["zero_candidates"] = [c for c, _ in cands]
    summary["zero_density"] = zeta.zero_density(cands, 10.0, 10.0, 50.0)

    rank = mcdm.score_row_sum(fixtures.table5())
    rank.write_bar_csv(out / "ranking.csv")
    written.append(out / "ranking.csv")
    summary["ranking"] = rank.order

    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(out / "summary.json")
    return written
