"""Acceptance criteria, one test each, at the stated tolerances and runtime limits.

Each test records a PASS/FAIL line; the lines are printed as they happen and
collected in a terminal summary section at the end of the pytest run.
Run directly with ``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from contextlib import contextmanager
from decimal import Decimal

import numpy as np
import pytest

from oracles import direct_dft, hmm_brute_force
from zetacast import fixtures, hmm, spectral, stochastic, zeta
from zetacast.cli import main
from zetacast.forecast import DEFAULT_ALPHA_GRID, TABLE_ZETA_MEAN, calibrate_alpha, correct

RESULTS = []

# Hardy-Z bisection oracle heights (tests/oracles.py), frozen
ORACLE_ZEROS = [14.134725141734695, 21.022039638771552, 25.01085758014569]


@contextmanager
def criterion(name, limit):
    start = time.perf_counter()
    detail = ""
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        ok = elapsed < limit
        if not ok:
            detail = f"runtime limit {limit} s exceeded"
            raise AssertionError(f"{name}: took {elapsed:.2f} s, limit {limit} s")
    except AssertionError as exc:
        detail = detail or str(exc).splitlines()[0]
        raise
    finally:
        elapsed = time.perf_counter() - start
        status = "PASS" if ok else "FAIL"
        RESULTS.append((name, status, elapsed, detail))
        print(f"{status}  {name}  ({elapsed:.2f} s)")


def test_table2_reproduction():
    with criterion("Table 2 corrections at t=1,3,5,6 within 0.01", 1.0):
        t1 = fixtures.table1()
        fc = correct(t1["fpas"], zeta.ZetaSignal.from_values(t1["zeta"], t1.index), 0.5, TABLE_ZETA_MEAN)
        got = dict(zip(fc.t, fc.delta))
        for t, want in zip((1, 3, 5, 6), (-0.04, 0.04, -0.055, 0.05)):
            assert abs(got[t] - want) <= 0.01, (t, got[t], want)
        for t, printed in zip(fixtures.table2().index, fixtures.table2()["delta"]):
            assert abs(got[t] - printed) <= 0.01 + 1e-12  # -0.055 is printed as -0.06


def test_zeta_mean_of_fixture():
    with criterion("zeta mean of the 10 fixture values is 0.73 within 1e-12", 1.0):
        sig = zeta.ZetaSignal.from_values(fixtures.table1()["zeta"])
        assert len(sig) == 10
        assert abs(sig.mean - 0.73) <= 1e-12


def test_table5_reproduction():
    with criterion("Table 5 row sums within 0.001 and FPAS+zeta > ARIMA > FPAS", 1.0):
        from zetacast.mcdm import score_row_sum

        rep = score_row_sum(fixtures.table5())
        assert list(rep.models) == ["FPAS", "FPAS+zeta", "ARIMA"]
        for got, printed in zip(rep.scores, ("0.265", "0.875", "0.307")):
            # the printed 0.875 sits exactly 0.001 from the row sum 0.874; compare in decimal
            assert abs(Decimal(repr(float(got))) - Decimal(printed)) <= Decimal("0.001")
        assert rep.order == ["FPAS+zeta", "ARIMA", "FPAS"]


def test_zeta_evaluator():
    with criterion("zeta(2), zeta(0), first zero and first three candidates", 10.0):
        assert abs(zeta.evaluate(2) - math.pi**2 / 6) <= 1e-10
        assert abs(zeta.evaluate(0) - (-0.5)) <= 1e-10
        assert abs(zeta.evaluate(complex(0.5, 14.134725))) < 1e-6
        cands = zeta.locate_zero_candidates(10.0, 30.0, 0.1, 1e-3)
        assert len(cands) >= 3
        for (t, _), ref in zip(cands[:3], ORACLE_ZEROS):
            assert abs(t - ref) <= 1e-2


def _random_model(rng, n=4):
    return hmm.HmmModel(
        rng.dirichlet(np.ones(n)),
        rng.dirichlet(np.ones(n) * 2, size=n),
        np.sort(rng.normal(0, 4.0, n)),
        rng.uniform(0.5, 2.0, n),
        tuple(f"s{i}" for i in range(n)),
    )


def test_hmm_oracle_equivalence():
    with criterion("HMM forward/Viterbi vs enumeration; Baum-Welch monotone", 30.0):
        rng = np.random.default_rng(2024)
        instances = [(_random_model(rng), T) for T in range(1, 9) for _ in range(3)]
        instances += [(hmm.HmmModel.table4(), T) for T in range(1, 9)]
        for k, (m, T) in enumerate(instances):
            _, obs = m.sample(T, seed=k)
            ll, best_lp, best_path, *_ = hmm_brute_force(m.initial, m.transition, m.means, m.stds, obs, filtered=False)
            assert abs(hmm.forward_filter(m, obs).loglik - ll) <= 1e-8
            path, lp = hmm.viterbi(m, obs)
            assert abs(lp - best_lp) <= 1e-8
            assert abs(hmm.path_log_prob(m, obs, [m.states.index(s) for s in path]) - best_lp) <= 1e-8

        for k in range(20):
            truth = _random_model(rng)
            _, obs = truth.sample(150, seed=1000 + k)
            start = hmm.HmmModel(
                np.full(4, 0.25),
                np.full((4, 4), 0.25),
                np.quantile(obs, [0.2, 0.4, 0.6, 0.8]),
                np.full(4, obs.std()),
                truth.states,
            )
            model, prev = start, -np.inf
            for _ in range(50):
                e = hmm.expectation(model, obs)
                assert e.loglik >= prev - 1e-8, (k, e.loglik, prev)
                prev = e.loglik
                model = hmm.maximization(model, obs, e)


def test_spectral():
    with criterion("Parseval on 100 signals; three-cosine peaks at 0.5, 1, 2", 5.0):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(1, 600))
            x = rng.normal(0, rng.uniform(0.1, 10), n)
            spec = spectral.decompose(x, 1.0)
            energy = float(np.sum(x**2))
            assert abs(n * spec.power.sum() - energy) <= 1e-9 * energy
        # spot-check the transform itself against the O(N^2) sum
        x = rng.normal(size=97)
        np.testing.assert_allclose(spectral.decompose(x, 1.0).amplitudes * 97, direct_dft(x), atol=1e-9)

        dt, n = math.pi / 16, 256  # omega resolution 2 pi / (n dt) = 0.125
        t = dt * np.arange(n)
        x = 1.0 * np.cos(0.5 * t) + 0.8 * np.cos(1.0 * t) + 0.6 * np.cos(2.0 * t)
        spec = spectral.decompose(x, dt)
        peaks = spectral.top_peaks(spec, 3)
        assert sorted(round(w, 12) for w, _ in peaks) == [0.5, 1.0, 2.0]
        amp = np.abs(spec.amplitudes)
        pos = spec.frequencies > 0
        others = pos & ~np.isin(np.round(spec.frequencies, 12), [0.5, 1.0, 2.0])
        assert amp[others].max() < 1e-12 * amp[pos].max()


def test_monte_carlo():
    with criterion("Monte Carlo N=5000 sigma=0.8: std, mean, bit-identical reruns", 5.0):
        t1 = fixtures.table1()
        fc = correct(t1["fpas"], zeta.ZetaSignal.from_values(t1["zeta"], t1.index), 0.5, TABLE_ZETA_MEAN)
        spec = stochastic.ShockSpec(std=0.8, iterations=5000)
        bands = stochastic.simulate(fc, spec)
        assert np.all((bands.std >= 0.77) & (bands.std <= 0.83)), bands.std
        assert np.abs(bands.mean - np.asarray(fc.corrected)).max() <= 0.034
        shocks = stochastic.shock_paths(len(fc.t), spec)
        assert 0.77 <= shocks.std(ddof=1) <= 0.83
        again = stochastic.simulate(fc, spec, workers=4)
        for a, b in zip((bands.mean, bands.std, bands.q05, bands.q50, bands.q95),
                        (again.mean, again.std, again.q05, again.q50, again.q95)):
            assert np.asarray(a).tobytes() == np.asarray(b).tobytes()


def test_calibration():
    with criterion("calibration: exact alpha 0.5 and grid minimum on 50 noisy instances", 5.0):
        t1 = fixtures.table1()
        sig = zeta.ZetaSignal.from_values(t1["zeta"], t1.index)
        actual = [b + 0.5 * (z - sig.mean) for b, z in zip(t1["fpas"], t1["zeta"])]
        cal = calibrate_alpha(t1["fpas"], sig, actual)
        assert cal.alpha_star == 0.5 and cal.rmse < 1e-12

        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(4, 40))
            s = zeta.ZetaSignal.from_values(rng.normal(0.73, 0.15, n))
            base = rng.normal(4.0, 0.5, n)
            act = base + rng.uniform(0, 1.2) * (s.values - s.mean) + rng.normal(0, 0.1, n)
            got = calibrate_alpha(base, s, act).alpha_star
            errs = [
                math.sqrt(math.fsum((b + a * (z - s.mean) - y) ** 2 for b, z, y in zip(base, s.values, act)) / n)
                for a in DEFAULT_ALPHA_GRID
            ]
            assert got == DEFAULT_ALPHA_GRID[int(np.argmin(errs))]


def test_synthetic_end_to_end(tmp_path):
    # the published Table 3 accuracies and the early-warning claims have no data
    # behind them, so a synthetic run through every stage stands in for them
    with criterion("synthetic end-to-end run through every stage", 30.0):
        import json

        assert main(["demo", "--out", str(tmp_path)]) == 0
        s = json.loads((tmp_path / "summary.json").read_text())
        assert s["alpha_star"] == s["true_alpha"] == 0.5
        assert s["rmse_corrected"] < s["rmse_baseline"]
        assert s["ranking"] == ["FPAS+zeta", "ARIMA", "FPAS"]
        assert s["phases"]["viterbi_agreement"] > 0.5
        for (t, ref) in zip(s["zero_candidates"], ORACLE_ZEROS):
            assert abs(t - ref) <= 1e-2
        assert main(["replay", str(tmp_path / "manifest.json")]) == 0


def test_table3_and_accuracy_claims_not_reproducible():
    name = "Table 3 RMSE/MAPE, 87% accuracy, 7-week lead"
    reason = "no actual-inflation series or protocol published; covered by the synthetic run"
    RESULTS.append((name, "N/A", 0.0, reason))
    print(f"N/A   {name}  ({reason})")
    pytest.skip(reason)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
