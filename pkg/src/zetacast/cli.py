"""Command-line pipeline: one subcommand per stage, CSV/JSON outputs, run manifests.

Options may come from an INI file (``--config``, section ``[zetacast]``,
keys named like the long flags with dashes or underscores); flags given on the
command line win.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import logging
import math
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__, arima, fixtures, hmm, mcdm, spectral, stochastic, zeta
from .data import CsvSchema, DataError, ForecastTable, index_map, ingest_csv, load_table, t_transform
from .forecast import Calibration, calibrate_alpha, correct

log = logging.getLogger("zetacast")

MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict
    outputs: dict[str, str]
    seed: int | None
    version: str = __version__
    started: str = ""
    finished: str = ""

    def write(self, out_dir: Path) -> Path:
        p = out_dir / MANIFEST
        p.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return p

    @classmethod
    def load(cls, path: str | Path) -> RunManifest:
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    return [int(v) for v in _floats(text)]


def _table(spec: str) -> ForecastTable:
    """``fixture:table1`` style names resolve to the shipped fixtures."""
    if spec.startswith("fixture:"):
        return load_table(fixtures.path(spec.split(":", 1)[1] + ".csv"))
    if not Path(spec).exists():
        raise UsageError(f"input file not found: {spec}")
    return load_table(spec)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# --------------------------------------------------------------------- stages


def run_zeta(a, out: Path) -> list[Path]:
    if not (a.t_max > a.t_min and a.step > 0):
        raise UsageError(f"empty t range [{a.t_min}, {a.t_max}] with step {a.step}")
    n = int(math.floor((a.t_max - a.t_min) / a.step + 1e-9))
    ts = a.t_min + a.step * np.arange(n + 1)
    sig = zeta.sample_signal(ts, a.mode, a.tol)
    p = out / "zeta_signal.csv"
    with p.open("w", encoding="utf-8") as fh:
        fh.write("t,re,im,abs,signal\n")
        for s in sig.samples:
            fh.write(f"{s.t!r},{s.value.real!r},{s.value.imag!r},{abs(s.value)!r},{s.signal!r}\n")
    written = [p]
    if a.t_min > 0:
        cands = zeta.locate_zero_candidates(a.t_min, a.t_max, a.step, a.zero_threshold, a.tol)
        zp = out / "zeta_zeros.csv"
        with zp.open("w", encoding="utf-8") as fh:
            fh.write("t,abs\n")
            fh.writelines(f"{t!r},{m!r}\n" for t, m in cands)
        written.append(zp)
        if a.density_window:
            dp = out / "zeta_zero_density.csv"
            with dp.open("w", encoding="utf-8") as fh:
                fh.write("center,density\n")
                for c, d in zeta.zero_density(cands, a.density_window, a.t_min, a.t_max):
                    fh.write(f"{c!r},{d!r}\n")
            written.append(dp)
        log.info("%d zero candidates below %g", len(cands), a.zero_threshold)
    _write_json(out / "zeta_summary.json", {"mean": sig.mean, "n": len(sig), "mode": a.mode})
    return written + [out / "zeta_summary.json"]


def _signal_and_baseline(a) -> tuple[zeta.ZetaSignal, list[float], ForecastTable]:
    table = _table(a.table)
    if a.baseline_column not in table.columns:
        raise UsageError(f"table has no baseline column {a.baseline_column!r}")
    baseline = table[a.baseline_column]
    if a.macro:
        if not Path(a.macro).exists():
            raise UsageError(f"input file not found: {a.macro}")
        series = ingest_csv(a.macro, CsvSchema(beta=a.beta))
        t = index_map(t_transform(series), a.index_mode)
        signal = zeta.sample_signal(t, a.signal_mode)
    else:
        if a.zeta_column not in table.columns:
            raise UsageError(f"table has no zeta column {a.zeta_column!r}")
        signal = zeta.ZetaSignal.from_values(table[a.zeta_column], table.index)
    if len(signal) != len(baseline):
        raise UsageError(f"signal has {len(signal)} periods, baseline {len(baseline)}")
    return signal, baseline, table


def run_forecast(a, out: Path) -> list[Path]:
    signal, baseline, _ = _signal_and_baseline(a)
    fc = correct(baseline, signal, a.alpha, a.zeta_mean)
    fc.write_csv(out / "forecast.csv")
    _write_json(out / "forecast.json", fc.to_dict())
    return [out / "forecast.csv", out / "forecast.json"]


def run_calibrate(a, out: Path) -> list[Path]:
    signal, baseline, table = _signal_and_baseline(a)
    if a.actual_column not in table.columns:
        raise UsageError(f"table has no actual-inflation column {a.actual_column!r}")
    cal: Calibration = calibrate_alpha(baseline, signal, table[a.actual_column], a.alpha_grid, a.zeta_mean)
    _write_json(out / "calibration.json", cal.to_dict())
    cal.forecast.write_csv(out / "calibrated_forecast.csv")
    log.info("alpha* = %g (RMSE %.6g)", cal.alpha_star, cal.rmse)
    return [out / "calibration.json", out / "calibrated_forecast.csv"]


def run_simulate(a, out: Path) -> list[Path]:
    signal, baseline, _ = _signal_and_baseline(a)
    fc = correct(baseline, signal, a.alpha, a.zeta_mean)
    spec = stochastic.ShockSpec(std=a.sigma, iterations=a.iterations, seed=a.seed)
    bands = stochastic.simulate(fc, spec, workers=a.workers)
    bands.write_csv(out / "bands.csv")
    return [out / "bands.csv"]


def _observations(a) -> np.ndarray:
    if a.obs:
        table = _table(a.obs)
        if a.obs_column not in table.columns:
            raise UsageError(f"observation table has no column {a.obs_column!r}")
        return np.asarray(table[a.obs_column])
    model = hmm.HmmModel.table4()
    _, obs = model.sample(a.synthetic, a.seed)
    return obs


def run_phases(a, out: Path) -> list[Path]:
    model = hmm.HmmModel.load_json(a.model) if a.model else hmm.HmmModel.table4()
    obs = _observations(a)
    report: dict = {"n_obs": int(len(obs))}
    if a.train:
        res = hmm.baum_welch(model, obs, max_iter=a.train, tol=a.train_tol)
        model = res.model
        report.update(status=res.status, loglik_trace=res.loglik_trace)
    post = hmm.forward_filter(model, obs)
    path, lp = hmm.viterbi(model, obs)
    hmm.write_phase_csv(post, out / "phases.csv")
    with (out / "viterbi.csv").open("w", encoding="utf-8") as fh:
        fh.write("period,observation,phase\n")
        fh.writelines(f"{i + 1},{x!r},{s}\n" for i, (x, s) in enumerate(zip(obs.tolist(), path)))
    model.to_json(out / "hmm_model.json")
    report.update(loglik=post.loglik, viterbi_log_prob=lp)
    _write_json(out / "phases.json", report)
    return [out / "phases.csv", out / "viterbi.csv", out / "hmm_model.json", out / "phases.json"]


def run_spectrum(a, out: Path) -> list[Path]:
    if a.input:
        table = _table(a.input)
        if a.column not in table.columns:
            raise UsageError(f"signal table has no column {a.column!r}")
        x = np.asarray(table[a.column])
        spacing = a.step
    else:
        n = int(a.samples)
        ts = a.t_min + a.step * np.arange(n)
        x = zeta.sample_signal(ts, a.signal_mode).values
        spacing = a.step
    spec = spectral.decompose(x, spacing, window=a.window)
    spec.write_csv(out / "spectrum.csv")
    k = min(a.peaks, int(np.count_nonzero(spec.frequencies > 0)))
    peaks = spectral.top_peaks(spec, k) if k else []
    _write_json(out / "peaks.json", [{"omega": w, "amplitude": m} for w, m in peaks])
    return [out / "spectrum.csv", out / "peaks.json"]


def run_compare(a, out: Path) -> list[Path]:
    path = fixtures.path("table5.csv") if a.matrix == "fixture:table5" else Path(a.matrix)
    if not path.exists():
        raise UsageError(f"input file not found: {a.matrix}")
    weights = None
    extra = {}
    if a.ahp:
        pairwise = np.loadtxt(a.ahp, delimiter=",", ndmin=2)
        weights, cr = mcdm.ahp_weights(pairwise)
        extra = {"ahp_weights": weights.tolist(), "consistency_ratio": cr}
    matrix = mcdm.DecisionMatrix.from_csv(path, weights)
    methods = list(mcdm.SCORERS) if a.method == "all" else [a.method]
    written = []
    reports = {}
    for name in methods:
        rep = mcdm.SCORERS[name](matrix)
        reports[name] = rep.to_dict()
        bar = out / f"ranking_{name}.csv"
        rep.write_bar_csv(bar)
        written.append(bar)
        log.info("%s: %s", name, " > ".join(rep.order))
    _write_json(out / "ranking.json", {"methods": reports, **extra})
    return [out / "ranking.json", *written]


def run_arima(a, out: Path) -> list[Path]:
    table = _table(a.table)
    if a.column not in table.columns:
        raise UsageError(f"table has no column {a.column!r}")
    y = table[a.column]
    fit = arima.fit(y, a.arima)
    path = arima.forecast(fit, y, a.horizon)
    _write_json(
        out / "arima.json",
        {
            "order": [fit.spec.p, fit.spec.d, fit.spec.q],
            "ar": list(fit.ar_coeffs),
            "ma": list(fit.ma_coeffs),
            "intercept": fit.intercept,
            "sigma2": fit.sigma2,
            "forecast": path,
        },
    )
    return [out / "arima.json"]


def run_demo(a, out: Path) -> list[Path]:
    from .demo import run_synthetic

    return run_synthetic(out, seed=a.seed)


# --------------------------------------------------------------------- parser


def _forecast_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", default="fixture:table1", help="forecast table CSV or fixture:NAME")
    p.add_argument("--baseline-column", default="fpas")
    p.add_argument("--zeta-column", default="zeta")
    p.add_argument("--macro", help="macro CSV; derive the signal from zeta(0.5 + i t) instead of the table")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--index-mode", choices=["raw", "rank"], default="rank")
    p.add_argument("--signal-mode", choices=["real", "modulus"], default="real")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--zeta-mean", type=float, help="fixed neutral point (default: window mean)")


STAGES: dict[str, Callable] = {
    "zeta": run_zeta,
    "forecast": run_forecast,
    "calibrate": run_calibrate,
    "phases": run_phases,
    "spectrum": run_spectrum,
    "simulate": run_simulate,
    "compare": run_compare,
    "arima": run_arima,
    "demo": run_demo,
}


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="zetacast", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [zetacast] section")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["zeta"] = sub.add_parser("zeta", parents=[common], help="sample zeta(0.5 + i t)")
    p.add_argument("--t-min", type=float, default=10.0)
    p.add_argument("--t-max", type=float, default=30.0)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--mode", choices=["real", "modulus"], default="real")
    p.add_argument("--tol", type=float, default=zeta.DEFAULT_TOL)
    p.add_argument("--zero-threshold", type=float, default=1e-3)
    p.add_argument("--density-window", type=float, default=0.0)

    p = subs["forecast"] = sub.add_parser("forecast", parents=[common], help="apply the zeta correction")
    _forecast_inputs(p)

    p = subs["calibrate"] = sub.add_parser("calibrate", parents=[common], help="grid-search alpha by RMSE")
    _forecast_inputs(p)
    p.add_argument("--actual-column", default="actual")
    p.add_argument("--alpha-grid", type=_floats, default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")

    p = subs["simulate"] = sub.add_parser("simulate", parents=[common], help="Monte Carlo shock bands")
    _forecast_inputs(p)
    p.add_argument("--sigma", type=float, default=0.8)
    p.add_argument("--iterations", type=int, default=5000)
    p.add_argument("--workers", type=int, default=1)

    p = subs["phases"] = sub.add_parser("phases", parents=[common], help="HMM phase identification")
    p.add_argument("--model", help="HMM JSON (default: four-phase published transitions)")
    p.add_argument("--obs", help="observation table CSV or fixture:NAME")
    p.add_argument("--obs-column", default="inflation")
    p.add_argument("--synthetic", type=int, default=52, help="synthetic observations when --obs is absent")
    p.add_argument("--train", type=int, default=0, help="Baum-Welch iterations (0 = none)")
    p.add_argument("--train-tol", type=float, default=1e-6)

    p = subs["spectrum"] = sub.add_parser("spectrum", parents=[common], help="Fourier spectrum of the signal")
    p.add_argument("--input", help="table CSV holding the signal; default samples zeta")
    p.add_argument("--column", default="signal")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--step", type=float, default=math.pi / 16)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--signal-mode", choices=["real", "modulus"], default="real")
    p.add_argument("--window", choices=["hann"], default=None)
    p.add_argument("--peaks", type=int, default=3)

    p = subs["compare"] = sub.add_parser("compare", parents=[common], help="AHP/TOPSIS model ranking")
    p.add_argument("--matrix", default="fixture:table5")
    p.add_argument("--method", choices=[*mcdm.SCORERS, "all"], default="row-sum")
    p.add_argument("--ahp", help="CSV pairwise comparison matrix for criterion weights")

    p = subs["arima"] = sub.add_parser("arima", parents=[common], help="ARIMA baseline forecast")
    p.add_argument("--table", default="fixture:table1")
    p.add_argument("--column", default="fpas")
    p.add_argument("--arima", type=arima.ArimaSpec.parse, default="1,1,1", help="order as p,d,q")
    p.add_argument("--horizon", type=int, default=4)

    subs["demo"] = sub.add_parser("demo", parents=[common], help="synthetic end-to-end run of every stage")

    p = sub.add_parser("replay", help="re-run a manifest and compare output checksums")
    p.add_argument("manifest")
    p.add_argument("--out", help="directory for the replayed outputs (default: temporary)")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser, subs


def _read_config(path: str) -> dict[str, str]:
    cp = configparser.ConfigParser()
    if not cp.read(path, encoding="utf-8"):
        raise UsageError(f"config file not found: {path}")
    if not cp.has_section("zetacast"):
        raise UsageError(f"{path}: missing [zetacast] section")
    return {k.replace("-", "_"): v for k, v in cp.items("zetacast")}


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        cfg = _read_config(args.config)
        sp = subs[args.command]
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for k, v in cfg.items():
            if k not in known:
                raise UsageError(f"{args.config}: unknown option {k!r} for {args.command}")
            if isinstance(known[k], argparse._StoreTrueAction):
                defaults[k] = v.strip().lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = v
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _snapshot(args: argparse.Namespace) -> dict:
    snap = {}
    for k, v in vars(args).items():
        if k in ("config", "verbose", "out"):
            continue
        if isinstance(v, arima.ArimaSpec):
            v = f"{v.p},{v.d},{v.q}"
        snap[k] = v
    return snap


def execute(args: argparse.Namespace) -> RunManifest:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    files = STAGES[args.command](args, out)
    manifest = RunManifest(
        command=args.command,
        config=_snapshot(args),
        outputs={str(p.relative_to(out)): sha256(p) for p in files},
        seed=getattr(args, "seed", None),
        started=started,
        finished=_now(),
    )
    manifest.write(out)
    return manifest


def replay(manifest_path: str, out: str | None) -> bool:
    old = RunManifest.load(manifest_path)
    if old.command not in STAGES:
        raise UsageError(f"manifest has unknown command {old.command!r}")
    argv = [old.command]
    _, subs = build_parser()
    ns = argparse.Namespace(**old.config)
    if old.command in ("arima",):
        ns.arima = arima.ArimaSpec.parse(ns.arima)
    if getattr(ns, "alpha_grid", None) is not None and isinstance(ns.alpha_grid, str):
        ns.alpha_grid = _floats(ns.alpha_grid)
    with tempfile.TemporaryDirectory() as tmp:
        ns.out = out or tmp
        new = execute(ns)
    diff = sorted(k for k in old.outputs.keys() | new.outputs.keys() if old.outputs.get(k) != new.outputs.get(k))
    for name in diff:
        log.error("output differs: %s", name)
    return not diff


def _configure_logging(verbose: bool) -> None:
    # own handler bound to the current stderr, so repeated in-process calls behave
    for h in list(log.handlers):
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"zetacast: error: {exc}", file=sys.stderr)
        return 2
    _configure_logging(args.verbose)
    try:
        if args.command == "replay":
            ok = replay(args.manifest, args.out)
            print("replay: identical" if ok else "replay: outputs differ", file=sys.stderr)
            return 0 if ok else 1
        execute(args)
    except UsageError as exc:
        print(f"zetacast: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"zetacast: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
