"""Scenario runners wiring constellation -> channel -> recovery -> analysis."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .. import __version__, rng
from ..analysis import (
    MetricSample,
    estimate_mi_from_samples,
    estimate_mse,
    mi_awgn,
    mse_sps_large_n,
    mse_sps_n1,
    solve_lambda_max,
    solve_lambda_optimum,
)
from ..channel import ChannelParams, make_constant_trajectory, make_wiener_trajectory, transmit
from ..constellation import build_constellation, sample_symbols
from ..phase_recovery import RecoveryConfig, run_recovery
from .config import SCENARIOS, ExperimentConfig

log = logging.getLogger(__name__)

COLUMNS = {
    "mse": ["scenario", "modulation", "lambda", "snr_db", "window_n", "test_phases",
            "mse", "stderr", "analytic_eq8", "analytic_eq12"],
    "lambda-max-scan": ["scenario", "modulation", "snr_db", "window_n", "test_phases",
                        "lambda_max_sim", "mse_at_max", "stderr_at_max", "lambda_opt", "lambda_max_analytic"],
    "mi": ["scenario", "modulation", "lambda", "snr_db", "window_n", "linewidth_hz",
           "mi_bits", "stderr", "mi_awgn_ref"],
    "capacity": ["scenario", "modulation", "snr_db", "lambda_opt", "mi_uniform", "mi_shaped"],
}


@dataclass
class ExperimentResult:
    """Sweep output: one :class:`MetricSample` per grid point plus provenance.

    ``curves`` holds the full per-lambda MSE curves of a lambda-max scan,
    keyed by ``(snr_db, window_n)``.
    """

    scenario: str
    columns: list
    value_name: str
    samples: list
    provenance: dict
    curves: dict = field(default_factory=dict)

    def records(self) -> list[dict]:
        out = []
        for s in self.samples:
            rec = {"scenario": self.scenario, **s.axis}
            if self.value_name:
                rec[self.value_name] = s.value
                rec["stderr"] = s.stderr
            rec.update(s.meta)
            out.append({c: rec.get(c, "") for c in self.columns})
        return out

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records()], dtype=float)


def _snr(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


@lru_cache(maxsize=None)
def _lambda_opt(family: str, order: int, snr_db: float, lam_hi: float) -> float:
    base = build_constellation(family, order)
    return solve_lambda_optimum(base, _snr(snr_db), lam_hi)


@lru_cache(maxsize=None)
def _mi_ref(family: str, order: int, lam: float, snr_db: float) -> float:
    return mi_awgn(build_constellation(family, order, lam), _snr(snr_db))


class _Runner:
    def __init__(self, cfg: ExperimentConfig, threads: int = 1):
        self.cfg = cfg
        self.threads = max(int(threads), 1)
        c = cfg.constellation
        self.family = c.get("family", "square")
        self.order = int(c.get("order", 32 if self.family.startswith("cross") else 64))
        self.base = build_constellation(self.family, self.order)

    def stream(self, purpose: int, point: int):
        if self.cfg.stream_policy == "per-point":
            return rng.stream(self.cfg.seed, purpose, point)
        return rng.stream(self.cfg.seed, purpose)

    def lambda_opt(self, snr_db: float) -> float:
        return _lambda_opt(self.family, self.order, float(snr_db), self.cfg.lam_hi)

    def resolve(self, lam, snr_db: float) -> float:
        return self.lambda_opt(snr_db) if lam == "opt" else float(lam)

    def map(self, fn, items):
        if self.threads == 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(self.threads) as pool:
            return list(pool.map(fn, items))

    def recovery_config(self, n: int) -> RecoveryConfig:
        cfg = self.cfg
        return RecoveryConfig(cfg.estimator_mode, int(n), cfg.test_phases, cfg.windowing,
                              cfg.sector_offset, cfg.unwrap)

    # constant-rotation MSE -------------------------------------------------

    def mse_point(self, item):
        point, lam, snr_db = item
        cfg = self.cfg
        const = self.base.with_lambda(lam)
        s = sample_symbols(const, cfg.symbol_count, self.stream(rng.SYMBOLS, point))
        traj = make_constant_trajectory(cfg.theta, cfg.symbol_count)
        r = transmit(s, traj, ChannelParams(snr_db), const, self.stream(rng.NOISE, point))
        out = []
        for n in cfg.window_n:
            res = run_recovery(r, const, self.recovery_config(n), transmitted=s)
            est = estimate_mse(res.estimates, cfg.theta)
            out.append(MetricSample(
                axis={"modulation": const.name, "lambda": lam, "snr_db": float(snr_db),
                      "window_n": int(n), "test_phases": cfg.test_phases},
                value=est.value, stderr=est.stderr,
                meta={"analytic_eq8": mse_sps_n1(const, _snr(snr_db)),
                      "analytic_eq12": mse_sps_large_n(int(n), _snr(snr_db))},
            ))
        return out

    def mse_items(self):
        items = []
        for snr_db in self.cfg.snr_db:
            for lam in self.cfg.lambdas:
                items.append((len(items), self.resolve(lam, snr_db), float(snr_db)))
        return items

    def run_mse(self):
        return [s for chunk in self.map(self.mse_point, self.mse_items()) for s in chunk], {}

    def run_lambda_max_scan(self):
        samples, _ = self.run_mse()
        lam_root = solve_lambda_max(self.base)
        rows, curves = [], {}
        for snr_db in self.cfg.snr_db:
            for n in self.cfg.window_n:
                pts = [s for s in samples if s.axis["snr_db"] == float(snr_db) and s.axis["window_n"] == int(n)]
                lams = np.array([s.axis["lambda"] for s in pts])
                vals = np.array([s.value for s in pts])
                errs = np.array([s.stderr for s in pts])
                k = int(np.argmax(vals))
                curves[(float(snr_db), int(n))] = (lams, vals, errs)
                rows.append(MetricSample(
                    axis={"modulation": self.base.name, "snr_db": float(snr_db), "window_n": int(n),
                          "test_phases": self.cfg.test_phases},
                    value=float(lams[k]), stderr=float("nan"),
                    meta={"lambda_max_sim": float(lams[k]), "mse_at_max": float(vals[k]),
                          "stderr_at_max": float(errs[k]), "lambda_opt": self.lambda_opt(snr_db),
                          "lambda_max_analytic": lam_root if lam_root is not None else float("nan")},
                ))
        return rows, curves

    # Wiener phase noise MI ---------------------------------------------------

    def mi_point(self, item):
        point, lam, snr_db, linewidth = item
        cfg = self.cfg
        const = self.base.with_lambda(lam)
        s = sample_symbols(const, cfg.symbol_count, self.stream(rng.SYMBOLS, point))
        traj = make_wiener_trajectory(cfg.symbol_count, linewidth, cfg.symbol_rate_baud,
                                      self.stream(rng.PHASE, point))
        r = transmit(s, traj, ChannelParams(snr_db), const, self.stream(rng.NOISE, point))
        ref = _mi_ref(self.family, self.order, lam, float(snr_db))
        out = []
        for n in cfg.window_n:
            res = run_recovery(r, const, self.recovery_config(n), transmitted=s)
            est = estimate_mi_from_samples(s[:res.corrected.size], res.corrected, const)
            out.append(MetricSample(
                axis={"modulation": const.name, "lambda": lam, "snr_db": float(snr_db),
                      "window_n": int(n), "linewidth_hz": float(linewidth)},
                value=est.value, stderr=est.stderr, meta={"mi_awgn_ref": ref},
            ))
        return out

    def run_mi(self):
        items = []
        for lw in self.cfg.linewidth_hz:
            for snr_db in self.cfg.snr_db:
                for lam in self.cfg.lambdas:
                    items.append((len(items), self.resolve(lam, snr_db), float(snr_db), float(lw)))
        return [s for chunk in self.map(self.mi_point, items) for s in chunk], {}

    def awgn_point(self, item):
        point, lam, snr_db = item
        cfg = self.cfg
        const = self.base.with_lambda(lam)
        s = sample_symbols(const, cfg.symbol_count, self.stream(rng.SYMBOLS, point))
        traj = make_constant_trajectory(0.0, cfg.symbol_count)
        r = transmit(s, traj, ChannelParams(snr_db), const, self.stream(rng.NOISE, point))
        est = estimate_mi_from_samples(s, r, const)
        return [MetricSample(
            axis={"modulation": const.name, "lambda": lam, "snr_db": float(snr_db),
                  "window_n": "", "linewidth_hz": 0.0},
            value=est.value, stderr=est.stderr,
            meta={"mi_awgn_ref": _mi_ref(self.family, self.order, lam, float(snr_db))},
        )]

    def run_awgn(self):
        return [s for chunk in self.map(self.awgn_point, self.mse_items()) for s in chunk], {}

    def run_capacity(self):
        def point(snr_db):
            lam = self.lambda_opt(snr_db)
            return MetricSample(
                axis={"modulation": self.base.name, "snr_db": float(snr_db)}, value=lam, stderr=0.0,
                meta={"lambda_opt": lam,
                      "mi_uniform": _mi_ref(self.family, self.order, 0.0, float(snr_db)),
                      "mi_shaped": _mi_ref(self.family, self.order, lam, float(snr_db))},
            )
        return self.map(point, [float(x) for x in self.cfg.snr_db]), {}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run one scenario sweep and return its rows with provenance."""
    runner = _Runner(cfg, threads)
    sc = cfg.scenario
    log.info("running %s (%s) with %d symbols", sc, SCENARIOS[sc], cfg.symbol_count)
    if sc in ("sps-mse", "bps-mse"):
        samples, curves = runner.run_mse()
        columns, value_name = COLUMNS["mse"], "mse"
    elif sc == "lambda-max-scan":
        samples, curves = runner.run_lambda_max_scan()
        columns, value_name = COLUMNS["lambda-max-scan"], None
    elif sc in ("mi-vs-lambda", "mi-vs-snr", "mi-vs-window"):
        samples, curves = runner.run_mi()
        columns, value_name = COLUMNS["mi"], "mi_bits"
    elif sc == "validate-awgn":
        samples, curves = runner.run_awgn()
        columns, value_name = COLUMNS["mi"], "mi_bits"
    else:
        samples, curves = runner.run_capacity()
        columns, value_name = COLUMNS["capacity"], None
    provenance = {"config_hash": cfg.digest(), "seed": cfg.seed, "stream_policy": cfg.stream_policy,
                  "version": __version__, "config": cfg.to_dict()}
    return ExperimentResult(sc, columns, value_name, samples, provenance, curves)
