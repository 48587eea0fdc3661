"""Experiment configuration: schema, defaults and YAML loading."""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

SEED_ENV = "PSLAB_SEED"
FAST_FACTOR = 16
MI_MIN_SYMBOLS = 10**4

SCENARIOS = {
    "capacity": "AWGN MI of uniform vs shaped QAM and the capacity-maximizing lambda per SNR",
    "sps-mse": "SPS phase MSE vs lambda, constant pi/6 rotation, against closed forms",
    "bps-mse": "BPS phase MSE vs lambda for several windows, constant pi/6 rotation",
    "lambda-max-scan": "lambda maximizing BPS MSE (N=10) vs lambda_opt, per SNR",
    "mi-vs-lambda": "MI after BPS + supervised cycle-slip correction vs lambda, Wiener noise",
    "mi-vs-snr": "MI after BPS vs SNR at lambda_opt, Wiener noise",
    "mi-vs-window": "MI after BPS vs window length for uniform and shaped input",
    "validate-awgn": "MI estimated from AWGN-only samples vs quadrature MI (setup check)",
}

MSE_SCENARIOS = ("sps-mse", "bps-mse", "lambda-max-scan")
MI_SCENARIOS = ("mi-vs-lambda", "mi-vs-snr", "mi-vs-window")

# symbol counts and estimator settings per scenario family
_DEFAULTS = {
    "mse": dict(symbol_count=2**19, test_phases=900, windowing="block", sector_offset=0.0,
                theta=math.pi / 6),
    "mi": dict(symbol_count=2**17, test_phases=60, windowing="sliding", sector_offset=None,
               linewidth_hz=[200e3], unwrap="supervised-cycle-slip"),
    "awgn": dict(symbol_count=2**17),
    "capacity": dict(),
}


def _family(scenario: str) -> str:
    if scenario in MSE_SCENARIOS:
        return "mse"
    if scenario in MI_SCENARIOS:
        return "mi"
    if scenario == "validate-awgn":
        return "awgn"
    return "capacity"


@dataclass(frozen=True)
class ExperimentConfig:
    """One scenario sweep.

    ``lambdas`` entries may be the string ``"opt"``, resolved per SNR to the
    capacity-maximizing shaping parameter.
    """

    scenario: str
    constellation: dict = field(default_factory=lambda: {"family": "square", "order": 64})
    lambdas: list = field(default_factory=lambda: [0.0])
    snr_db: list = field(default_factory=lambda: [12.0])
    window_n: list = field(default_factory=lambda: [100])
    linewidth_hz: list = field(default_factory=lambda: [0.0])
    symbol_rate_baud: float = 50e9
    symbol_count: int = 2**17
    test_phases: int = 60
    mode: str | None = None
    windowing: str = "block"
    sector_offset: float | None = None
    unwrap: str = "none"
    theta: float = 0.0
    seed: int = 1
    stream_policy: str = "common"
    lam_hi: float = 0.2
    output: str | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        for name in ("snr_db",):
            if not getattr(self, name):
                raise ValueError(f"{name} must be a non-empty list")
        if self.scenario != "capacity" and not self.lambdas:
            raise ValueError("lambdas must be a non-empty list")
        if self.scenario not in ("capacity", "validate-awgn") and not self.window_n:
            raise ValueError("window_n must be a non-empty list")
        if any(not (isinstance(x, str) and x == "opt") and float(x) < 0 for x in self.lambdas):
            raise ValueError("lambdas must be >= 0 or 'opt'")
        if any(int(n) < 1 for n in self.window_n):
            raise ValueError("window_n entries must be >= 1")
        if self.symbol_count < 1:
            raise ValueError("symbol_count must be >= 1")
        fam = _family(self.scenario)
        if fam == "mse" and self.windowing == "block" and max(self.window_n) > self.symbol_count:
            raise ValueError(f"symbol_count {self.symbol_count} is shorter than window {max(self.window_n)}")
        if fam == "mi" and self.symbol_count < MI_MIN_SYMBOLS:
            raise ValueError("MI scenarios need at least 10^4 symbols for the sample MI estimator")
        if self.stream_policy not in ("common", "per-point"):
            raise ValueError("stream_policy must be 'common' or 'per-point'")
        if self.scenario == "mi-vs-snr" and len(self.snr_db) < 1:
            raise ValueError("mi-vs-snr needs an SNR axis")

    @property
    def estimator_mode(self) -> str:
        if self.mode:
            return self.mode.upper()
        return "SPS" if self.scenario == "sps-mse" else "BPS"

    def fast(self) -> "ExperimentConfig":
        """Copy with symbol counts divided by ``FAST_FACTOR``.

        MI scenarios keep at least 10^4 symbols for the sample MI estimator.
        """
        floor = MI_MIN_SYMBOLS if _family(self.scenario) == "mi" else 1
        return replace(self, symbol_count=max(self.symbol_count // FAST_FACTOR, floor))

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def make_config(**values) -> ExperimentConfig:
    """Build a config, filling scenario-family defaults for unspecified keys."""
    scenario = values.get("scenario")
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    merged = dict(_DEFAULTS[_family(scenario)])
    merged.update(values)
    for key in ("lambdas", "snr_db", "window_n", "linewidth_hz"):
        if key in merged and not isinstance(merged[key], (list, tuple)):
            merged[key] = [merged[key]]
        if key in merged:
            merged[key] = list(merged[key])
    return ExperimentConfig(**merged)


def load_config(path, *, seed: int | None = None) -> ExperimentConfig:
    """Read a YAML (or JSON) experiment file.

    The master seed is taken, in order of precedence, from ``seed``, the
    ``PSLAB_SEED`` environment variable, then the file.
    """
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping at top level")
    data = _flatten_phase(data)
    env = os.environ.get(SEED_ENV)
    if seed is not None:
        data["seed"] = int(seed)
    elif env:
        data["seed"] = int(env)
    return make_config(**data)


def _flatten_phase(data: dict) -> dict:
    # accept the nested channel form {phase: {kind, theta | linewidth_hz, symbol_rate_baud}}
    data = dict(data)
    phase = data.pop("phase", None)
    if phase:
        kind = phase.get("kind", "constant")
        if kind == "constant":
            data.setdefault("theta", float(phase.get("theta", 0.0)))
        elif kind == "wiener":
            data.setdefault("linewidth_hz", phase.get("linewidth_hz", [200e3]))
            data.setdefault("symbol_rate_baud", float(phase.get("symbol_rate_baud", 50e9)))
        else:
            raise ValueError(f"unknown phase kind {kind!r}; use 'constant' or 'wiener'")
    return data
