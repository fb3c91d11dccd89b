"""Replicated simulate -> averaged periodogram -> estimate runs.

Replication r draws its path from random stream (base_seed, r) (see
``simulate``), so a replication's estimate never depends on which other
replications are run, how they are chunked, or how many workers are used.
Per-replication estimates land in an indexed buffer and are reduced in
index order, so serial and threaded runs agree bitwise.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .estimator import (REGRESSORS, BandwidthRule, _fit, critical_value, resolve_bandwidth,
                        standard_errors)
from .model import ArfimaModel
from .simulate import DEFAULT_BURN_IN, simulate_paths
from .spectral import EpochLayout, averaged_ordinates

__all__ = ["McConfig", "McSummary", "McRun", "run_mc", "run_mc_detailed", "emit_table",
           "TABLE_COLUMNS", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1
TABLE_COLUMNS = ("N", "g", "rule", "m", "mean", "bias", "mse", "cr_r", "cr_a", "failures", "mc_se")
_CHUNK = 128


@dataclass(frozen=True)
class McConfig:
    model: ArfimaModel
    total_length: int
    epoch_counts: tuple
    bandwidth_rules: tuple
    replications: int
    base_seed: int
    nominal_level: float = 0.95
    burn_in: int = DEFAULT_BURN_IN
    regressor: str = "sin"

    def __post_init__(self):
        if self.regressor not in REGRESSORS:
            raise ValueError(f"regressor must be one of {REGRESSORS}")
        object.__setattr__(self, "epoch_counts", tuple(int(g) for g in self.epoch_counts))
        rules = tuple(r if isinstance(r, BandwidthRule) else BandwidthRule.parse(r)
                      for r in self.bandwidth_rules)
        object.__setattr__(self, "bandwidth_rules", rules)
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.epoch_counts:
            raise ValueError("epoch_counts must not be empty")
        if not rules:
            raise ValueError("bandwidth_rules must not be empty")
        if not 0.0 < self.nominal_level < 1.0:
            raise ValueError("nominal_level must lie in (0, 1)")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must be a 64-bit unsigned integer")
        for g in self.epoch_counts:
            layout = EpochLayout(self.total_length, g)
            for rule in rules:
                m = resolve_bandwidth(rule, layout, self.model)
                if m < 2:
                    raise ValueError(f"rule {rule} gives m={m} < 2 at N={self.total_length}, g={g}")

    def bandwidths(self) -> dict:
        """{(g, rule string): m} for every cell."""
        return {
            (g, str(rule)): resolve_bandwidth(rule, EpochLayout(self.total_length, g), self.model)
            for g in self.epoch_counts for rule in self.bandwidth_rules
        }

    @classmethod
    def from_dict(cls, data: dict) -> "McConfig":
        """Build from the JSON config schema (see README)."""
        known = {"schema_version", "model", "total_length", "epoch_counts", "bandwidth_rules",
                 "replications", "base_seed", "nominal_level", "burn_in", "regressor"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version}")
        return cls(
            model=ArfimaModel(**data["model"]),
            total_length=int(data["total_length"]),
            epoch_counts=tuple(data["epoch_counts"]),
            bandwidth_rules=tuple(data["bandwidth_rules"]),
            replications=int(data["replications"]),
            base_seed=int(data["base_seed"]),
            nominal_level=float(data.get("nominal_level", 0.95)),
            burn_in=int(data.get("burn_in", DEFAULT_BURN_IN)),
            regressor=str(data.get("regressor", "sin")),
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "model": self.model.to_dict(),
            "total_length": self.total_length,
            "epoch_counts": list(self.epoch_counts),
            "bandwidth_rules": [str(r) for r in self.bandwidth_rules],
            "replications": self.replications,
            "base_seed": self.base_seed,
            "nominal_level": self.nominal_level,
            "burn_in": self.burn_in,
            "regressor": self.regressor,
        }


@dataclass(frozen=True)
class McSummary:
    N: int
    g: int
    rule: str
    m: int
    mean: float
    bias: float
    mse: float
    cr_r: float
    cr_a: float
    failures: int
    mc_se: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class McRun:
    config: McConfig
    summaries: list
    estimates: dict = field(repr=False)  # (g, rule string) -> d_hat per replication


def _run_chunk(config: McConfig, start: int, stop: int, cells: list, out: dict):
    paths = simulate_paths(config.model, config.total_length, config.base_seed,
                           range(start, stop), config.burn_in)
    for g in config.epoch_counts:
        ibar = averaged_ordinates(paths, g)
        n = config.total_length // g
        for key, m in cells:
            if key[0] != g:
                continue
            used = ibar[:, :m]
            ok = np.all(used > 0.0, axis=1)
            logs = np.log(np.where(used > 0.0, used, 1.0))
            d_hat, _ = _fit(logs, m, n, config.regressor)
            out[key][start:stop] = np.where(ok, d_hat, np.nan)


def _summarize(config: McConfig, g: int, rule: str, m: int, est: np.ndarray) -> McSummary:
    d0 = config.model.d
    n = config.total_length // g
    sigma_a, sigma_r = standard_errors(m, n, g, config.regressor)
    z = critical_value(config.nominal_level)
    good = est[~np.isnan(est)]
    failures = est.size - good.size
    if good.size == 0:
        nan = float("nan")
        return McSummary(config.total_length, g, rule, m, nan, nan, nan, nan, nan, failures, nan)
    err = good - d0
    mean = float(np.mean(good))
    mse = float(np.mean(err * err))
    cr_r = 100.0 * float(np.mean(np.abs(err) <= z * sigma_r))
    cr_a = 100.0 * float(np.mean(np.abs(err) <= z * sigma_a))
    mc_se = float(np.std(good, ddof=1) / math.sqrt(good.size)) if good.size > 1 else float("nan")
    return McSummary(config.total_length, g, rule, m, mean, mean - d0, mse, cr_r, cr_a,
                     failures, mc_se)


def run_mc_detailed(config: McConfig, workers: int = 1, chunk: int = _CHUNK) -> McRun:
    """Run the Monte Carlo and keep every per-replication estimate."""
    R = config.replications
    cells = list(config.bandwidths().items())
    out = {key: np.empty(R) for key, _ in cells}
    bounds = [(s, min(s + chunk, R)) for s in range(0, R, chunk)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: _run_chunk(config, b[0], b[1], cells, out), bounds))
    else:
        for start, stop in bounds:
            _run_chunk(config, start, stop, cells, out)
    summaries = [_summarize(config, g, rule, m, out[(g, rule)]) for (g, rule), m in cells]
    summaries.sort(key=lambda s: (s.N, s.g, s.rule))
    return McRun(config, summaries, out)


def run_mc(config: McConfig, workers: int = 1) -> list:
    """Summaries (one per epoch count and bandwidth rule), sorted by (N, g, rule)."""
    return run_mc_detailed(config, workers).summaries


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_table(summaries, fmt: str = "csv") -> str:
    """Render summaries as CSV (header + one row each) or JSON.

    Rows are ordered by ascending N, then g, then rule name.
    """
    rows = sorted(summaries, key=lambda s: (s.N, s.g, s.rule))
    if not rows:
        raise ValueError("no summaries to emit")
    if fmt == "json":
        return json.dumps({"schema_version": SCHEMA_VERSION,
                           "rows": [s.to_dict() for s in rows]}, indent=2)
    if fmt != "csv":
        raise ValueError(f"unknown table format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for s in rows:
        writer.writerow([_fmt(getattr(s, c)) for c in TABLE_COLUMNS])
    return buf.getvalue()
