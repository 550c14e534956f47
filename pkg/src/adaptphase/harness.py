"""Monte Carlo sweeps over schedules, policies and readout models."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .controller import make_schedule, parse_policy, run_episode
from .measurement import ReadoutModel, RngStream


class EmptyEnsemble(ValueError):
    pass


class InsufficientPoints(ValueError):
    pass


class NonPositiveValue(ValueError):
    pass


class ConfigError(ValueError):
    pass


def _holevo_of_mean(z: complex) -> float:
    r = abs(z)
    # resultants below 1e-12 are zero up to rounding of the unit phasors
    return math.inf if r < 1e-12 else float(r**-2 - 1.0)


def ensemble_holevo(errors) -> float:
    """``|mean(exp(i delta))|^-2 - 1`` over estimation errors ``delta``."""
    d = np.asarray(errors, dtype=float)
    if d.size == 0:
        raise EmptyEnsemble("ensemble Holevo variance needs at least one error")
    return _holevo_of_mean(np.mean(np.exp(1j * d)))


def bootstrap_stderr(errors, resamples: int = 200, seed: int = 0) -> float:
    d = np.asarray(errors, dtype=float)
    if d.size == 0:
        raise EmptyEnsemble("bootstrap needs at least one error")
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, d.size, 0xB007])))
    ph = np.exp(1j * d)
    vals = np.array([_holevo_of_mean(ph[gen.integers(0, d.size, d.size)].mean()) for _ in range(resamples)])
    if not np.all(np.isfinite(vals)):
        return math.inf
    return float(np.std(vals, ddof=1)) if resamples > 1 else 0.0


def fit_loglog_slope(points) -> float:
    """Least-squares slope of ``log V`` against ``log T``."""
    pts = [(float(T), float(V)) for T, V in points]
    if len(pts) < 3:
        raise InsufficientPoints(f"need at least 3 points, got {len(pts)}")
    for T, V in pts:
        if not (math.isfinite(T) and math.isfinite(V)):
            raise NonPositiveValue(f"non-finite point ({T}, {V})")
        if T <= 0 or V <= 0:
            raise NonPositiveValue(f"log-log fit needs positive values, got ({T}, {V})")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


_DEFAULTS = {
    "policies": ["m2"],
    "c": [1.0],
    "gamma": [0.0],
    "trials": 1000,
    "seed": 0,
    "phi_true": "uniform",
    "workers": 1,
    "out": None,
}
_KEYS = {"n_range"} | set(_DEFAULTS)


@dataclass
class SweepConfig:
    """Sweep parameters.  ``n_range`` is inclusive ``[lo, hi]``."""

    n_range: tuple
    policies: list = field(default_factory=lambda: ["m2"])
    c: list = field(default_factory=lambda: [1.0])
    gamma: list = field(default_factory=lambda: [0.0])
    trials: int = 1000
    seed: int = 0
    phi_true: object = "uniform"
    workers: int = 1
    out: str | None = None

    @property
    def n_values(self):
        return list(range(self.n_range[0], self.n_range[1] + 1))

    def to_dict(self):
        d = asdict(self)
        d["n_range"] = list(self.n_range)
        return d


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _number(key, v, lo=None, hi=None, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {v!r}")
    if hi is not None and v > hi:
        raise ConfigError(f"{key}: must be <= {hi}, got {v!r}")
    return int(v) if integer else float(v)


def config_from_dict(doc: dict) -> SweepConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if "n_range" not in doc:
        raise ConfigError("n_range: required")
    nr = doc["n_range"]
    if isinstance(nr, (int, float)) and not isinstance(nr, bool):
        nr = [nr, nr]
    if not isinstance(nr, (list, tuple)) or len(nr) != 2:
        raise ConfigError(f"n_range: expected [lo, hi], got {nr!r}")
    lo = _number("n_range[0]", nr[0], lo=0, integer=True)
    hi = _number("n_range[1]", nr[1], lo=lo, integer=True)
    merged = {**_DEFAULTS, **{k: v for k, v in doc.items() if k != "n_range"}}

    policies = _as_list(merged["policies"])
    if not policies:
        raise ConfigError("policies: must not be empty")
    for i, p in enumerate(policies):
        try:
            parse_policy(str(p))
        except ValueError as exc:
            raise ConfigError(f"policies[{i}]: {exc}") from None
    cs = [_number(f"c[{i}]", v, 0.0, 1.0) for i, v in enumerate(_as_list(merged["c"]))]
    gs = [_number(f"gamma[{i}]", v, 0.0) for i, v in enumerate(_as_list(merged["gamma"]))]
    if not cs:
        raise ConfigError("c: must not be empty")
    if not gs:
        raise ConfigError("gamma: must not be empty")
    trials = _number("trials", merged["trials"], 1, integer=True)
    seed = _number("seed", merged["seed"], 0, integer=True)
    workers = _number("workers", merged["workers"], 1, integer=True)
    phi = merged["phi_true"]
    if phi != "uniform":
        phi = _number("phi_true", phi, -math.pi, math.pi)
    out = merged["out"]
    if out is not None and not isinstance(out, str):
        raise ConfigError(f"out: expected a path string, got {out!r}")
    return SweepConfig((lo, hi), [str(p) for p in policies], cs, gs, trials, seed, phi, workers, out)


def parse_config(text: str) -> SweepConfig:
    """Parse a JSON sweep config.

    Only ``n_range`` is required; defaults are ``policies=["m2"]``,
    ``c=[1]``, ``gamma=[0]``, ``trials=1000``, ``seed=0``,
    ``phi_true="uniform"``, ``workers=1``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(doc)


def emit_config(cfg: SweepConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


CSV_HEADER = ["N", "policy", "M", "c", "gamma", "T", "v_h", "stderr", "trials", "excluded", "seed"]


@dataclass
class SweepRow:
    N: int
    policy: str
    M: str
    c: float
    gamma: float
    T: int
    v_h: float
    stderr: float
    trials: int
    excluded: int
    seed: int

    @property
    def used(self) -> int:
        return self.trials - self.excluded


@dataclass
class SweepResult:
    rows: list
    config: SweepConfig | None = None

    def points(self, policy: str, c: float = 1.0, gamma: float = 0.0):
        return [(r.T, r.v_h) for r in self.rows if r.policy == policy and r.c == c and r.gamma == gamma]


def trial_errors(N: int, policy: str, c: float, gamma: float, phi_true, seed: int, trials):
    """Estimation errors (wrapped) for the given trial indices; ``None`` marks undefined estimates."""
    sched = make_schedule(N, parse_policy(policy))
    r = ReadoutModel(c, gamma)
    out = []
    for j in trials:
        rng = RngStream(seed, j)
        phi = rng.phase() if phi_true == "uniform" else float(phi_true)
        tr = run_episode(phi, sched, r, rng, keep_pdf=False)
        out.append(None if tr.phi_est is None else math.remainder(tr.phi_est - tr.phi_true, 2 * math.pi))
    return out


def _chunk_job(args):
    return trial_errors(*args)


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Ensemble Holevo variance for every (N, policy, c, gamma) tuple.

    Trial ``j`` always draws from ``RngStream(cfg.seed, j)``, and errors are
    reduced in trial order, so results do not depend on ``workers``.
    """
    workers = cfg.workers if workers is None else workers
    tuples = [(N, p, c, g) for p in cfg.policies for c in cfg.c for g in cfg.gamma for N in cfg.n_values]
    n_chunks = max(1, workers * 4)
    bounds = np.linspace(0, cfg.trials, n_chunks + 1).astype(int)
    jobs = []
    for N, p, c, g in tuples:
        for a, b in zip(bounds[:-1], bounds[1:]):
            if b > a:
                jobs.append((N, p, c, g, cfg.phi_true, cfg.seed, range(int(a), int(b))))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_chunk_job, jobs))
    else:
        chunks = [_chunk_job(j) for j in jobs]

    rows = []
    i = 0
    for N, p, c, g in tuples:
        errs = []
        while i < len(jobs) and jobs[i][:4] == (N, p, c, g):
            errs.extend(chunks[i])
            i += 1
        used = [e for e in errs if e is not None]
        excluded = len(errs) - len(used)
        pol = parse_policy(p)
        T = make_schedule(N, pol).total_time
        if used:
            vh = ensemble_holevo(used)
            se = bootstrap_stderr(used, seed=cfg.seed)
        else:
            vh = se = math.inf
        rows.append(SweepRow(N, p, pol.m_label, c, g, T, vh, se, cfg.trials, excluded, cfg.seed))
    return SweepResult(rows, cfg)


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(float(x))
    return str(x)


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in result.rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])


def read_sweep_csv(path) -> list:
    with open(Path(path), newline="") as fh:
        return list(csv.DictReader(fh))
